//! Shared stages: similarity construction, penalty selection, solving.

use std::path::Path;

use linkpred::cv::{cross_validate, default_lambda_grid, CvPlan, CvScore, CvTable};
use linkpred::graph::{AdjacencyMatrix, CovariateTable, ObservationMask};
use linkpred::similarity::{
    auto_sigma, block_indicator, covariate_kernel, fraction_match, jaccard, SimilarityMatrix,
};
use linkpred::solver::{
    solve_directed, solve_undirected, Method, ScoreMatrix, SolveReport, SolverConfig,
};

use crate::args::{SimilarityArgs, SolverArgs};
use crate::manifest::Manifest;

pub fn stage<E: std::fmt::Display>(name: &'static str) -> impl Fn(E) -> String {
    move |e| format!("{name}: {e}")
}

/// The similarity matrix actually used, plus what to record about it.
pub struct BuiltSimilarity {
    pub matrix: SimilarityMatrix,
    pub source: String,
    pub sigma_effective: Option<f64>,
}

pub fn build_similarity(
    args: &SimilarityArgs,
    observed: &AdjacencyMatrix,
    covariates: Option<&CovariateTable>,
    oracle_labels: Option<&[usize]>,
) -> Result<BuiltSimilarity, String> {
    let fail = |m: String| format!("similarity: {m}");
    let source = match (&args.similarity, oracle_labels) {
        (Some(s), _) => s.clone(),
        (None, Some(_)) => "oracle".to_string(),
        (None, None) if covariates.is_some() => "covariates".to_string(),
        (None, None) => "jaccard".to_string(),
    };
    let (raw, sigma_effective) = match source.as_str() {
        "covariates" => {
            let x = covariates.ok_or_else(|| {
                fail("covariate similarity needs a covariate table (--covariates)".into())
            })?;
            let sigma = if args.sigma == "auto" {
                auto_sigma(x).map_err(|e| fail(e.to_string()))?
            } else {
                args.sigma
                    .parse::<f64>()
                    .map_err(|_| fail(format!("bad --sigma value {:?}", args.sigma)))?
            };
            (
                covariate_kernel(x, Some(sigma)).map_err(|e| fail(e.to_string()))?,
                Some(sigma),
            )
        }
        "jaccard" => (jaccard(observed), None),
        "fraction-match" => (fraction_match(observed), None),
        "oracle" => {
            let labels = oracle_labels.ok_or_else(|| {
                fail("oracle similarity is only available for sbm simulations".into())
            })?;
            (block_indicator(labels), None)
        }
        other => {
            return Err(fail(format!(
                "unknown similarity source {other:?}: expected covariates, jaccard or fraction-match"
            )))
        }
    };
    let matrix = raw.truncate(args.truncate).map_err(|e| fail(e.to_string()))?;
    Ok(BuiltSimilarity {
        matrix,
        source,
        sigma_effective,
    })
}

pub fn solver_config(args: &SolverArgs, lambda: f64) -> Result<SolverConfig, String> {
    let method: Method = args.method.parse().map_err(stage("solver"))?;
    Ok(SolverConfig {
        lambda,
        q: args.q,
        method,
        tol: args.tol,
        max_sweeps: args.max_sweeps,
        ridge: args.ridge,
    })
}

pub fn parse_lambda_grid(args: &SolverArgs, n: usize) -> Result<Vec<f64>, String> {
    match &args.lambda_grid {
        None => Ok(default_lambda_grid(n)),
        Some(text) => {
            let grid: Result<Vec<f64>, _> =
                text.split(',').map(|t| t.trim().parse::<f64>()).collect();
            grid.map_err(|_| format!("tune: bad --lambda-grid {text:?}"))
        }
    }
}

pub struct TunedLambda {
    pub lambda: f64,
    pub table: CvTable,
}

pub fn tune_lambda(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    args: &SolverArgs,
    seed: u64,
) -> Result<TunedLambda, String> {
    let score: CvScore = args.cv_score.parse().map_err(stage("tune"))?;
    let plan = CvPlan {
        folds: args.cv_folds,
        lambda_grid: parse_lambda_grid(args, a.n())?,
        score,
        seed,
    };
    let config = solver_config(args, 0.0)?;
    let (lambda, table) =
        cross_validate(a, w, mask, &plan, &config).map_err(stage("tune"))?;
    Ok(TunedLambda { lambda, table })
}

pub fn write_cv_table(table: &CvTable, path: &Path) -> Result<(), String> {
    let mut text = String::from("lambda,mean_score\n");
    for row in &table.rows {
        text.push_str(&format!("{},{}\n", row.lambda, row.mean_score));
    }
    std::fs::write(path, text).map_err(|e| format!("tune: {e}"))
}

pub fn solve(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    config: &SolverConfig,
) -> Result<(ScoreMatrix, SolveReport), String> {
    let result = if a.directed() {
        solve_directed(a, w, mask, config)
    } else {
        solve_undirected(a, w, mask, config)
    };
    result.map_err(stage("solve"))
}

pub fn record_report(manifest: &mut Manifest, prefix: &str, report: &SolveReport) {
    manifest.set(&format!("{prefix}_converged"), report.converged);
    manifest.set(&format!("{prefix}_sweeps"), report.sweeps_used);
    manifest.set(&format!("{prefix}_final_change"), report.final_change);
    manifest.set(&format!("{prefix}_objective"), report.objective);
}

pub fn record_similarity(manifest: &mut Manifest, built: &BuiltSimilarity, args: &SimilarityArgs) {
    manifest.set("similarity", &built.source);
    manifest.set("truncate", args.truncate);
    manifest.set("sigma", &args.sigma);
    if let Some(sigma) = built.sigma_effective {
        manifest.set("sigma_effective", sigma);
    }
}

pub fn record_solver(manifest: &mut Manifest, args: &SolverArgs) {
    manifest.set("method", &args.method);
    manifest.set("q", args.q);
    manifest.set("tol", args.tol);
    manifest.set("max_sweeps", args.max_sweeps);
    manifest.set("ridge", args.ridge);
}

pub fn ensure_out_dir(path: &Path) -> Result<(), String> {
    std::fs::create_dir_all(path).map_err(|e| format!("output: {e}"))
}

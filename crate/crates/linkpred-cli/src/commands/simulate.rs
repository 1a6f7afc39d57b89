//! The synthetic experiment protocol: generate a true network, certify a
//! random subset of entries, fit the full-sum and partial-sum criteria, and
//! evaluate ROC curves on the uncertified pairs against the truth, with the
//! true-probability ranking as a benchmark. Curves are averaged over
//! replicates on a fixed FPR grid.

use linkpred::eval::{average_curves, fpr_grid, rank_test_set, roc, RocCurve};
use linkpred::graph::ObservationMask;
use linkpred::io;
use linkpred::sim::{generate_true, observe_masked, SbmParams, SimFamily, SimModel};
use linkpred::solver::ScoreMatrix;

use crate::args::SimulateArgs;
use crate::commands::common::{
    build_similarity, ensure_out_dir, record_report, record_similarity, record_solver, solve,
    solver_config, stage, tune_lambda,
};
use crate::manifest::Manifest;

/// Deterministic seed streams derived from the one --seed flag.
const OBSERVE_STREAM: u64 = 1_000_000;
const CV_STREAM: u64 = 2_000_000;

pub fn run(args: &SimulateArgs) -> Result<(), String> {
    ensure_out_dir(&args.out)?;
    if args.beta != 1.0 {
        return Err(
            "simulate: the protocol certifies observed entries, which requires --beta 1 \
             (the general error model is available through the library)"
                .to_string(),
        );
    }
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(format!("simulate: --alpha {} outside [0,1]", args.alpha));
    }
    if args.reps == 0 {
        return Err("simulate: --reps must be at least 1".to_string());
    }
    let family: SimFamily = args.model.parse().map_err(stage("model"))?;

    let sbm_params = if family == SimFamily::Sbm {
        Some(
            SbmParams::balanced(args.n, args.sbm_blocks, args.sbm_within, args.sbm_between)
                .map_err(stage("model"))?,
        )
    } else {
        None
    };
    if args.oracle_w && sbm_params.is_none() {
        return Err("similarity: --oracle-w needs the sbm family".to_string());
    }

    let mut manifest = Manifest::new();
    manifest.set("subcommand", "simulate");
    manifest.set("family", family);
    manifest.set("n", args.n);
    manifest.set("alpha", args.alpha);
    manifest.set("beta", args.beta);
    manifest.set("reps", args.reps);
    manifest.set("p", args.p);
    manifest.set("seed", args.seed);
    manifest.set("oracle_w", args.oracle_w);
    if family == SimFamily::Sbm {
        manifest.set("sbm_blocks", args.sbm_blocks);
        manifest.set("sbm_within", args.sbm_within);
        manifest.set("sbm_between", args.sbm_between);
    }
    record_solver(&mut manifest, &args.solver);

    let mut full_curves: Vec<RocCurve> = Vec::new();
    let mut partial_curves: Vec<RocCurve> = Vec::new();
    let mut benchmark_curves: Vec<RocCurve> = Vec::new();

    for rep in 0..args.reps as u64 {
        let mut model = SimModel::new(family, args.n, args.seed + rep);
        model.p = args.p;
        if let Some(params) = &sbm_params {
            model = model.with_sbm(params.clone());
        }
        let generated = generate_true(&model).map_err(stage("generate"))?;
        let (observed, mask) = observe_masked(
            &generated.truth,
            args.alpha,
            args.seed + OBSERVE_STREAM + rep,
        )
        .map_err(stage("observe"))?;

        let oracle_labels = if args.oracle_w {
            sbm_params.as_ref().map(|p| p.labels())
        } else {
            None
        };
        let built = build_similarity(
            &args.similarity,
            &observed,
            generated.covariates.as_ref(),
            oracle_labels,
        )?;
        if rep == 0 {
            record_similarity(&mut manifest, &built, &args.similarity);
        }
        if let Some(sigma) = built.sigma_effective {
            manifest.set(&format!("sigma_effective_rep{rep}"), sigma);
        }

        let lambda = match args.solver.lambda {
            Some(lambda) => lambda,
            None => {
                // protocol default: cross-validate on the full-sum criterion
                let tuned = tune_lambda(
                    &observed,
                    &built.matrix,
                    None,
                    &args.solver,
                    args.seed + CV_STREAM + rep,
                )?;
                tuned.lambda
            }
        };
        manifest.set(&format!("lambda_rep{rep}"), lambda);
        let config = solver_config(&args.solver, lambda)?;

        let (f_full, report_full) = solve(&observed, &built.matrix, None, &config)?;
        let (f_partial, report_partial) =
            solve(&observed, &built.matrix, Some(&mask), &config)?;
        record_report(&mut manifest, &format!("full_rep{rep}"), &report_full);
        record_report(&mut manifest, &format!("partial_rep{rep}"), &report_partial);

        let mut benchmark = ScoreMatrix::zeros(args.n, generated.truth.directed());
        for (i, j) in benchmark.pairs() {
            benchmark.set(i, j, generated.probabilities[[i, j]]);
        }

        for (scores, name, bucket) in [
            (&f_full, "full", &mut full_curves),
            (&f_partial, "partial", &mut partial_curves),
            (&benchmark, "truep", &mut benchmark_curves),
        ] {
            let ranked = rank_test_set(scores, &mask).map_err(stage("evaluate"))?;
            let curve = roc(&ranked, &generated.truth).map_err(stage("evaluate"))?;
            io::write_roc(&curve, &args.out.join(format!("roc_{name}_rep{rep}.csv")))
                .map_err(stage("output"))?;
            bucket.push(curve);
        }

        if args.dump_instances {
            dump_instance(args, rep, &generated, &observed, &mask)?;
        }
    }

    let grid = fpr_grid(1001);
    for (curves, name) in [
        (&full_curves, "full"),
        (&partial_curves, "partial"),
        (&benchmark_curves, "truep"),
    ] {
        let averaged = average_curves(curves, &grid).map_err(stage("evaluate"))?;
        io::write_roc(&averaged, &args.out.join(format!("roc_{name}_avg.csv")))
            .map_err(stage("output"))?;
        manifest.set(&format!("auc_{name}_mean"), averaged.auc());
    }
    manifest.write(&args.out.join("manifest.txt"))?;
    Ok(())
}

fn dump_instance(
    args: &SimulateArgs,
    rep: u64,
    generated: &linkpred::sim::Generated,
    observed: &linkpred::graph::AdjacencyMatrix,
    mask: &ObservationMask,
) -> Result<(), String> {
    let fail = |m: String| format!("output: {m}");
    io::write_edge_list(&generated.truth, &args.out.join(format!("truth_rep{rep}.txt")))
        .map_err(|e| fail(e.to_string()))?;
    io::write_edge_list(observed, &args.out.join(format!("observed_rep{rep}.txt")))
        .map_err(|e| fail(e.to_string()))?;
    io::write_mask(
        mask,
        !generated.truth.directed(),
        &args.out.join(format!("mask_rep{rep}.txt")),
    )
    .map_err(|e| fail(e.to_string()))?;
    if let Some(x) = &generated.covariates {
        let mut text = String::new();
        for i in 0..x.n() {
            let row: Vec<String> = (0..x.p()).map(|k| format!("{}", x.rows()[[i, k]])).collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        std::fs::write(args.out.join(format!("covariates_rep{rep}.csv")), text)
            .map_err(|e| fail(e.to_string()))?;
    }
    let mut text = String::new();
    for i in 0..args.n {
        let row: Vec<String> = (0..args.n)
            .map(|j| format!("{}", generated.probabilities[[i, j]]))
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(args.out.join(format!("probabilities_rep{rep}.csv")), text)
        .map_err(|e| fail(e.to_string()))?;
    Ok(())
}

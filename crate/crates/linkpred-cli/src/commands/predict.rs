use linkpred::io;

use crate::args::PredictArgs;
use crate::commands::common::{
    build_similarity, ensure_out_dir, record_report, record_similarity, record_solver, solve,
    solver_config, stage, tune_lambda, write_cv_table,
};
use crate::manifest::Manifest;

pub fn run(args: &PredictArgs) -> Result<(), String> {
    ensure_out_dir(&args.out)?;
    let read = io::read_edge_list(&args.input, args.n, args.directed).map_err(stage("input"))?;
    if read.skipped_self_loops > 0 {
        eprintln!(
            "warning: skipped {} self-loop line(s) in {}",
            read.skipped_self_loops,
            args.input.display()
        );
    }
    let observed = read.matrix;
    let mask = match &args.mask {
        None => None,
        Some(path) => {
            Some(io::read_mask(path, args.n, !args.directed).map_err(stage("mask"))?)
        }
    };
    let covariates = match &args.similarity.covariates {
        None => None,
        Some(path) => {
            Some(io::read_covariates(path, args.similarity.header).map_err(stage("covariates"))?)
        }
    };

    let built = build_similarity(&args.similarity, &observed, covariates.as_ref(), None)?;

    let mut manifest = Manifest::new();
    manifest.set("subcommand", "predict");
    manifest.set("input", args.input.display());
    manifest.set("n", args.n);
    manifest.set("directed", args.directed);
    manifest.set("seed", args.seed);
    manifest.set(
        "criterion",
        if mask.is_some() { "partial" } else { "full" },
    );
    if let Some(path) = &args.mask {
        manifest.set("mask", path.display());
    }
    record_similarity(&mut manifest, &built, &args.similarity);
    record_solver(&mut manifest, &args.solver);

    let lambda = match (args.solver.lambda, args.solver.cv) {
        (Some(lambda), _) => {
            manifest.set("lambda", lambda);
            lambda
        }
        (None, _) => {
            let tuned = tune_lambda(
                &observed,
                &built.matrix,
                mask.as_ref(),
                &args.solver,
                args.seed,
            )?;
            write_cv_table(&tuned.table, &args.out.join("cv.csv"))?;
            manifest.set("lambda", tuned.lambda);
            manifest.set("lambda_source", "cv");
            manifest.set("cv_folds", args.solver.cv_folds);
            manifest.set("cv_score", &args.solver.cv_score);
            tuned.lambda
        }
    };

    let config = solver_config(&args.solver, lambda)?;
    let (scores, report) = solve(&observed, &built.matrix, mask.as_ref(), &config)?;
    record_report(&mut manifest, "report", &report);

    io::write_scores(&scores, None, &args.out.join("scores.csv")).map_err(stage("output"))?;
    manifest.write(&args.out.join("manifest.txt"))?;
    Ok(())
}

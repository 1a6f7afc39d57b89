use linkpred::io;

use crate::args::PredictArgs;
use crate::commands::common::{
    build_similarity, ensure_out_dir, record_similarity, record_solver, stage, tune_lambda,
    write_cv_table,
};
use crate::manifest::Manifest;

pub fn run(args: &PredictArgs) -> Result<(), String> {
    ensure_out_dir(&args.out)?;
    let observed = io::read_edge_list(&args.input, args.n, args.directed)
        .map_err(stage("input"))?
        .matrix;
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
    let tuned = tune_lambda(
        &observed,
        &built.matrix,
        mask.as_ref(),
        &args.solver,
        args.seed,
    )?;
    write_cv_table(&tuned.table, &args.out.join("cv.csv"))?;

    let mut manifest = Manifest::new();
    manifest.set("subcommand", "tune");
    manifest.set("input", args.input.display());
    manifest.set("n", args.n);
    manifest.set("directed", args.directed);
    manifest.set("seed", args.seed);
    manifest.set(
        "criterion",
        if mask.is_some() { "partial" } else { "full" },
    );
    manifest.set("best_lambda", tuned.lambda);
    manifest.set("cv_folds", args.solver.cv_folds);
    manifest.set("cv_score", &args.solver.cv_score);
    record_similarity(&mut manifest, &built, &args.similarity);
    record_solver(&mut manifest, &args.solver);
    manifest.write(&args.out.join("manifest.txt"))?;

    println!("best_lambda={}", tuned.lambda);
    Ok(())
}

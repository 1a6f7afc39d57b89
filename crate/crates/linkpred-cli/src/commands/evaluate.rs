use linkpred::eval::{rank_test_set, roc};
use linkpred::io;

use crate::args::EvaluateArgs;
use crate::commands::common::{ensure_out_dir, stage};
use crate::manifest::Manifest;

pub fn run(args: &EvaluateArgs) -> Result<(), String> {
    ensure_out_dir(&args.out)?;
    let truth = io::read_edge_list(&args.truth, args.n, args.directed)
        .map_err(stage("truth"))?
        .matrix;
    let scores =
        io::read_scores(&args.scores, args.n, args.directed).map_err(stage("scores"))?;
    let mask = io::read_mask(&args.mask, args.n, !args.directed).map_err(stage("mask"))?;

    let ranked = rank_test_set(&scores, &mask).map_err(stage("evaluate"))?;
    let curve = roc(&ranked, &truth).map_err(stage("evaluate"))?;
    io::write_roc(&curve, &args.out.join("roc.csv")).map_err(stage("output"))?;

    let mut manifest = Manifest::new();
    manifest.set("subcommand", "evaluate");
    manifest.set("scores", args.scores.display());
    manifest.set("truth", args.truth.display());
    manifest.set("mask", args.mask.display());
    manifest.set("n", args.n);
    manifest.set("directed", args.directed);
    manifest.set("auc", curve.auc());
    manifest.set("test_pairs", ranked.len());
    manifest.write(&args.out.join("manifest.txt"))?;

    println!("auc={}", curve.auc());
    Ok(())
}

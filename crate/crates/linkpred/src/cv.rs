//! Penalty weight selection by K-fold cross-validation over network entries.
//!
//! Folds partition the entries the criterion trains on (all off-diagonal
//! pairs, or the mask-certified ones), not the nodes: held-out entries are
//! exactly what the fitted scores are asked to predict. A fold is removed by
//! zeroing its loss weight, which is just the partial-sum criterion again,
//! so no separate solver path exists. Scores on the held-out entries are
//! either mean squared error (default; matches the training loss) or AUC.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eval::{rank_test_set, roc};
use crate::graph::{score_pairs, AdjacencyMatrix, ObservationMask};
use crate::similarity::SimilarityMatrix;
use crate::solver::{solve_directed, solve_undirected, SolverConfig};
use crate::{Error, Result};

/// Held-out scoring rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CvScore {
    /// Mean squared error on held-out entries (lower is better).
    #[default]
    Sse,
    /// AUC of held-out entries against their observed labels (higher is
    /// better).
    Auc,
}

impl std::str::FromStr for CvScore {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sse" => Ok(CvScore::Sse),
            "auc" => Ok(CvScore::Auc),
            other => Err(Error::InvalidInput(format!(
                "unknown cv score {other:?}: expected \"sse\" or \"auc\""
            ))),
        }
    }
}

/// Cross-validation plan: fold count, candidate penalties, scoring rule,
/// shuffle seed.
#[derive(Debug, Clone, PartialEq)]
pub struct CvPlan {
    pub folds: usize,
    /// Candidate penalty weights, ascending.
    pub lambda_grid: Vec<f64>,
    pub score: CvScore,
    pub seed: u64,
}

impl CvPlan {
    pub fn new(lambda_grid: Vec<f64>, seed: u64) -> Self {
        Self {
            folds: 5,
            lambda_grid,
            score: CvScore::Sse,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Domain("need at least 2 folds".into()));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::Domain("empty lambda grid".into()));
        }
        if self.lambda_grid.iter().any(|l| *l < 0.0 || !l.is_finite()) {
            return Err(Error::Domain("lambda grid values must be nonnegative".into()));
        }
        if self.lambda_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("lambda grid must be sorted ascending".into()));
        }
        Ok(())
    }
}

/// The default grid: 10 logarithmically spaced values from 1e-3 n^2 to
/// 1e3 n^2, bracketing the loss/penalty balance of the n^2-normalized
/// criteria.
pub fn default_lambda_grid(n: usize) -> Vec<f64> {
    let scale = (n * n) as f64;
    let lo: f64 = 1e-3;
    let hi: f64 = 1e3;
    let count = 10;
    (0..count)
        .map(|k| scale * lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

/// Per-lambda cross-validation results.
#[derive(Debug, Clone, PartialEq)]
pub struct CvTable {
    pub rows: Vec<CvRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvRow {
    pub lambda: f64,
    /// Score per fold, in fold order.
    pub fold_scores: Vec<f64>,
    pub mean_score: f64,
}

/// Deterministic fold assignment: pairs are shuffled by the seeded
/// generator and dealt round-robin, so folds partition the pairs and differ
/// in size by at most one.
pub fn assign_folds(
    eligible: &[(usize, usize)],
    folds: usize,
    seed: u64,
) -> Vec<Vec<(usize, usize)>> {
    let mut shuffled = eligible.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let mut out = vec![Vec::new(); folds];
    for (idx, pair) in shuffled.into_iter().enumerate() {
        out[idx % folds].push(pair);
    }
    out
}

/// Choose the penalty weight by K-fold cross-validation.
///
/// Eligible entries are those the criterion would train on. Each fold is
/// removed from the loss in turn, the criterion is refit for every grid
/// value, and the held-out entries are scored against the observed matrix.
/// Returns the best lambda (ties broken toward the larger value) and the
/// full score table.
pub fn cross_validate(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    plan: &CvPlan,
    config: &SolverConfig,
) -> Result<(f64, CvTable)> {
    plan.validate()?;
    let n = a.n();
    let eligible: Vec<(usize, usize)> = score_pairs(n, a.directed())
        .into_iter()
        .filter(|&(i, j)| mask.is_none_or(|e| e.get(i, j) == 1))
        .collect();
    if eligible.len() < plan.folds {
        return Err(Error::Domain(format!(
            "{} eligible entries cannot fill {} folds",
            eligible.len(),
            plan.folds
        )));
    }
    let folds = assign_folds(&eligible, plan.folds, plan.seed);

    let mut fold_scores: Vec<Vec<f64>> = vec![Vec::new(); plan.lambda_grid.len()];
    for fold in &folds {
        // train on eligible \ fold by certifying exactly those entries
        let mut train = ObservationMask::zeros(n);
        for &(i, j) in &eligible {
            train.set(i, j, 1);
            if !a.directed() {
                train.set(j, i, 1);
            }
        }
        for &(i, j) in fold {
            train.set(i, j, 0);
            if !a.directed() {
                train.set(j, i, 0);
            }
        }
        for (li, &lambda) in plan.lambda_grid.iter().enumerate() {
            let fit_config = SolverConfig {
                lambda,
                ..*config
            };
            let (scores, _) = if a.directed() {
                solve_directed(a, w, Some(&train), &fit_config)?
            } else {
                solve_undirected(a, w, Some(&train), &fit_config)?
            };
            let value = match plan.score {
                CvScore::Sse => {
                    let sse: f64 = fold
                        .iter()
                        .map(|&(i, j)| {
                            let d = a.get(i, j) as f64 - scores.get(i, j);
                            d * d
                        })
                        .sum();
                    sse / fold.len() as f64
                }
                CvScore::Auc => {
                    // rank only the held-out entries: certify everything else
                    let mut heldout = ObservationMask::ones(n);
                    for &(i, j) in fold {
                        heldout.set(i, j, 0);
                        if !a.directed() {
                            heldout.set(j, i, 0);
                        }
                    }
                    let ranked = rank_test_set(&scores, &heldout)?;
                    let curve = roc(&ranked, a).map_err(|e| {
                        Error::Domain(format!("auc scoring failed on a fold: {e}"))
                    })?;
                    curve.auc()
                }
            };
            fold_scores[li].push(value);
        }
    }

    let rows: Vec<CvRow> = plan
        .lambda_grid
        .iter()
        .zip(fold_scores)
        .map(|(&lambda, scores)| {
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            CvRow {
                lambda,
                fold_scores: scores,
                mean_score: mean,
            }
        })
        .collect();

    // best score; ties go to the larger lambda (the grid is ascending)
    let mut best_idx = 0;
    for (idx, row) in rows.iter().enumerate() {
        let better = match plan.score {
            CvScore::Sse => row.mean_score <= rows[best_idx].mean_score,
            CvScore::Auc => row.mean_score >= rows[best_idx].mean_score,
        };
        if better {
            best_idx = idx;
        }
    }
    Ok((rows[best_idx].lambda, CvTable { rows }))
}

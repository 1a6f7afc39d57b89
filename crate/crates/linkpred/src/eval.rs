//! Test-set ranking and ROC evaluation.
//!
//! The test set is the complement of the observation mask: pairs with
//! E_ij = 0. Scores are ranked descending and, for each cutoff k, the true
//! and false positive rates are the fractions of test positives and test
//! negatives ranked within the top k. The curves depend only on the ranking
//! of the scores, never on their values.

use crate::graph::{AdjacencyMatrix, ObservationMask};
use crate::solver::ScoreMatrix;
use crate::{Error, Result};

/// An ROC curve: (FPR, TPR) per cutoff, plus the area under the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<(f64, f64)>,
    auc: f64,
}

impl RocCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn auc(&self) -> f64 {
        self.auc
    }
}

/// Rank the test-set pairs (entries with E_ij = 0) by score, descending,
/// ties broken by (i,j) lexicographic order. Undirected scores rank each
/// unordered pair once.
pub fn rank_test_set(
    scores: &ScoreMatrix,
    mask: &ObservationMask,
) -> Result<Vec<(usize, usize)>> {
    if mask.n() != scores.n() {
        return Err(Error::DimensionMismatch(format!(
            "mask is {}x{0}, scores are {1}x{1}",
            mask.n(),
            scores.n()
        )));
    }
    let mut test_pairs: Vec<(usize, usize)> = scores
        .pairs()
        .into_iter()
        .filter(|&(i, j)| mask.get(i, j) == 0)
        .collect();
    if test_pairs.is_empty() {
        return Err(Error::Domain(
            "test set is empty: every pair is certified by the mask".into(),
        ));
    }
    test_pairs.sort_by(|&a, &b| {
        scores
            .get(b.0, b.1)
            .partial_cmp(&scores.get(a.0, a.1))
            .unwrap()
            .then_with(|| a.cmp(&b))
    });
    Ok(test_pairs)
}

/// TPR/FPR curve of a ranked pair list against the true network.
///
/// The k-th point gives the rates after taking the top k ranked pairs as
/// predicted positives. Needs at least one true positive and one true
/// negative among the ranked pairs.
pub fn roc(ranked: &[(usize, usize)], truth: &AdjacencyMatrix) -> Result<RocCurve> {
    if ranked.is_empty() {
        return Err(Error::Domain("cannot build an ROC curve from no pairs".into()));
    }
    if let Some(&(i, j)) = ranked.iter().find(|&&(i, j)| i >= truth.n() || j >= truth.n()) {
        return Err(Error::DimensionMismatch(format!(
            "ranked pair ({i},{j}) outside the truth matrix (n={})",
            truth.n()
        )));
    }
    let positives = ranked.iter().filter(|&&(i, j)| truth.get(i, j) == 1).count();
    let negatives = ranked.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Domain(format!(
            "degenerate truth on the test set: {positives} positives, {negatives} negatives"
        )));
    }
    let mut points = Vec::with_capacity(ranked.len());
    let mut tp = 0usize;
    let mut fp = 0usize;
    for &(i, j) in ranked {
        if truth.get(i, j) == 1 {
            tp += 1;
        } else {
            fp += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    let auc = trapezoid_with_origin(&points);
    Ok(RocCurve { points, auc })
}

/// Trapezoidal area of a curve prefixed with (0,0).
fn trapezoid_with_origin(points: &[(f64, f64)]) -> f64 {
    let mut auc = 0.0;
    let mut prev = (0.0, 0.0);
    for &(x, y) in points {
        auc += (x - prev.0) * (y + prev.1) / 2.0;
        prev = (x, y);
    }
    auc
}

/// A regular FPR grid on [0,1] for curve averaging.
pub fn fpr_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect()
}

/// Average curves pointwise on a common FPR grid.
///
/// Each member's TPR is linearly interpolated onto the grid (taking the
/// upper envelope at repeated FPR values) and averaged; the averaged AUC is
/// the mean of the member AUCs, not the area of the interpolated polyline.
pub fn average_curves(curves: &[RocCurve], grid: &[f64]) -> Result<RocCurve> {
    if curves.is_empty() {
        return Err(Error::Domain("no curves to average".into()));
    }
    if grid.len() < 2 {
        return Err(Error::Domain("averaging grid needs at least 2 points".into()));
    }
    let mut mean_tpr = vec![0.0; grid.len()];
    for curve in curves {
        // knots: max TPR per distinct FPR, with endpoints pinned
        let mut knots: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        for &(fpr, tpr) in &curve.points {
            match knots.last_mut() {
                Some(last) if last.0 == fpr => last.1 = last.1.max(tpr),
                _ => knots.push((fpr, tpr)),
            }
        }
        if knots.last().map(|&(f, _)| f) != Some(1.0) {
            knots.push((1.0, 1.0));
        }
        let mut seg = 0usize;
        for (slot, &x) in mean_tpr.iter_mut().zip(grid) {
            while seg + 1 < knots.len() && knots[seg + 1].0 < x {
                seg += 1;
            }
            let (x0, y0) = knots[seg];
            let value = if seg + 1 < knots.len() {
                let (x1, y1) = knots[seg + 1];
                if x1 > x0 {
                    y0 + (y1 - y0) * ((x.clamp(x0, x1) - x0) / (x1 - x0))
                } else {
                    y0.max(y1)
                }
            } else {
                y0
            };
            *slot += value;
        }
    }
    let count = curves.len() as f64;
    let points: Vec<(f64, f64)> = grid
        .iter()
        .zip(&mean_tpr)
        .map(|(&x, &t)| (x, t / count))
        .collect();
    let auc = curves.iter().map(|c| c.auc).sum::<f64>() / count;
    Ok(RocCurve { points, auc })
}

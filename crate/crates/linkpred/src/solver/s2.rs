//! Direct solve of the exact undirected criterion.
//!
//! The free parameters are the n(n-1)/2 unordered pair scores. The penalty
//! weight between pairs (i,j) and (i',j') is the larger endpoint matching
//! `max(W_ii' W_jj', W_ij' W_ji')`, which does not factor, so this path
//! materializes the pair-graph Laplacian: densely when the pair count is
//! small, as compressed sparse rows when the similarity is sparse enough,
//! and refusing (pointing at the BCD method) when neither fits in memory.

use ndarray::Array2;

use crate::graph::{score_pairs, AdjacencyMatrix, ObservationMask};
use crate::similarity::SimilarityMatrix;
use crate::solver::linalg::{pcg_solve, solve_spd_dense, SpdOperator};
use crate::{Error, Result};

/// Max pair weight between unordered pairs (i,j) and (ip,jp).
#[inline]
fn max_weight(w: &SimilarityMatrix, i: usize, j: usize, ip: usize, jp: usize) -> f64 {
    (w.get(i, ip) * w.get(j, jp)).max(w.get(i, jp) * w.get(j, ip))
}

/// Solve the exact undirected criterion. Returns the symmetric score entries
/// and the criterion value at the solution (ridge excluded).
#[allow(clippy::too_many_arguments)]
pub fn solve_exact(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    pair_norm: f64,
    lambda: f64,
    ridge: f64,
    dense_cap: usize,
    sparse_weight_cap: usize,
) -> Result<(Array2<f64>, f64)> {
    let n = a.n();
    let pairs = score_pairs(n, false);
    let m = pairs.len();
    let n4 = (n as f64).powi(4);
    let c_v = n4 / pair_norm;
    let lam2 = 2.0 * lambda;
    let ridge_c = (n * n) as f64 * ridge;

    let v: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| match mask {
            None => 1.0,
            Some(e) => e.get(i, j) as f64,
        })
        .collect();
    let rhs: Vec<f64> = pairs
        .iter()
        .zip(&v)
        .map(|(&(i, j), &vk)| c_v * vk * a.get(i, j) as f64)
        .collect();

    let (flat, penalty_raw) = if m <= dense_cap {
        // Dense pair Laplacian. Weight rows are accumulated into degrees on
        // the fly; the self-weight cancels between degree and coupling.
        let mut omega = Array2::zeros((m, m));
        let mut deg = vec![0.0; m];
        for k in 0..m {
            let (i, j) = pairs[k];
            for kp in k..m {
                let (ip, jp) = pairs[kp];
                let weight = max_weight(w, i, j, ip, jp);
                omega[[k, kp]] = weight;
                omega[[kp, k]] = weight;
                deg[k] += weight;
                if kp != k {
                    deg[kp] += weight;
                }
            }
        }
        let mut mat = &omega * (-lam2);
        for k in 0..m {
            mat[[k, k]] += c_v * v[k] + lam2 * deg[k] + ridge_c;
        }
        let flat = solve_spd_dense(mat, &rhs)?;
        let mut penalty = 0.0;
        for k in 0..m {
            let coupled: f64 = (0..m).map(|kp| omega[[k, kp]] * flat[kp]).sum();
            penalty += flat[k] * (deg[k] * flat[k] - coupled);
        }
        (flat, (2.0 * penalty).max(0.0))
    } else {
        // Sparse path: a pair (i,j) couples only to pairs reachable through
        // nonzero similarity rows of i and j.
        let mut lookup = Array2::from_elem((n, n), usize::MAX);
        for (k, &(i, j)) in pairs.iter().enumerate() {
            lookup[[i, j]] = k;
            lookup[[j, i]] = k;
        }
        let row_nz: Vec<Vec<(usize, f64)>> = (0..n).map(|i| w.row_nonzeros(i)).collect();

        let mut col_indices: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); m];
        let mut deg = vec![0.0; m];
        let mut nnz_total = 0usize;
        let mut candidates: Vec<usize> = Vec::new();
        for k in 0..m {
            let (i, j) = pairs[k];
            candidates.clear();
            for &(ip, _) in &row_nz[i] {
                for &(jp, _) in &row_nz[j] {
                    if ip != jp {
                        candidates.push(lookup[[ip, jp]]);
                    }
                }
            }
            candidates.sort_unstable();
            candidates.dedup();
            for &kp in &candidates {
                let (ip, jp) = pairs[kp];
                let weight = max_weight(w, i, j, ip, jp);
                if weight > 0.0 {
                    col_indices[k].push(kp);
                    values[k].push(weight);
                    deg[k] += weight;
                    nnz_total += 1;
                }
            }
            if nnz_total > sparse_weight_cap {
                return Err(Error::Numerical(format!(
                    "undirected direct solve needs more than {sparse_weight_cap} pair weights; \
                     use the bcd method instead"
                )));
            }
        }

        let op = SparsePairSystem {
            m,
            col_indices: &col_indices,
            values: &values,
            deg: &deg,
            v: &v,
            c_v,
            lam2,
            ridge_c,
        };
        let (flat, _) = pcg_solve(&op, &rhs, None, 1e-12, 50_000)
            .map_err(|e| Error::Numerical(format!("undirected direct solve failed: {e}")))?;
        let mut penalty = 0.0;
        for k in 0..m {
            let coupled: f64 = col_indices[k]
                .iter()
                .zip(&values[k])
                .map(|(&kp, &wv)| wv * flat[kp])
                .sum();
            penalty += flat[k] * (deg[k] * flat[k] - coupled);
        }
        (flat, (2.0 * penalty).max(0.0))
    };

    // objective at the solution
    let mut loss = 0.0;
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let d = a.get(i, j) as f64 - flat[k];
        loss += v[k] * d * d;
    }
    let objective = loss / pair_norm + lambda / n4 * penalty_raw;

    let mut entries = Array2::zeros((n, n));
    for (k, &(i, j)) in pairs.iter().enumerate() {
        entries[[i, j]] = flat[k];
        entries[[j, i]] = flat[k];
    }
    Ok((entries, objective))
}

struct SparsePairSystem<'a> {
    m: usize,
    col_indices: &'a [Vec<usize>],
    values: &'a [Vec<f64>],
    deg: &'a [f64],
    v: &'a [f64],
    c_v: f64,
    lam2: f64,
    ridge_c: f64,
}

impl SpdOperator for SparsePairSystem<'_> {
    fn dim(&self) -> usize {
        self.m
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for k in 0..self.m {
            let coupled: f64 = self.col_indices[k]
                .iter()
                .zip(&self.values[k])
                .map(|(&kp, &w)| w * x[kp])
                .sum();
            y[k] = (self.c_v * self.v[k] + self.lam2 * self.deg[k] + self.ridge_c) * x[k]
                - self.lam2 * coupled;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.m)
            .map(|k| {
                // the self-weight appears in both deg and the coupling row
                let self_weight = self.col_indices[k]
                    .iter()
                    .zip(&self.values[k])
                    .find(|(&kp, _)| kp == k)
                    .map(|(_, &w)| w)
                    .unwrap_or(0.0);
                self.c_v * self.v[k] + self.lam2 * (self.deg[k] - self_weight) + self.ridge_c
            })
            .collect()
    }
}

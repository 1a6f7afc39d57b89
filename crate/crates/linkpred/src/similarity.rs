//! Node similarity matrices.
//!
//! A similarity matrix `W` is symmetric with entries in [0,1] and a unit
//! diagonal. It can be built from node covariates (exponential decay kernel)
//! or from the observed topology (matching fraction or Jaccard index, with
//! directed variants that average the in- and out-halves). Truncation
//! sparsifies `W` for the direct solvers; the entrywise q-th power is the
//! monotone transform used by the undirected block coordinate descent path.

use ndarray::Array2;

use crate::graph::{AdjacencyMatrix, CovariateTable};
use crate::{Error, Result};

/// Fraction of off-diagonal nonzeros at or below which `truncate` switches to
/// sparse storage.
const SPARSE_FRACTION: f64 = 0.20;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Array2<f64>),
    /// Per-row coordinate lists of (column, value), sorted by column,
    /// including the unit diagonal entry.
    Sparse(Vec<Vec<(usize, f64)>>),
}

/// Symmetric node-similarity matrix with entries in [0,1] and unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    storage: Storage,
}

impl SimilarityMatrix {
    /// Build from a dense matrix, validating symmetry, range and diagonal.
    pub fn from_dense(entries: Array2<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "similarity matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..n {
            if (entries[[i, i]] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "similarity diagonal must be 1, got {} at {i}",
                    entries[[i, i]]
                )));
            }
            for j in 0..n {
                let v = entries[[i, j]];
                if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "similarity entry ({i},{j}) = {v} outside [0,1]"
                    )));
                }
                if (v - entries[[j, i]]).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "similarity matrix asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            storage: Storage::Dense(entries),
        })
    }

    /// Identity-like similarity: every node similar only to itself.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, 1.0)]).collect();
        Self {
            n,
            storage: Storage::Sparse(rows),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[[i, j]],
            Storage::Sparse(rows) => rows[i]
                .binary_search_by(|probe| probe.0.cmp(&j))
                .map(|pos| rows[i][pos].1)
                .unwrap_or(0.0),
        }
    }

    /// Materialize as a dense matrix.
    pub fn to_dense(&self) -> Array2<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(rows) => {
                let mut out = Array2::zeros((self.n, self.n));
                for (i, row) in rows.iter().enumerate() {
                    for &(j, v) in row {
                        out[[i, j]] = v;
                    }
                }
                out
            }
        }
    }

    /// Nonzero entries of row `i` as (column, value) pairs in column order.
    pub fn row_nonzeros(&self, i: usize) -> Vec<(usize, f64)> {
        match &self.storage {
            Storage::Dense(m) => (0..self.n)
                .filter_map(|j| {
                    let v = m[[i, j]];
                    (v != 0.0).then_some((j, v))
                })
                .collect(),
            Storage::Sparse(rows) => rows[i].clone(),
        }
    }

    /// Iterate over all nonzero entries (i, j, value).
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.row_nonzeros(i)
                .into_iter()
                .map(move |(j, v)| (i, j, v))
        })
    }

    /// Row sums `s_i = sum_j W_ij`.
    pub fn row_sums(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(m) => (0..self.n).map(|i| m.row(i).sum()).collect(),
            Storage::Sparse(rows) => rows
                .iter()
                .map(|row| row.iter().map(|&(_, v)| v).sum())
                .collect(),
        }
    }

    /// Dense `W * M` for a dense `M`.
    pub fn mul_dense(&self, m: &Array2<f64>) -> Array2<f64> {
        match &self.storage {
            Storage::Dense(w) => w.dot(m),
            Storage::Sparse(rows) => {
                let cols = m.ncols();
                let mut out = Array2::zeros((self.n, cols));
                for (i, row) in rows.iter().enumerate() {
                    for &(k, v) in row {
                        for c in 0..cols {
                            out[[i, c]] += v * m[[k, c]];
                        }
                    }
                }
                out
            }
        }
    }

    /// `W x` for a dense vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(w) => (0..self.n)
                .map(|i| (0..self.n).map(|j| w[[i, j]] * x[j]).sum())
                .collect(),
            Storage::Sparse(rows) => rows
                .iter()
                .map(|row| row.iter().map(|&(j, v)| v * x[j]).sum())
                .collect(),
        }
    }

    /// Dense `M * W` for a dense `M` (W symmetric, so this is `(W M^T)^T`).
    pub fn rmul_dense(&self, m: &Array2<f64>) -> Array2<f64> {
        match &self.storage {
            Storage::Dense(w) => m.dot(w),
            Storage::Sparse(_) => {
                let mt = m.t().to_owned();
                self.mul_dense(&mt).t().to_owned()
            }
        }
    }

    /// Dense `W^2 = W * W` (symmetric).
    pub fn square_dense(&self) -> Array2<f64> {
        let dense = self.to_dense();
        match &self.storage {
            Storage::Dense(w) => w.dot(&dense),
            Storage::Sparse(_) => self.mul_dense(&dense),
        }
    }

    /// Number of nonzero off-diagonal entries.
    pub fn off_diagonal_nonzeros(&self) -> usize {
        self.iter_nonzero().filter(|&(i, j, _)| i != j).count()
    }

    /// Keep entries `>= threshold`, zero the rest. The unit diagonal always
    /// survives. Switches to sparse storage when at most 20% of off-diagonal
    /// entries remain nonzero.
    pub fn truncate(&self, threshold: f64) -> Result<SimilarityMatrix> {
        if !(0.0..=1.0).contains(&threshold) || !threshold.is_finite() {
            return Err(Error::Domain(format!(
                "truncation threshold {threshold} outside [0,1]"
            )));
        }
        let n = self.n;
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut kept_off_diagonal = 0usize;
        for (i, j, v) in self.iter_nonzero() {
            if i == j || v >= threshold {
                rows[i].push((j, v));
                if i != j {
                    kept_off_diagonal += 1;
                }
            }
        }
        let total_off_diagonal = n * n.saturating_sub(1);
        let fraction = if total_off_diagonal == 0 {
            0.0
        } else {
            kept_off_diagonal as f64 / total_off_diagonal as f64
        };
        if fraction <= SPARSE_FRACTION {
            Ok(SimilarityMatrix {
                n,
                storage: Storage::Sparse(rows),
            })
        } else {
            let mut dense = Array2::zeros((n, n));
            for (i, row) in rows.iter().enumerate() {
                for &(j, v) in row {
                    dense[[i, j]] = v;
                }
            }
            Ok(SimilarityMatrix {
                n,
                storage: Storage::Dense(dense),
            })
        }
    }

    /// Entrywise q-th power. A monotone transform of W, so it is itself a
    /// valid similarity measure; symmetry, range and diagonal are preserved.
    pub fn power(&self, q: u32) -> SimilarityMatrix {
        assert!(q >= 1, "power exponent must be >= 1");
        if q == 1 {
            return self.clone();
        }
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.mapv(|v| v.powi(q as i32))),
            Storage::Sparse(rows) => Storage::Sparse(
                rows.iter()
                    .map(|row| row.iter().map(|&(j, v)| (j, v.powi(q as i32))).collect())
                    .collect(),
            ),
        };
        SimilarityMatrix {
            n: self.n,
            storage,
        }
    }
}

/// Exponential decay kernel on covariate rows:
/// `W_ij = exp(-||X_i - X_j||^2 / sigma^2)`.
///
/// `sigma = None` selects the automatic rule: one quarter of the median of
/// all pairwise Euclidean distances (unordered pairs, i < j).
pub fn covariate_kernel(x: &CovariateTable, sigma: Option<f64>) -> Result<SimilarityMatrix> {
    let n = x.n();
    if n < 2 {
        return Err(Error::Domain("covariate kernel needs n >= 2".into()));
    }
    let sigma = match sigma {
        Some(s) => {
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::Domain(format!("sigma={s} must be positive")));
            }
            s
        }
        None => auto_sigma(x)?,
    };
    let sigma_sq = sigma * sigma;
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        entries[[i, i]] = 1.0;
        for j in (i + 1)..n {
            let d = x.distance(i, j);
            let v = (-(d * d) / sigma_sq).exp();
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
    }
    Ok(SimilarityMatrix {
        n,
        storage: Storage::Dense(entries),
    })
}

/// The automatic bandwidth: one quarter of the median pairwise distance.
pub fn auto_sigma(x: &CovariateTable) -> Result<f64> {
    let n = x.n();
    let mut distances = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            distances.push(x.distance(i, j));
        }
    }
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = distances.len();
    let median = if m % 2 == 1 {
        distances[m / 2]
    } else {
        0.5 * (distances[m / 2 - 1] + distances[m / 2])
    };
    if median <= 0.0 {
        return Err(Error::Domain(
            "automatic sigma is zero: all covariate rows identical".into(),
        ));
    }
    Ok(median / 4.0)
}

/// Matching-fraction similarity: the fraction of nodes k on which the
/// connection patterns of i and i' agree.
///
/// Undirected: `|{k: A_ik = A_i'k}| / n`. Directed: the row-match and
/// column-match fractions each contribute half.
pub fn fraction_match(a: &AdjacencyMatrix) -> SimilarityMatrix {
    let n = a.n();
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        entries[[i, i]] = 1.0;
        for j in (i + 1)..n {
            let v = if a.directed() {
                let row_match = (0..n).filter(|&k| a.get(i, k) == a.get(j, k)).count();
                let col_match = (0..n).filter(|&k| a.get(k, i) == a.get(k, j)).count();
                row_match as f64 / (2.0 * n as f64) + col_match as f64 / (2.0 * n as f64)
            } else {
                let matches = (0..n).filter(|&k| a.get(i, k) == a.get(j, k)).count();
                matches as f64 / n as f64
            };
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
    }
    SimilarityMatrix {
        n,
        storage: Storage::Dense(entries),
    }
}

fn jaccard_half(na: &[usize], nb: &[usize]) -> f64 {
    // both sorted ascending
    if na.is_empty() && nb.is_empty() {
        return 0.0;
    }
    let mut inter = 0usize;
    let (mut p, mut q) = (0usize, 0usize);
    while p < na.len() && q < nb.len() {
        match na[p].cmp(&nb[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                p += 1;
                q += 1;
            }
        }
    }
    let union = na.len() + nb.len() - inter;
    inter as f64 / union as f64
}

/// Jaccard similarity of neighborhoods.
///
/// Undirected: `|N(i) ∩ N(i')| / |N(i) ∪ N(i')|`. Directed: the out- and
/// in-neighborhood Jaccard indices each contribute half. A half with two
/// empty neighborhoods contributes 0 for i ≠ i'.
pub fn jaccard(a: &AdjacencyMatrix) -> SimilarityMatrix {
    let n = a.n();
    let out: Vec<Vec<usize>> = (0..n).map(|i| a.out_neighbors(i)).collect();
    let inn: Vec<Vec<usize>> = if a.directed() {
        (0..n).map(|i| a.in_neighbors(i)).collect()
    } else {
        Vec::new()
    };
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        entries[[i, i]] = 1.0;
        for j in (i + 1)..n {
            let v = if a.directed() {
                0.5 * jaccard_half(&out[i], &out[j]) + 0.5 * jaccard_half(&inn[i], &inn[j])
            } else {
                jaccard_half(&out[i], &out[j])
            };
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
    }
    SimilarityMatrix {
        n,
        storage: Storage::Dense(entries),
    }
}

/// Oracle similarity for block-labelled nodes: `W_ij = 1` iff `c_i = c_j`.
pub fn block_indicator(labels: &[usize]) -> SimilarityMatrix {
    let n = labels.len();
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                entries[[i, j]] = 1.0;
            }
        }
    }
    SimilarityMatrix {
        n,
        storage: Storage::Dense(entries),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn check_invariants(w: &SimilarityMatrix) {
        let n = w.n();
        for i in 0..n {
            assert_abs_diff_eq!(w.get(i, i), 1.0, epsilon = 1e-12);
            for j in 0..n {
                let v = w.get(i, j);
                assert!((0.0..=1.0 + 1e-12).contains(&v), "entry ({i},{j}) = {v}");
                assert_abs_diff_eq!(v, w.get(j, i), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kernel_zero_distance_is_one() {
        let x = CovariateTable::new(array![[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]).unwrap();
        let w = covariate_kernel(&x, Some(1.0)).unwrap();
        assert_abs_diff_eq!(w.get(0, 1), 1.0, epsilon = 1e-15);
        check_invariants(&w);
    }

    #[test]
    fn kernel_at_sigma_distance() {
        let x = CovariateTable::new(array![[0.0], [2.5]]).unwrap();
        let w = covariate_kernel(&x, Some(2.5)).unwrap();
        assert_abs_diff_eq!(w.get(0, 1), (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn kernel_auto_sigma_rule() {
        // rows 0, 3, 4 in 1-D: distances {3, 4, 1}, median 3, sigma 0.75
        let x = CovariateTable::new(array![[0.0], [3.0], [4.0]]).unwrap();
        assert_abs_diff_eq!(auto_sigma(&x).unwrap(), 0.75, epsilon = 1e-15);
        let w = covariate_kernel(&x, None).unwrap();
        // exp(-(3/0.75)^2) = exp(-16)
        assert_abs_diff_eq!(w.get(0, 1), (-16.0f64).exp(), epsilon = 1e-18);
    }

    #[test]
    fn kernel_rejects_degenerate_input() {
        let x = CovariateTable::new(array![[1.0], [1.0]]).unwrap();
        assert!(covariate_kernel(&x, None).is_err());
        assert!(covariate_kernel(&x, Some(0.0)).is_err());
        assert!(covariate_kernel(&x, Some(-1.0)).is_err());
    }

    #[test]
    fn fraction_match_counts_agreements() {
        // rows of i=0 and i'=1 differ in exactly 1 of 4 positions
        let mut a = AdjacencyMatrix::empty(4, true);
        a.set(0, 2, 1).unwrap();
        a.set(1, 2, 1).unwrap();
        a.set(0, 3, 1).unwrap();
        // rows: 0 -> [0,0,1,1], 1 -> [0,0,1,0]: differ only at column 3
        let row_match = (0..4)
            .filter(|&k| a.get(0, k) == a.get(1, k))
            .count();
        assert_eq!(row_match, 3);
        // undirected check with the same row pattern
        let mut u = AdjacencyMatrix::empty(4, false);
        u.set(0, 2, 1).unwrap();
        u.set(1, 2, 1).unwrap();
        u.set(0, 3, 1).unwrap();
        // rows: 0 -> [0,0,1,1], 1 -> [0,0,1,0] differ at one position
        let w = fraction_match(&u);
        assert_abs_diff_eq!(w.get(0, 1), 0.75, epsilon = 1e-15);
        check_invariants(&w);
    }

    #[test]
    fn fraction_match_empty_graph_is_all_ones() {
        let a = AdjacencyMatrix::empty(5, false);
        let w = fraction_match(&a);
        for i in 0..5 {
            for j in 0..5 {
                assert_abs_diff_eq!(w.get(i, j), 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn jaccard_examples() {
        // N(0) = {2,3,4}, N(1) = {3,4,5} -> 2/4
        let mut a = AdjacencyMatrix::empty(6, true);
        for k in [2, 3, 4] {
            a.set(0, k, 1).unwrap();
        }
        for k in [3, 4, 5] {
            a.set(1, k, 1).unwrap();
        }
        let w = jaccard(&a);
        // only the out-half is nonzero; in-neighborhoods of 0 and 1 are empty
        assert_abs_diff_eq!(w.get(0, 1), 0.5 * (2.0 / 4.0), epsilon = 1e-15);

        let mut u = AdjacencyMatrix::empty(6, false);
        for k in [2, 3, 4] {
            u.set(0, k, 1).unwrap();
        }
        for k in [3, 4, 5] {
            u.set(1, k, 1).unwrap();
        }
        let wu = jaccard(&u);
        // undirected neighborhoods pick up the mirror edges too:
        // N(0) = {2,3,4}, N(1) = {3,4,5} -> 2/4
        assert_abs_diff_eq!(wu.get(0, 1), 0.5, epsilon = 1e-15);
        check_invariants(&wu);
    }

    #[test]
    fn jaccard_identical_and_disjoint() {
        let mut u = AdjacencyMatrix::empty(6, false);
        u.set(0, 2, 1).unwrap();
        u.set(0, 3, 1).unwrap();
        u.set(1, 2, 1).unwrap();
        u.set(1, 3, 1).unwrap();
        u.set(4, 5, 1).unwrap();
        let w = jaccard(&u);
        assert_abs_diff_eq!(w.get(0, 1), 1.0, epsilon = 1e-15); // identical
        // N(0) = {2,3}, N(4) = {5}: disjoint
        assert_abs_diff_eq!(w.get(0, 4), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn jaccard_empty_neighborhoods_score_zero() {
        let a = AdjacencyMatrix::empty(3, false);
        let w = jaccard(&a);
        assert_eq!(w.get(0, 1), 0.0);
        assert_eq!(w.get(0, 0), 1.0);
    }

    #[test]
    fn jaccard_matches_set_oracle_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = 2 + rng.random_range(0..5usize);
            let directed = rng.random::<bool>();
            let mut a = AdjacencyMatrix::empty(n, directed);
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random::<f64>() < 0.4 {
                        a.set(i, j, 1).unwrap();
                    }
                }
            }
            let w = jaccard(&a);
            for i in 0..n {
                for j in 0..n {
                    let expected = if i == j {
                        1.0
                    } else if directed {
                        let half = |x: BTreeSet<usize>, y: BTreeSet<usize>| {
                            let union = x.union(&y).count();
                            if union == 0 {
                                0.0
                            } else {
                                x.intersection(&y).count() as f64 / union as f64
                            }
                        };
                        let o_i: BTreeSet<_> = a.out_neighbors(i).into_iter().collect();
                        let o_j: BTreeSet<_> = a.out_neighbors(j).into_iter().collect();
                        let i_i: BTreeSet<_> = a.in_neighbors(i).into_iter().collect();
                        let i_j: BTreeSet<_> = a.in_neighbors(j).into_iter().collect();
                        0.5 * half(o_i, o_j) + 0.5 * half(i_i, i_j)
                    } else {
                        let x: BTreeSet<_> = a.out_neighbors(i).into_iter().collect();
                        let y: BTreeSet<_> = a.out_neighbors(j).into_iter().collect();
                        let union = x.union(&y).count();
                        if union == 0 {
                            0.0
                        } else {
                            x.intersection(&y).count() as f64 / union as f64
                        }
                    };
                    assert_abs_diff_eq!(w.get(i, j), expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn directed_halves_stay_within_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = 3 + rng.random_range(0..4usize);
            let mut a = AdjacencyMatrix::empty(n, true);
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random::<f64>() < 0.5 {
                        a.set(i, j, 1).unwrap();
                    }
                }
            }
            for w in [jaccard(&a), fraction_match(&a)] {
                check_invariants(&w);
            }
        }
    }

    #[test]
    fn truncate_boundaries() {
        let x = CovariateTable::new(array![[0.0], [1.0], [2.0], [10.0]]).unwrap();
        let w = covariate_kernel(&x, Some(1.5)).unwrap();
        let unchanged = w.truncate(0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(unchanged.get(i, j), w.get(i, j));
            }
        }
        let only_ones = w.truncate(1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if w.get(i, j) >= 1.0 { w.get(i, j) } else { 0.0 };
                assert_eq!(only_ones.get(i, j), expected);
            }
        }
        assert!(w.truncate(1.5).is_err());
        assert!(w.truncate(-0.1).is_err());
    }

    #[test]
    fn truncate_keeps_threshold_entries() {
        let mut entries = Array2::from_elem((3, 3), 0.05);
        for i in 0..3 {
            entries[[i, i]] = 1.0;
        }
        entries[[0, 1]] = 0.1;
        entries[[1, 0]] = 0.1;
        entries[[0, 2]] = 0.5;
        entries[[2, 0]] = 0.5;
        let w = SimilarityMatrix::from_dense(entries).unwrap();
        let t = w.truncate(0.1).unwrap();
        assert_eq!(t.get(0, 1), 0.1); // kept: >= threshold
        assert_eq!(t.get(0, 2), 0.5);
        assert_eq!(t.get(1, 2), 0.0); // 0.05 dropped
    }

    #[test]
    fn truncate_activates_sparse_storage() {
        // 4 nodes, one strong off-diagonal pair: 2/12 < 20% after truncation
        let mut entries = Array2::from_elem((4, 4), 0.01);
        for i in 0..4 {
            entries[[i, i]] = 1.0;
        }
        entries[[0, 1]] = 0.9;
        entries[[1, 0]] = 0.9;
        let w = SimilarityMatrix::from_dense(entries).unwrap();
        assert!(!w.is_sparse());
        let t = w.truncate(0.5).unwrap();
        assert!(t.is_sparse());
        assert_eq!(t.get(0, 1), 0.9);
        assert_eq!(t.get(2, 3), 0.0);
        assert_eq!(t.get(2, 2), 1.0);
    }

    #[test]
    fn power_examples() {
        let mut entries = Array2::from_elem((2, 2), 0.5);
        entries[[0, 0]] = 1.0;
        entries[[1, 1]] = 1.0;
        let w = SimilarityMatrix::from_dense(entries).unwrap();
        let p = w.power(10);
        assert_abs_diff_eq!(p.get(0, 1), 0.0009765625, epsilon = 1e-18);
        assert_eq!(p.get(0, 0), 1.0);
        let id = w.power(1);
        assert_eq!(id.get(0, 1), 0.5);
    }

    proptest! {
        #[test]
        fn power_preserves_entry_ranking(values in proptest::collection::vec(0.0f64..=1.0, 6), q in 1u32..8) {
            // build a 4x4 symmetric matrix from 6 off-diagonal values
            let mut entries = Array2::zeros((4, 4));
            for i in 0..4 {
                entries[[i, i]] = 1.0;
            }
            let mut it = values.iter();
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let v = *it.next().unwrap();
                    entries[[i, j]] = v;
                    entries[[j, i]] = v;
                }
            }
            let w = SimilarityMatrix::from_dense(entries).unwrap();
            let p = w.power(q);
            let mut base: Vec<f64> = Vec::new();
            let mut powered: Vec<f64> = Vec::new();
            for i in 0..4 {
                for j in (i + 1)..4 {
                    base.push(w.get(i, j));
                    powered.push(p.get(i, j));
                }
            }
            let mut order_base: Vec<usize> = (0..base.len()).collect();
            order_base.sort_by(|&a, &b| base[a].partial_cmp(&base[b]).unwrap());
            let mut order_pow: Vec<usize> = (0..powered.len()).collect();
            order_pow.sort_by(|&a, &b| powered[a].partial_cmp(&powered[b]).unwrap());
            // strictly increasing transform on [0,1]: argsort must agree up to ties
            for (a, b) in order_base.iter().zip(order_pow.iter()) {
                prop_assert!(base[*a] == base[*b] || a == b);
            }
        }

        #[test]
        fn builders_satisfy_invariants(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 2 + (seed as usize % 5);
            let directed = seed % 2 == 0;
            let mut a = AdjacencyMatrix::empty(n, directed);
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random::<f64>() < 0.3 {
                        a.set(i, j, 1).unwrap();
                    }
                }
            }
            for w in [jaccard(&a), fraction_match(&a)] {
                check_invariants(&w);
            }
        }
    }
}

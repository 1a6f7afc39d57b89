//! Penalized least-squares criteria for link ranking, and their solvers.
//!
//! Four criteria are covered: directed or undirected networks, each with a
//! full-sum loss (every off-diagonal entry of the observed matrix is a noisy
//! label) or a partial-sum loss (only entries certified by an observation
//! mask enter the loss). The penalty ties together the scores of node pairs
//! whose endpoints are similar: for directed networks the weight on pairs
//! (i,j) and (i',j') is the product `W_ii' * W_jj'`; undirected networks use
//! the larger of the two endpoint matchings,
//! `max(W_ii' * W_jj', W_ij' * W_ji')`.
//!
//! Two solution paths are provided. `Direct` assembles the normal equations
//! over the free scores and solves them: dense Cholesky when small
//! enough, otherwise by preconditioned conjugate gradients (matrix-free for
//! directed criteria, sparse for the undirected pair system). `Bcd` runs
//! Gauss–Seidel block coordinate descent over score rows; for undirected
//! networks the max-weight is approximated by an entrywise q-th power of the
//! similarity, which restores the product structure the row update needs,
//! and iterates are symmetrized after each sweep.
//!
//! Diagonal entries carry no score: every sum excludes i = j, and solutions
//! report the diagonal as zero. A tiny ridge (default 1e-10) keeps the
//! systems positive definite even when masked entries are otherwise
//! unconstrained; it perturbs scores far below ranking resolution.

mod linalg;
mod s2;
mod system;

use ndarray::Array2;

use crate::graph::{score_pairs, AdjacencyMatrix, ObservationMask};
use crate::similarity::SimilarityMatrix;
use crate::{Error, Result};

pub use linalg::{pcg_solve, solve_spd_dense, SpdOperator};

pub(crate) const DEFAULT_RIDGE: f64 = 1e-10;
/// Largest free-parameter count for which the direct path materializes a
/// dense system matrix.
const DENSE_SYSTEM_CAP: usize = 2500;
/// Refusal bound on materialized pair-penalty weights for the undirected
/// direct path.
const SPARSE_WEIGHT_CAP: usize = 10_000_000;

/// Real-valued estimates of observed-edge probabilities. Symmetric when
/// undirected; the diagonal is not a parameter and always reads 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n: usize,
    directed: bool,
    entries: Array2<f64>,
}

impl ScoreMatrix {
    pub fn zeros(n: usize, directed: bool) -> Self {
        Self {
            n,
            directed,
            entries: Array2::zeros((n, n)),
        }
    }

    /// Scores initialized to the observed adjacency matrix.
    pub fn from_adjacency(a: &AdjacencyMatrix) -> Self {
        Self {
            n: a.n(),
            directed: a.directed(),
            entries: a.to_f64(),
        }
    }

    pub(crate) fn from_entries(entries: Array2<f64>, directed: bool) -> Self {
        let n = entries.nrows();
        debug_assert_eq!(n, entries.ncols());
        debug_assert!((0..n).all(|i| entries[[i, i]] == 0.0));
        Self {
            n,
            directed,
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    /// Set a score; mirrored when undirected. The diagonal is not settable.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "diagonal scores do not exist");
        self.entries[[i, j]] = value;
        if !self.directed {
            self.entries[[j, i]] = value;
        }
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// The pairs carrying free scores, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        score_pairs(self.n, self.directed)
    }
}

/// Solution method for the quadratic criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Assemble and solve the normal equations.
    #[default]
    Direct,
    /// Gauss–Seidel block coordinate descent over score rows.
    Bcd,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "bcd" => Ok(Method::Bcd),
            other => Err(Error::InvalidInput(format!(
                "unknown method {other:?}: expected \"direct\" or \"bcd\""
            ))),
        }
    }
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Penalty weight.
    pub lambda: f64,
    /// Exponent of the similarity power transform used by the undirected
    /// BCD path to approximate the max pair weight by a product.
    pub q: u32,
    pub method: Method,
    /// BCD stops when the largest absolute score change in a sweep drops
    /// below this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Ridge added as `ridge * ||f||^2 / n^2` for well-posedness.
    pub ridge: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            q: 10,
            method: Method::Direct,
            tol: 1e-6,
            max_sweeps: 500,
            ridge: DEFAULT_RIDGE,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda={} must be nonnegative",
                self.lambda
            )));
        }
        if self.tol <= 0.0 {
            return Err(Error::Domain("tol must be positive".into()));
        }
        if self.max_sweeps < 1 {
            return Err(Error::Domain("max_sweeps must be at least 1".into()));
        }
        if self.q < 1 {
            return Err(Error::Domain("q must be at least 1".into()));
        }
        if self.ridge < 0.0 {
            return Err(Error::Domain("ridge must be nonnegative".into()));
        }
        Ok(())
    }
}

/// What a solve did and how good the result is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    /// BCD sweeps performed (0 for the direct path).
    pub sweeps_used: usize,
    /// Largest absolute score change in the final sweep (0 for direct).
    pub final_change: f64,
    /// Criterion value at the solution (ridge excluded). The undirected BCD
    /// path reports the q-power criterion it minimizes; all other paths
    /// report the exact criterion.
    pub objective: f64,
    pub converged: bool,
}

/// Pair-similarity combination rule for undirected criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSimilarity {
    /// Sum of the two endpoint matchings: `W_ii' W_jj' + W_ij' W_ji'`.
    Sum,
    /// Larger of the two endpoint matchings (the criterion default).
    Max,
}

/// Similarity between unordered node pairs (i,j) and (i',j').
///
/// Both matchings of endpoints are considered; `Sum` adds them, `Max` takes
/// the larger. `Max` is what the undirected criteria use: with a
/// block-indicator similarity it is 1 exactly when the pairs connect the
/// same blocks, while the sum can double-count.
pub fn pair_similarity_undirected(
    w: &SimilarityMatrix,
    i: usize,
    j: usize,
    ip: usize,
    jp: usize,
    variant: PairSimilarity,
) -> Result<f64> {
    if i == j || ip == jp {
        return Err(Error::Domain(format!(
            "pair similarity needs distinct endpoints, got ({i},{j}) and ({ip},{jp})"
        )));
    }
    let first = w.get(i, ip) * w.get(j, jp);
    let second = w.get(i, jp) * w.get(j, ip);
    Ok(match variant {
        PairSimilarity::Sum => first + second,
        PairSimilarity::Max => first.max(second),
    })
}

/// Error of approximating `max(x,y)^q` by `x^q + y^q`, i.e.
/// `(x^q + y^q) - max(x,y)^q = min(x,y)^q`. For x, y in [0,1] this vanishes
/// as q grows, which is why powering the similarity turns the undirected max
/// weight into a sum of products.
pub fn max_power_approx_error(x: f64, y: f64, q: u32) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
    debug_assert!(q >= 1);
    let q = q as i32;
    (x.powi(q) + y.powi(q)) - x.max(y).powi(q)
}

fn check_dims(n: usize, w: &SimilarityMatrix, mask: Option<&ObservationMask>) -> Result<()> {
    if w.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "similarity is {}x{0}, network is {n}x{n}",
            w.n()
        )));
    }
    if let Some(m) = mask {
        if m.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "mask is {}x{0}, network is {n}x{n}",
                m.n()
            )));
        }
    }
    Ok(())
}

/// Loss weights and normalizer for the directed criteria: all off-diagonal
/// ones (normalizer n^2) or the mask entries (normalizer sum of E).
fn directed_weights(
    n: usize,
    mask: Option<&ObservationMask>,
) -> Result<(Array2<f64>, f64)> {
    match mask {
        None => {
            let mut v = Array2::ones((n, n));
            for i in 0..n {
                v[[i, i]] = 0.0;
            }
            Ok((v, (n * n) as f64))
        }
        Some(e) => {
            let mut v = Array2::zeros((n, n));
            let mut total = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j && e.get(i, j) == 1 {
                        v[[i, j]] = 1.0;
                        total += 1.0;
                    }
                }
            }
            if total == 0.0 {
                return Err(Error::Domain(
                    "partial-sum criterion needs at least one certified entry".into(),
                ));
            }
            Ok((v, total))
        }
    }
}

/// The directed criterion value: squared-error loss over off-diagonal
/// entries (all of them, or those certified by the mask) plus the
/// product-weighted smoothing penalty scaled by `lambda / n^4`.
pub fn objective_directed(
    f: &ScoreMatrix,
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    lambda: f64,
) -> Result<f64> {
    let n = a.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "scores are {}x{0}, network is {n}x{n}",
            f.n()
        )));
    }
    check_dims(n, w, mask)?;
    let (v, norm) = directed_weights(n, mask)?;
    let sys = system::QuadraticSystem::new(a.to_f64(), v, w.clone(), norm, lambda, 0.0);
    Ok(sys.objective(f.entries()))
}

/// Analytic gradient of [`objective_directed`] with respect to the
/// off-diagonal scores (ridge excluded). Diagonal entries are zero.
pub fn gradient_directed(
    f: &ScoreMatrix,
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    lambda: f64,
) -> Result<Array2<f64>> {
    let n = a.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "scores are {}x{0}, network is {n}x{n}",
            f.n()
        )));
    }
    check_dims(n, w, mask)?;
    let (v, norm) = directed_weights(n, mask)?;
    let sys = system::QuadraticSystem::new(a.to_f64(), v, w.clone(), norm, lambda, 0.0);
    Ok(sys.gradient(f.entries()))
}

/// One Gauss–Seidel pass of block coordinate descent over score rows, in
/// ascending row order, each row solved exactly with updated rows used
/// immediately. Uses the default ridge.
pub fn bcd_sweep_directed(
    f: &ScoreMatrix,
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    lambda: f64,
) -> Result<ScoreMatrix> {
    let n = a.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "scores are {}x{0}, network is {n}x{n}",
            f.n()
        )));
    }
    check_dims(n, w, mask)?;
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda={lambda} must be nonnegative")));
    }
    let (v, norm) = directed_weights(n, mask)?;
    let sys = system::QuadraticSystem::new(a.to_f64(), v, w.clone(), norm, lambda, DEFAULT_RIDGE);
    let mut entries = f.entries().clone();
    let mut g = sys.right_product(&entries);
    sys.bcd_sweep(&mut entries, &mut g, 1e-7)?;
    Ok(ScoreMatrix::from_entries(entries, f.directed()))
}

/// Minimize a directed criterion. `mask` present selects the partial-sum
/// loss. Returns the scores and a report; BCD non-convergence is reported,
/// not an error.
pub fn solve_directed(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    config: &SolverConfig,
) -> Result<(ScoreMatrix, SolveReport)> {
    if !a.directed() {
        return Err(Error::Domain(
            "solve_directed expects a directed network; use solve_undirected".into(),
        ));
    }
    config.validate()?;
    let n = a.n();
    check_dims(n, w, mask)?;
    let (v, norm) = directed_weights(n, mask)?;
    let sys = system::QuadraticSystem::new(a.to_f64(), v, w.clone(), norm, config.lambda, config.ridge);

    let (entries, report) = match config.method {
        Method::Direct => {
            let pairs = score_pairs(n, true);
            let entries = direct_solve(&sys, &pairs, n, true)?;
            let objective = sys.objective(&entries);
            (
                entries,
                SolveReport {
                    sweeps_used: 0,
                    final_change: 0.0,
                    objective,
                    converged: true,
                },
            )
        }
        Method::Bcd => bcd_solve(&sys, a.to_f64(), config, false)?,
    };
    Ok((ScoreMatrix::from_entries(entries, true), report))
}

/// Minimize an undirected criterion.
///
/// `Direct` minimizes the exact max-weight criterion over the n(n-1)/2
/// unordered pairs. `Bcd` minimizes the q-power approximation: the directed
/// row update runs on the entrywise q-th power of the similarity and the
/// iterate is symmetrized after each sweep.
pub fn solve_undirected(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    config: &SolverConfig,
) -> Result<(ScoreMatrix, SolveReport)> {
    if a.directed() {
        return Err(Error::Domain(
            "solve_undirected expects an undirected network; use solve_directed".into(),
        ));
    }
    config.validate()?;
    let n = a.n();
    check_dims(n, w, mask)?;
    if let Some(e) = mask {
        if !e.is_symmetric() {
            return Err(Error::Domain(
                "undirected criteria need a symmetric observation mask".into(),
            ));
        }
    }
    // Loss normalizer over unordered pairs: n^2 for the full sum, the number
    // of certified i < j entries for the partial sum.
    let pair_norm = match mask {
        None => (n * n) as f64,
        Some(e) => {
            let mut total = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if e.get(i, j) == 1 {
                        total += 1.0;
                    }
                }
            }
            if total == 0.0 {
                return Err(Error::Domain(
                    "partial-sum criterion needs at least one certified entry".into(),
                ));
            }
            total
        }
    };

    match config.method {
        Method::Direct => {
            let (entries, objective) = s2::solve_exact(
                a,
                w,
                mask,
                pair_norm,
                config.lambda,
                config.ridge,
                DENSE_SYSTEM_CAP,
                SPARSE_WEIGHT_CAP,
            )?;
            let report = SolveReport {
                sweeps_used: 0,
                final_change: 0.0,
                objective,
                converged: true,
            };
            Ok((ScoreMatrix::from_entries(entries, false), report))
        }
        Method::Bcd => {
            let sys = qpower_system(a, w, mask, config)?;
            let (entries, mut report) = bcd_solve(&sys, a.to_f64(), config, true)?;
            report.objective = objective_undirected_qpower_entries(
                &entries,
                a,
                w,
                mask,
                config.lambda,
                config.q,
                pair_norm,
            );
            Ok((ScoreMatrix::from_entries(entries, false), report))
        }
    }
}

/// The q-power criterion restructures into the directed product form on W^q
/// over ordered pairs. The full-sum case keeps the directed normalizer (the
/// restructured objective is twice the pair criterion, same minimizer); the
/// partial sum halves the penalty weight to match its pair normalizer
/// exactly.
fn qpower_system(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    config: &SolverConfig,
) -> Result<system::QuadraticSystem> {
    let n = a.n();
    let (v, norm, lambda_eff) = match mask {
        None => {
            let (v, norm) = directed_weights(n, None)?;
            (v, norm, config.lambda)
        }
        Some(_) => {
            let (v, norm) = directed_weights(n, mask)?;
            (v, norm, config.lambda / 2.0)
        }
    };
    let wq = w.power(config.q);
    Ok(system::QuadraticSystem::new(
        a.to_f64(),
        v,
        wq,
        norm,
        lambda_eff,
        config.ridge,
    ))
}

/// Direct (normal-equations) solve of the q-power criterion: the same
/// quadratic the undirected BCD path iterates on, solved outright. Useful as
/// an oracle for the BCD path and as a fast route when the powered
/// similarity is sparse.
pub fn solve_undirected_qpower_direct(
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    config: &SolverConfig,
) -> Result<(ScoreMatrix, SolveReport)> {
    if a.directed() {
        return Err(Error::Domain(
            "solve_undirected_qpower_direct expects an undirected network".into(),
        ));
    }
    config.validate()?;
    let n = a.n();
    check_dims(n, w, mask)?;
    if let Some(e) = mask {
        if !e.is_symmetric() {
            return Err(Error::Domain(
                "undirected criteria need a symmetric observation mask".into(),
            ));
        }
    }
    let pair_norm = match mask {
        None => (n * n) as f64,
        Some(e) => {
            let mut total = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if e.get(i, j) == 1 {
                        total += 1.0;
                    }
                }
            }
            if total == 0.0 {
                return Err(Error::Domain(
                    "partial-sum criterion needs at least one certified entry".into(),
                ));
            }
            total
        }
    };
    let sys = qpower_system(a, w, mask, config)?;
    let pairs = score_pairs(n, true);
    let mut entries = direct_solve(&sys, &pairs, n, true)?;
    // the unique minimizer is symmetric; average out solver roundoff
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (entries[[i, j]] + entries[[j, i]]);
            entries[[i, j]] = avg;
            entries[[j, i]] = avg;
        }
    }
    let objective = objective_undirected_qpower_entries(
        &entries,
        a,
        w,
        mask,
        config.lambda,
        config.q,
        pair_norm,
    );
    let report = SolveReport {
        sweeps_used: 0,
        final_change: 0.0,
        objective,
        converged: true,
    };
    Ok((ScoreMatrix::from_entries(entries, false), report))
}

/// The exact undirected criterion value: loss over i < j entries plus the
/// max-weight penalty. Cost is quadratic in the number of pairs.
pub fn objective_undirected(
    f: &ScoreMatrix,
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    lambda: f64,
) -> Result<f64> {
    let n = a.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "scores are {}x{0}, network is {n}x{n}",
            f.n()
        )));
    }
    check_dims(n, w, mask)?;
    let pairs = score_pairs(n, false);
    let mut loss = 0.0;
    let mut norm = 0.0;
    for &(i, j) in &pairs {
        let weight = match mask {
            None => 1.0,
            Some(e) => e.get(i, j) as f64,
        };
        norm += weight;
        let d = a.get(i, j) as f64 - f.get(i, j);
        loss += weight * d * d;
    }
    let norm = match mask {
        None => (n * n) as f64,
        Some(_) => {
            if norm == 0.0 {
                return Err(Error::Domain(
                    "partial-sum criterion needs at least one certified entry".into(),
                ));
            }
            norm
        }
    };
    let mut penalty = 0.0;
    for &(i, j) in &pairs {
        for &(ip, jp) in &pairs {
            let s2 = (w.get(i, ip) * w.get(j, jp)).max(w.get(i, jp) * w.get(j, ip));
            if s2 > 0.0 {
                let d = f.get(i, j) - f.get(ip, jp);
                penalty += s2 * d * d;
            }
        }
    }
    let n4 = (n as f64).powi(4);
    Ok(loss / norm + lambda / n4 * penalty)
}

/// The q-power approximation of the undirected criterion: the same loss, but
/// penalty weights `(W_ii' W_jj')^q + (W_ij' W_ji')^q` instead of the max.
/// This is what the undirected BCD path minimizes.
pub fn objective_undirected_qpower(
    f: &ScoreMatrix,
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    lambda: f64,
    q: u32,
) -> Result<f64> {
    let n = a.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "scores are {}x{0}, network is {n}x{n}",
            f.n()
        )));
    }
    check_dims(n, w, mask)?;
    let pair_norm = match mask {
        None => (n * n) as f64,
        Some(e) => {
            let mut total = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if e.get(i, j) == 1 {
                        total += 1.0;
                    }
                }
            }
            if total == 0.0 {
                return Err(Error::Domain(
                    "partial-sum criterion needs at least one certified entry".into(),
                ));
            }
            total
        }
    };
    Ok(objective_undirected_qpower_entries(
        f.entries(),
        a,
        w,
        mask,
        lambda,
        q,
        pair_norm,
    ))
}

/// Shared evaluation of the q-power criterion on raw symmetric entries.
fn objective_undirected_qpower_entries(
    entries: &Array2<f64>,
    a: &AdjacencyMatrix,
    w: &SimilarityMatrix,
    mask: Option<&ObservationMask>,
    lambda: f64,
    q: u32,
    pair_norm: f64,
) -> f64 {
    let n = a.n();
    let mut loss = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let weight = match mask {
                None => 1.0,
                Some(e) => e.get(i, j) as f64,
            };
            let d = a.get(i, j) as f64 - entries[[i, j]];
            loss += weight * d * d;
        }
    }
    // Over ordered pairs the q-power penalty is half the product-form
    // penalty on W^q, evaluated via the quadratic-form identity.
    let wq = w.power(q);
    let sys = system::QuadraticSystem::new(
        Array2::zeros((n, n)),
        Array2::zeros((n, n)),
        wq,
        1.0,
        0.0,
        0.0,
    );
    let penalty_raw = sys.penalty_quadratic(entries);
    let n4 = (n as f64).powi(4);
    loss / pair_norm + lambda / (2.0 * n4) * penalty_raw
}

/// Direct solve of a directed-form system over the given pairs: dense
/// Cholesky when small, matrix-free preconditioned CG otherwise.
fn direct_solve(
    sys: &system::QuadraticSystem,
    pairs: &[(usize, usize)],
    n: usize,
    directed: bool,
) -> Result<Array2<f64>> {
    let m = pairs.len();
    let flat = if m <= DENSE_SYSTEM_CAP {
        let (mat, rhs) = sys.materialize(pairs);
        solve_spd_dense(mat, &rhs)?
    } else {
        let op = sys.operator(pairs, directed);
        let rhs = sys.rhs_flat(pairs);
        let (x, _iters) = pcg_solve(&op, &rhs, None, 1e-12, 50_000).map_err(|e| {
            Error::Numerical(format!("direct solve failed: {e}"))
        })?;
        x
    };
    let mut entries = Array2::zeros((n, n));
    for (k, &(i, j)) in pairs.iter().enumerate() {
        entries[[i, j]] = flat[k];
        if !directed {
            entries[[j, i]] = flat[k];
        }
    }
    Ok(entries)
}

/// BCD iteration driver shared by the directed and undirected paths.
fn bcd_solve(
    sys: &system::QuadraticSystem,
    init: Array2<f64>,
    config: &SolverConfig,
    symmetrize: bool,
) -> Result<(Array2<f64>, SolveReport)> {
    let mut f = init;
    let mut g = sys.right_product(&f);
    let mut prev = f.clone();
    let mut sweeps_used = 0;
    let mut final_change = f64::INFINITY;
    let mut converged = false;
    for _ in 0..config.max_sweeps {
        sys.bcd_sweep(&mut f, &mut g, config.tol / 10.0)?;
        if symmetrize {
            // The criterion is invariant under transposition, so averaging
            // with the transpose never increases it.
            for i in 0..f.nrows() {
                for j in 0..i {
                    let avg = 0.5 * (f[[i, j]] + f[[j, i]]);
                    f[[i, j]] = avg;
                    f[[j, i]] = avg;
                }
            }
            g = sys.right_product(&f);
        }
        sweeps_used += 1;
        final_change = f
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if final_change < config.tol {
            converged = true;
            break;
        }
        prev.assign(&f);
    }
    let objective = sys.objective(&f);
    Ok((
        f,
        SolveReport {
            sweeps_used,
            final_change,
            objective,
            converged,
        },
    ))
}

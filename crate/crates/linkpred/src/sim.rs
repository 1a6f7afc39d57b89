//! Synthetic network generation and the observation process.
//!
//! Eight covariate-driven families plus a stochastic block model. Covariates
//! are standard normal vectors; edge probabilities come from a logistic link
//! on a family-specific score of the endpoint covariates. The primed
//! families subtract a constant inside the link, which sparsifies the
//! network without changing its structure. Families `a`, `a'`, `b`, `b'`
//! score asymmetrically and give directed networks; the rest are symmetric
//! and undirected.
//!
//! The observation process either flips entries independently (a true edge
//! survives with probability alpha, an absent edge stays absent with
//! probability beta) or, in masked mode, certifies entries with probability
//! alpha and hides the rest, returning the certification mask so callers can
//! split train/test.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error_model::ErrorModel;
use crate::graph::{AdjacencyMatrix, CovariateTable, ObservationMask};
use crate::{Error, Result};

/// The simulation families. Letters match the CLI model names; primed
/// variants are the sparse versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimFamily {
    /// Directed, logit = sum of covariate differences.
    A,
    /// Sparse version of `A` (offset -8).
    APrime,
    /// Directed projection model, logit = 2 x_i·x_j / |x_j|.
    B,
    /// Sparse projection (logit = x_i·x_j / |x_j| - 6).
    BPrime,
    /// Undirected, logit = sum of covariate sums.
    C,
    /// Sparse version of `C` (offset -8).
    CPrime,
    /// Undirected inner-product model, logit = x_i·x_j.
    D,
    /// Sparse version of `D` (offset -6).
    DPrime,
    /// Stochastic block model: edge probability depends only on the block
    /// labels of the endpoints.
    Sbm,
}

impl SimFamily {
    pub fn directed(&self) -> bool {
        matches!(
            self,
            SimFamily::A | SimFamily::APrime | SimFamily::B | SimFamily::BPrime
        )
    }

    pub fn uses_covariates(&self) -> bool {
        !matches!(self, SimFamily::Sbm)
    }
}

impl std::str::FromStr for SimFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(SimFamily::A),
            "a'" | "a-prime" => Ok(SimFamily::APrime),
            "b" => Ok(SimFamily::B),
            "b'" | "b-prime" => Ok(SimFamily::BPrime),
            "c" => Ok(SimFamily::C),
            "c'" | "c-prime" => Ok(SimFamily::CPrime),
            "d" => Ok(SimFamily::D),
            "d'" | "d-prime" => Ok(SimFamily::DPrime),
            "sbm" => Ok(SimFamily::Sbm),
            other => Err(Error::InvalidInput(format!(
                "unknown model family {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for SimFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SimFamily::A => "a",
            SimFamily::APrime => "a'",
            SimFamily::B => "b",
            SimFamily::BPrime => "b'",
            SimFamily::C => "c",
            SimFamily::CPrime => "c'",
            SimFamily::D => "d",
            SimFamily::DPrime => "d'",
            SimFamily::Sbm => "sbm",
        };
        write!(f, "{name}")
    }
}

/// Block labels and the between-block edge probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmParams {
    labels: Vec<usize>,
    table: Array2<f64>,
}

impl SbmParams {
    pub fn new(labels: Vec<usize>, table: Array2<f64>) -> Result<Self> {
        let k = table.nrows();
        if table.ncols() != k {
            return Err(Error::DimensionMismatch(
                "block probability table must be square".into(),
            ));
        }
        for i in 0..k {
            for j in 0..k {
                let p = table[[i, j]];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Domain(format!(
                        "block probability ({i},{j}) = {p} outside [0,1]"
                    )));
                }
                if (table[[i, j]] - table[[j, i]]).abs() > 1e-12 {
                    return Err(Error::Domain(
                        "block probability table must be symmetric".into(),
                    ));
                }
            }
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= k) {
            return Err(Error::Domain(format!(
                "block label {bad} outside [0,{k})"
            )));
        }
        Ok(Self { labels, table })
    }

    /// n nodes split into k equal-ish contiguous blocks.
    pub fn balanced(n: usize, k: usize, within: f64, between: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!("need 1 <= k <= n, got k={k}")));
        }
        let labels = (0..n).map(|i| i * k / n).collect();
        let mut table = Array2::from_elem((k, k), between);
        for c in 0..k {
            table[[c, c]] = within;
        }
        Self::new(labels, table)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn table(&self) -> &Array2<f64> {
        &self.table
    }
}

/// A fully specified generator: family, size, covariate dimension, seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimModel {
    pub family: SimFamily,
    pub n: usize,
    /// Covariate dimension (ignored by the block model).
    pub p: usize,
    pub seed: u64,
    pub sbm: Option<SbmParams>,
}

impl SimModel {
    pub fn new(family: SimFamily, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            p: 5,
            seed,
            sbm: None,
        }
    }

    pub fn with_sbm(mut self, params: SbmParams) -> Self {
        self.sbm = Some(params);
        self
    }
}

/// A generated instance: the true network, the covariates that drove it
/// (absent for the block model), and the true edge probabilities.
#[derive(Debug, Clone)]
pub struct Generated {
    pub truth: AdjacencyMatrix,
    pub covariates: Option<CovariateTable>,
    pub probabilities: Array2<f64>,
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn dot_rows(x: &Array2<f64>, i: usize, j: usize) -> f64 {
    (0..x.ncols()).map(|k| x[[i, k]] * x[[j, k]]).sum()
}

fn row_norm(x: &Array2<f64>, i: usize) -> f64 {
    dot_rows(x, i, i).sqrt()
}

/// Log-odds of an edge under a covariate family.
fn family_logit(family: SimFamily, x: &Array2<f64>, i: usize, j: usize) -> f64 {
    let p = x.ncols();
    match family {
        SimFamily::A => (0..p).map(|k| x[[i, k]] - x[[j, k]]).sum(),
        SimFamily::APrime => (0..p).map(|k| x[[i, k]] - x[[j, k]]).sum::<f64>() - 8.0,
        SimFamily::B => 2.0 * dot_rows(x, i, j) / row_norm(x, j),
        SimFamily::BPrime => 2.0 * dot_rows(x, i, j) / row_norm(x, j) - 6.0,
        SimFamily::C => (0..p).map(|k| x[[i, k]] + x[[j, k]]).sum(),
        SimFamily::CPrime => (0..p).map(|k| x[[i, k]] + x[[j, k]]).sum::<f64>() - 8.0,
        SimFamily::D => dot_rows(x, i, j),
        SimFamily::DPrime => dot_rows(x, i, j) - 6.0,
        SimFamily::Sbm => unreachable!("block model probabilities are tabulated"),
    }
}

/// Draw a true network, covariates and edge probabilities from the model.
/// Identical seeds give identical output.
pub fn generate_true(model: &SimModel) -> Result<Generated> {
    let n = model.n;
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2 nodes, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);

    if model.family == SimFamily::Sbm {
        let params = model
            .sbm
            .as_ref()
            .ok_or_else(|| Error::Domain("block model needs block parameters".into()))?;
        if params.labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} block labels for n={n} nodes",
                params.labels.len()
            )));
        }
        let mut prob = Array2::zeros((n, n));
        let mut truth = AdjacencyMatrix::empty(n, false);
        for i in 0..n {
            for j in (i + 1)..n {
                let p = params.table[[params.labels[i], params.labels[j]]];
                prob[[i, j]] = p;
                prob[[j, i]] = p;
                if rng.random::<f64>() < p {
                    truth.set(i, j, 1)?;
                }
            }
        }
        return Ok(Generated {
            truth,
            covariates: None,
            probabilities: prob,
        });
    }

    // covariates: standard normal rows; families that divide by a row norm
    // get degenerate rows resampled
    let needs_norm = matches!(model.family, SimFamily::B | SimFamily::BPrime);
    let mut x = Array2::zeros((n, model.p));
    for i in 0..n {
        loop {
            for k in 0..model.p {
                x[[i, k]] = StandardNormal.sample(&mut rng);
            }
            if !needs_norm || row_norm(&x, i) > 1e-8 {
                break;
            }
        }
    }

    let directed = model.family.directed();
    let mut prob = Array2::zeros((n, n));
    let mut truth = AdjacencyMatrix::empty(n, directed);
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            let p = logistic(family_logit(model.family, &x, i, j));
            prob[[i, j]] = p;
            if !directed {
                prob[[j, i]] = p;
            }
            if rng.random::<f64>() < p {
                truth.set(i, j, 1)?;
            }
        }
    }
    Ok(Generated {
        truth,
        covariates: Some(CovariateTable::new(x)?),
        probabilities: prob,
    })
}

/// Pass a true network through the observation error process: each true
/// edge is kept with probability alpha, each absent edge stays absent with
/// probability beta, independently (one draw per unordered pair when the
/// network is undirected).
pub fn observe(truth: &AdjacencyMatrix, model: &ErrorModel, seed: u64) -> AdjacencyMatrix {
    let n = truth.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = AdjacencyMatrix::empty(n, truth.directed());
    for i in 0..n {
        for j in 0..n {
            if i == j || (!truth.directed() && j < i) {
                continue;
            }
            let u: f64 = rng.random();
            let bit = if truth.get(i, j) == 1 {
                u < model.alpha
            } else {
                u >= model.beta
            };
            if bit {
                observed.set(i, j, 1).expect("off-diagonal");
            }
        }
    }
    observed
}

/// Masked observation: certify each entry with probability alpha and hide
/// the rest (observed = mask AND truth). All observed edges are real; the
/// returned mask tells which entries are certified, so its complement is
/// the natural test set.
pub fn observe_masked(
    truth: &AdjacencyMatrix,
    alpha: f64,
    seed: u64,
) -> Result<(AdjacencyMatrix, ObservationMask)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} outside [0,1]")));
    }
    let n = truth.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = AdjacencyMatrix::empty(n, truth.directed());
    let mut mask = ObservationMask::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j || (!truth.directed() && j < i) {
                continue;
            }
            if rng.random::<f64>() < alpha {
                mask.set(i, j, 1);
                if !truth.directed() {
                    mask.set(j, i, 1);
                }
                if truth.get(i, j) == 1 {
                    observed.set(i, j, 1).expect("off-diagonal");
                }
            }
        }
    }
    Ok((observed, mask))
}

/// Mean number of edge entries per node of the generated true network,
/// averaged over `reps` replicates seeded as seed, seed+1, ...
///
/// Undirected edges count twice (once per endpoint), so the value is the
/// usual average degree; directed networks report arcs per node.
pub fn expected_degree(model: &SimModel, reps: usize) -> Result<f64> {
    if reps == 0 {
        return Err(Error::Domain("need at least one replicate".into()));
    }
    let mut total = 0.0;
    for rep in 0..reps {
        let mut m = model.clone();
        m.seed = model.seed + rep as u64;
        let generated = generate_true(&m)?;
        total += generated.truth.edge_entry_count() as f64 / model.n as f64;
    }
    Ok(total / reps as f64)
}

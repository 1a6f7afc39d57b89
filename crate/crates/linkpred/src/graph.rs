//! Core graph data types: adjacency matrices, observation masks and node
//! covariates.
//!
//! All matrices are dense with 0-based node indices. Self-loops are excluded
//! throughout: the diagonal of an adjacency matrix is always zero and no
//! operation ever ranks or penalizes a diagonal entry.

use ndarray::Array2;

use crate::{Error, Result};

/// Observed network `A`, directed or undirected, with binary entries and a
/// zero diagonal. Undirected matrices are kept symmetric by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    directed: bool,
    entries: Array2<u8>,
}

impl AdjacencyMatrix {
    /// An empty (all-zero) network on `n` nodes.
    pub fn empty(n: usize, directed: bool) -> Self {
        Self {
            n,
            directed,
            entries: Array2::zeros((n, n)),
        }
    }

    /// Build from an explicit entry matrix. Checks the type invariants:
    /// binary entries, zero diagonal, symmetry when undirected.
    pub fn from_entries(entries: Array2<u8>, directed: bool) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "adjacency matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..n {
            if entries[[i, i]] != 0 {
                return Err(Error::InvalidInput(format!("self-loop at node {i}")));
            }
            for j in 0..n {
                if entries[[i, j]] > 1 {
                    return Err(Error::InvalidInput(format!(
                        "adjacency entry ({i},{j}) is not binary"
                    )));
                }
                if !directed && entries[[i, j]] != entries[[j, i]] {
                    return Err(Error::InvalidInput(format!(
                        "undirected adjacency is asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            directed,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[[i, j]]
    }

    /// Set A_ij (mirrored when undirected). Self-loops are rejected.
    pub fn set(&mut self, i: usize, j: usize, value: u8) -> Result<()> {
        if i == j {
            return Err(Error::InvalidInput(format!("self-loop at node {i}")));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidInput(format!(
                "node index ({i},{j}) out of range for n={}",
                self.n
            )));
        }
        let v = if value > 0 { 1 } else { 0 };
        self.entries[[i, j]] = v;
        if !self.directed {
            self.entries[[j, i]] = v;
        }
        Ok(())
    }

    pub fn entries(&self) -> &Array2<u8> {
        &self.entries
    }

    /// Entries as f64, for use as least-squares targets.
    pub fn to_f64(&self) -> Array2<f64> {
        self.entries.mapv(|v| v as f64)
    }

    /// Number of 1-entries. For undirected matrices each edge counts twice.
    pub fn edge_entry_count(&self) -> usize {
        self.entries.iter().filter(|&&v| v == 1).count()
    }

    /// Out-neighborhood `{k: A_ik = 1}`.
    pub fn out_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&k| self.entries[[i, k]] == 1).collect()
    }

    /// In-neighborhood `{k: A_ki = 1}`.
    pub fn in_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&k| self.entries[[k, i]] == 1).collect()
    }

    /// Off-diagonal index pairs carrying a free score: ordered pairs for
    /// directed networks, unordered `i < j` pairs otherwise.
    pub fn score_pairs(&self) -> Vec<(usize, usize)> {
        score_pairs(self.n, self.directed)
    }
}

/// All off-diagonal pairs of an n-node network, ordered (directed) or
/// unordered with `i < j` (undirected), in lexicographic order.
pub fn score_pairs(n: usize, directed: bool) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if directed || i < j {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Indicator matrix `E` marking entries known to be correct (E_ij = 1) versus
/// uncertain (E_ij = 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    n: usize,
    entries: Array2<u8>,
}

impl ObservationMask {
    /// All-zero mask (nothing certified).
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: Array2::zeros((n, n)),
        }
    }

    /// All-one mask off the diagonal.
    pub fn ones(n: usize) -> Self {
        let mut entries = Array2::ones((n, n));
        for i in 0..n {
            entries[[i, i]] = 0;
        }
        Self { n, entries }
    }

    pub fn from_entries(entries: Array2<u8>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "mask must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|&v| v > 1) {
            return Err(Error::InvalidInput("mask entries must be 0/1".into()));
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u8) {
        self.entries[[i, j]] = if value > 0 { 1 } else { 0 };
    }

    pub fn entries(&self) -> &Array2<u8> {
        &self.entries
    }

    /// Complement mask on the off-diagonal (diagonal stays 0).
    pub fn complement(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.entries[[i, j]] = 1 - self.entries[[i, j]];
                }
            }
        }
        out
    }

    /// Check E_ij = E_ji, required for undirected use.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.entries[[i, j]] != self.entries[[j, i]] {
                    return false;
                }
            }
        }
        true
    }
}

/// Node covariates: an n × p real matrix, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateTable {
    rows: Array2<f64>,
}

impl CovariateTable {
    pub fn new(rows: Array2<f64>) -> Result<Self> {
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "covariates must be finite".into(),
            ));
        }
        Ok(Self { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn p(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    /// Euclidean distance between the covariate rows of nodes `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let mut s = 0.0;
        for k in 0..self.p() {
            let d = self.rows[[i, k]] - self.rows[[j, k]];
            s += d * d;
        }
        s.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_set_mirrors() {
        let mut a = AdjacencyMatrix::empty(3, false);
        a.set(0, 1, 1).unwrap();
        assert_eq!(a.get(0, 1), 1);
        assert_eq!(a.get(1, 0), 1);
    }

    #[test]
    fn directed_set_does_not_mirror() {
        let mut a = AdjacencyMatrix::empty(3, true);
        a.set(0, 1, 1).unwrap();
        assert_eq!(a.get(0, 1), 1);
        assert_eq!(a.get(1, 0), 0);
    }

    #[test]
    fn self_loop_rejected() {
        let mut a = AdjacencyMatrix::empty(3, true);
        assert!(a.set(1, 1, 1).is_err());

        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = 1;
        assert!(AdjacencyMatrix::from_entries(m, true).is_err());
    }

    #[test]
    fn asymmetric_undirected_rejected() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = 1;
        assert!(AdjacencyMatrix::from_entries(m.clone(), false).is_err());
        assert!(AdjacencyMatrix::from_entries(m, true).is_ok());
    }

    #[test]
    fn score_pair_counts() {
        assert_eq!(score_pairs(3, true).len(), 6);
        assert_eq!(score_pairs(3, false).len(), 3);
        assert_eq!(score_pairs(4, false), vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn mask_complement_is_involution() {
        let mut e = ObservationMask::zeros(4);
        e.set(0, 1, 1);
        e.set(2, 3, 1);
        assert_eq!(e.complement().complement(), e);
        assert_eq!(e.complement().get(0, 1), 0);
        assert_eq!(e.complement().get(1, 0), 1);
        assert_eq!(e.complement().get(0, 0), 0);
    }
}

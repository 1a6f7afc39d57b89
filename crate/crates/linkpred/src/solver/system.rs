//! The quadratic form shared by the directed criteria and the undirected
//! q-power approximation.
//!
//! Over zero-diagonal score matrices f, the criterion is
//!
//! ```text
//! Q(f) = (1/N) sum_{a≠b} V_ab (A_ab - f_ab)^2
//!      + (lambda/n^4) sum_{a≠b, c≠d} W_ac W_bd (f_ab - f_cd)^2
//!      + (ridge/n^2) ||f||^2
//! ```
//!
//! with every pair excluded from both sums when it sits on the diagonal.
//! The penalty is a weighted Laplacian quadratic form over ordered pairs
//! whose action never needs materializing: with row sums `s` and the
//! elementwise degree `Deg_ab = s_a s_b - (W^2)_ab`,
//!
//! ```text
//! (L f)_ab = Deg_ab f_ab - (W F W)_ab .
//! ```
//!
//! Stationarity of Q, scaled by n^4/2, gives the linear system
//! `[c_V diag(V) + 2 lambda L + n^2 ridge I] f = c_V V∘A` with
//! `c_V = n^4 / N`, which the direct path solves outright and block
//! coordinate descent solves one score row at a time.

use ndarray::Array2;

use crate::similarity::SimilarityMatrix;
use crate::solver::linalg::{cholesky_factor, cholesky_solve, pcg_solve, SpdOperator};
use crate::{Error, Result};

/// Row-block systems larger than this are solved iteratively instead of by
/// dense factorization.
const BLOCK_DENSE_CAP: usize = 2000;

pub(crate) struct QuadraticSystem {
    n: usize,
    a: Array2<f64>,
    v: Array2<f64>,
    w: SimilarityMatrix,
    /// Deg_ab = s_a s_b - (W^2)_ab: total pair weight attached to (a,b).
    deg: Array2<f64>,
    loss_norm: f64,
    /// n^4 / loss_norm.
    c_v: f64,
    lambda: f64,
    /// 2 * lambda.
    lam2: f64,
    /// n^2 * ridge.
    ridge_c: f64,
}

impl QuadraticSystem {
    pub fn new(
        a: Array2<f64>,
        v: Array2<f64>,
        w: SimilarityMatrix,
        loss_norm: f64,
        lambda: f64,
        ridge: f64,
    ) -> Self {
        let n = a.nrows();
        let s = w.row_sums();
        let w2 = w.square_dense();
        let mut deg = Array2::zeros((n, n));
        for a_idx in 0..n {
            for b_idx in 0..n {
                deg[[a_idx, b_idx]] = s[a_idx] * s[b_idx] - w2[[a_idx, b_idx]];
            }
        }
        let n4 = (n as f64).powi(4);
        Self {
            n,
            a,
            v,
            w,
            deg,
            loss_norm,
            c_v: n4 / loss_norm,
            lambda,
            lam2: 2.0 * lambda,
            ridge_c: (n * n) as f64 * ridge,
        }
    }

    /// G = F W, maintained by the BCD sweep so cross-row penalty terms stay
    /// current as rows update.
    pub fn right_product(&self, f: &Array2<f64>) -> Array2<f64> {
        self.w.rmul_dense(f)
    }

    /// The penalty operator L applied to f: Deg∘f - W F W, diagonal zeroed.
    fn penalty_apply(&self, f: &Array2<f64>) -> Array2<f64> {
        let wf = self.w.mul_dense(f);
        let wfw = self.w.rmul_dense(&wf);
        let mut out = &self.deg * f;
        out -= &wfw;
        for i in 0..self.n {
            out[[i, i]] = 0.0;
        }
        out
    }

    /// Raw penalty quadratic form: sum over ordered pair-pairs of
    /// `W_ac W_bd (f_ab - f_cd)^2`, equal to `2 f^T L f`.
    pub fn penalty_quadratic(&self, f: &Array2<f64>) -> f64 {
        let lf = self.penalty_apply(f);
        let mut total = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                total += f[[i, j]] * lf[[i, j]];
            }
        }
        (2.0 * total).max(0.0)
    }

    /// Criterion value at f (ridge excluded).
    pub fn objective(&self, f: &Array2<f64>) -> f64 {
        let mut loss = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let d = self.a[[i, j]] - f[[i, j]];
                    loss += self.v[[i, j]] * d * d;
                }
            }
        }
        let n4 = (self.n as f64).powi(4);
        loss / self.loss_norm + self.lambda / n4 * self.penalty_quadratic(f)
    }

    /// Gradient of the criterion with respect to the off-diagonal scores
    /// (ridge excluded).
    pub fn gradient(&self, f: &Array2<f64>) -> Array2<f64> {
        let n4 = (self.n as f64).powi(4);
        let mut out = self.penalty_apply(f);
        out *= 4.0 * self.lambda / n4;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out[[i, j]] +=
                        2.0 / self.loss_norm * self.v[[i, j]] * (f[[i, j]] - self.a[[i, j]]);
                }
            }
        }
        out
    }

    /// Right-hand side of the scaled normal equations over `pairs`.
    pub fn rhs_flat(&self, pairs: &[(usize, usize)]) -> Vec<f64> {
        pairs
            .iter()
            .map(|&(i, j)| self.c_v * self.v[[i, j]] * self.a[[i, j]])
            .collect()
    }

    /// Materialize the dense system matrix over `pairs` (ordered pairs).
    pub fn materialize(&self, pairs: &[(usize, usize)]) -> (Array2<f64>, Vec<f64>) {
        let m = pairs.len();
        let mut mat = Array2::zeros((m, m));
        for (k, &(a, b)) in pairs.iter().enumerate() {
            for (kp, &(c, d)) in pairs.iter().enumerate() {
                if k == kp {
                    mat[[k, k]] = self.c_v * self.v[[a, b]]
                        + self.lam2 * (self.deg[[a, b]] - self.w.get(a, a) * self.w.get(b, b))
                        + self.ridge_c;
                } else {
                    let weight = self.w.get(a, c) * self.w.get(b, d);
                    if weight != 0.0 {
                        mat[[k, kp]] = -self.lam2 * weight;
                    }
                }
            }
        }
        (mat, self.rhs_flat(pairs))
    }

    /// Matrix-free operator over flat vectors indexed by `pairs`.
    pub fn operator<'a>(
        &'a self,
        pairs: &'a [(usize, usize)],
        directed: bool,
    ) -> MatrixFreeSystem<'a> {
        MatrixFreeSystem {
            sys: self,
            pairs,
            directed,
        }
    }

    /// One Gauss–Seidel pass over score rows in ascending index order. `f`
    /// is the current iterate (zero diagonal), `g` must equal `F W` on
    /// entry and is kept current. Each row block is solved exactly; blocks
    /// wider than 2000 use conjugate gradients at `block_tol`.
    pub fn bcd_sweep(
        &self,
        f: &mut Array2<f64>,
        g: &mut Array2<f64>,
        block_tol: f64,
    ) -> Result<()> {
        let n = self.n;
        let mut rhs = vec![0.0; n.saturating_sub(1)];
        let mut cols = vec![0usize; n.saturating_sub(1)];
        for a in 0..n {
            let w_aa = self.w.get(a, a);
            // t_b = sum_c W_ac G_cb, over all rows c
            let mut t = vec![0.0; n];
            for (c, w_ac) in self.w.row_nonzeros(a) {
                let g_row = g.row(c);
                for (tb, gv) in t.iter_mut().zip(g_row.iter()) {
                    *tb += w_ac * gv;
                }
            }
            // free coordinates of this row: every column except a
            let mut width = 0;
            for b in 0..n {
                if b == a {
                    continue;
                }
                cols[width] = b;
                rhs[width] = self.c_v * self.v[[a, b]] * self.a[[a, b]]
                    + self.lam2 * (t[b] - w_aa * g[[a, b]]);
                width += 1;
            }

            let solution = if width <= BLOCK_DENSE_CAP {
                let mut block = Array2::zeros((width, width));
                for p in 0..width {
                    let b = cols[p];
                    for (q, &bq) in cols[..width].iter().enumerate() {
                        block[[p, q]] = -self.lam2 * w_aa * self.w.get(b, bq);
                    }
                    block[[p, p]] +=
                        self.c_v * self.v[[a, b]] + self.lam2 * self.deg[[a, b]] + self.ridge_c;
                }
                cholesky_factor(&mut block)
                    .map_err(|e| Error::Numerical(format!("row block {a}: {e}")))?;
                let mut x = rhs[..width].to_vec();
                cholesky_solve(&block, &mut x);
                x
            } else {
                let op = RowBlockSystem {
                    sys: self,
                    row: a,
                    cols: &cols[..width],
                };
                let x0: Vec<f64> = cols[..width].iter().map(|&b| f[[a, b]]).collect();
                let (x, _) = pcg_solve(&op, &rhs[..width], Some(&x0), block_tol, 20 * width + 100)
                    .map_err(|e| Error::Numerical(format!("row block {a}: {e}")))?;
                x
            };

            for (p, &b) in cols[..width].iter().enumerate() {
                f[[a, b]] = solution[p];
            }
            // refresh row a of G = F W
            let f_row: Vec<f64> = (0..n).map(|j| f[[a, j]]).collect();
            let g_row = self.w.mul_vec(&f_row);
            for (j, value) in g_row.into_iter().enumerate() {
                g[[a, j]] = value;
            }
        }
        Ok(())
    }
}

/// Flat-vector view of the full system for conjugate gradients.
pub(crate) struct MatrixFreeSystem<'a> {
    sys: &'a QuadraticSystem,
    pairs: &'a [(usize, usize)],
    directed: bool,
}

impl SpdOperator for MatrixFreeSystem<'_> {
    fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.sys.n;
        let mut f = Array2::zeros((n, n));
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            f[[i, j]] = x[k];
            if !self.directed {
                f[[j, i]] = x[k];
            }
        }
        let mut out = self.sys.penalty_apply(&f);
        out *= self.sys.lam2;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out[[i, j]] +=
                        (self.sys.c_v * self.sys.v[[i, j]] + self.sys.ridge_c) * f[[i, j]];
                }
            }
        }
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            y[k] = out[[i, j]];
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.pairs
            .iter()
            .map(|&(i, j)| {
                self.sys.c_v * self.sys.v[[i, j]]
                    + self.sys.lam2
                        * (self.sys.deg[[i, j]] - self.sys.w.get(i, i) * self.sys.w.get(j, j))
                    + self.sys.ridge_c
            })
            .collect()
    }
}

/// One row block of the system, for iterative block solves.
struct RowBlockSystem<'a> {
    sys: &'a QuadraticSystem,
    row: usize,
    cols: &'a [usize],
}

impl SpdOperator for RowBlockSystem<'_> {
    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let a = self.row;
        let w_aa = self.sys.w.get(a, a);
        // dense row vector for the W product
        let n = self.sys.n;
        let mut full = vec![0.0; n];
        for (p, &b) in self.cols.iter().enumerate() {
            full[b] = x[p];
        }
        let wx = self.sys.w.mul_vec(&full);
        for (p, &b) in self.cols.iter().enumerate() {
            y[p] = (self.sys.c_v * self.sys.v[[a, b]]
                + self.sys.lam2 * self.sys.deg[[a, b]]
                + self.sys.ridge_c)
                * x[p]
                - self.sys.lam2 * w_aa * wx[b];
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let a = self.row;
        let w_aa = self.sys.w.get(a, a);
        self.cols
            .iter()
            .map(|&b| {
                self.sys.c_v * self.sys.v[[a, b]] + self.sys.lam2 * self.sys.deg[[a, b]]
                    + self.sys.ridge_c
                    - self.sys.lam2 * w_aa * self.sys.w.get(b, b)
            })
            .collect()
    }
}

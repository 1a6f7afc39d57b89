//! Dense Cholesky and preconditioned conjugate gradients for the symmetric
//! positive definite systems assembled by the solvers.

use ndarray::Array2;

use crate::{Error, Result};

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// In-place lower Cholesky factorization. Fails if a pivot is not strictly
/// positive, i.e. the matrix is not positive definite.
pub fn cholesky_factor(mat: &mut Array2<f64>) -> Result<()> {
    let n = mat.nrows();
    debug_assert_eq!(n, mat.ncols());
    let m = mat
        .as_slice_mut()
        .expect("cholesky expects standard layout");
    for k in 0..n {
        let mut pivot = m[k * n + k];
        for p in 0..k {
            pivot -= m[k * n + p] * m[k * n + p];
        }
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(Error::Numerical(format!(
                "Cholesky pivot {pivot:.3e} at index {k}: system not positive definite"
            )));
        }
        let pivot = pivot.sqrt();
        m[k * n + k] = pivot;
        for i in (k + 1)..n {
            let mut v = m[i * n + k];
            for p in 0..k {
                v -= m[i * n + p] * m[k * n + p];
            }
            m[i * n + k] = v / pivot;
        }
    }
    Ok(())
}

/// Solve L L^T x = b given the factor from [`cholesky_factor`]; overwrites
/// `b` with the solution.
pub fn cholesky_solve(chol: &Array2<f64>, b: &mut [f64]) {
    let n = chol.nrows();
    let m = chol.as_slice().expect("cholesky expects standard layout");
    // forward: L y = b
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= m[i * n + k] * b[k];
        }
        b[i] = v / m[i * n + i];
    }
    // backward: L^T x = y
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in (i + 1)..n {
            v -= m[k * n + i] * b[k];
        }
        b[i] = v / m[i * n + i];
    }
}

/// Factor and solve a dense SPD system, consuming the matrix.
pub fn solve_spd_dense(mut mat: Array2<f64>, b: &[f64]) -> Result<Vec<f64>> {
    cholesky_factor(&mut mat)?;
    let mut x = b.to_vec();
    cholesky_solve(&mat, &mut x);
    Ok(x)
}

/// A symmetric positive definite linear operator on flat vectors.
pub trait SpdOperator {
    fn dim(&self) -> usize;
    /// y = M x
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// The diagonal of M, used as a Jacobi preconditioner.
    fn diagonal(&self) -> Vec<f64>;
}

/// Jacobi-preconditioned conjugate gradients. Iterates until the residual
/// norm drops below `rel_tol * ||b||` (or an absolute floor for b = 0).
/// Returns the solution and the iteration count.
pub fn pcg_solve(
    op: &dyn SpdOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let m = op.dim();
    debug_assert_eq!(b.len(), m);
    let inv_diag: Vec<f64> = op
        .diagonal()
        .iter()
        .map(|&d| {
            if d > 0.0 {
                1.0 / d
            } else {
                1.0 // degenerate row: fall back to identity preconditioning
            }
        })
        .collect();

    let b_norm = dot(b, b).sqrt();
    let threshold = if b_norm > 0.0 {
        rel_tol * b_norm
    } else {
        rel_tol
    };

    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; m],
    };
    let mut r = vec![0.0; m];
    op.apply(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    if dot(&r, &r).sqrt() <= threshold {
        return Ok((x, 0));
    }

    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; m];

    for iter in 1..=max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::Numerical(format!(
                "conjugate gradient curvature {pap:.3e}: operator not positive definite"
            )));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        if dot(&r, &r).sqrt() <= threshold {
            return Ok((x, iter));
        }
        for ((zi, ri), di) in z.iter_mut().zip(&r).zip(&inv_diag) {
            *zi = ri * di;
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Err(Error::Numerical(format!(
        "conjugate gradient did not reach tolerance {rel_tol:.1e} in {max_iter} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct DenseOp(Array2<f64>);

    impl SpdOperator for DenseOp {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for (i, slot) in y.iter_mut().enumerate() {
                *slot = (0..self.dim()).map(|j| self.0[[i, j]] * x[j]).sum();
            }
        }
        fn diagonal(&self) -> Vec<f64> {
            (0..self.dim()).map(|i| self.0[[i, i]]).collect()
        }
    }

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let mut b = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                b[[i, j]] = rng.random::<f64>() - 0.5;
            }
        }
        let mut m = b.t().dot(&b);
        for i in 0..n {
            m[[i, i]] += n as f64;
        }
        m
    }

    #[test]
    fn cholesky_solves_small_system() {
        let m = array![[4.0, 2.0], [2.0, 3.0]];
        let x = solve_spd_dense(m.clone(), &[8.0, 7.0]).unwrap();
        // residual check
        for i in 0..2 {
            let r = m[[i, 0]] * x[0] + m[[i, 1]] * x[1];
            assert_abs_diff_eq!(r, [8.0, 7.0][i], epsilon = 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(solve_spd_dense(m, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn pcg_matches_cholesky() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [3usize, 8, 20] {
            let m = random_spd(n, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let exact = solve_spd_dense(m.clone(), &b).unwrap();
            let (cg, iters) = pcg_solve(&DenseOp(m), &b, None, 1e-13, 10 * n + 50).unwrap();
            assert!(iters <= 10 * n + 50);
            for (a, b) in exact.iter().zip(&cg) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn pcg_zero_rhs_returns_zero() {
        let m = array![[2.0, 0.0], [0.0, 3.0]];
        let (x, iters) = pcg_solve(&DenseOp(m), &[0.0, 0.0], None, 1e-12, 10).unwrap();
        assert_eq!(iters, 0);
        assert_eq!(x, vec![0.0, 0.0]);
    }
}

//! The observation error model.
//!
//! A true edge is recorded correctly with probability `alpha`, an absent edge
//! with probability `beta`. The observed-edge probability is then an affine
//! function of the true-edge probability,
//!
//! ```text
//! P_obs = (alpha + beta - 1) * P_true + (1 - beta),
//! ```
//!
//! and as long as `alpha + beta > 1` the conditional probabilities of a true
//! edge given either observation are increasing in `P_true`. Ranking pairs by
//! observed-edge probability therefore ranks them by true-edge probability,
//! which is why the solvers estimate observed-edge probabilities and never
//! need `alpha` or `beta` themselves.

use crate::{Error, Result};

/// Per-entry observation error rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    /// Probability a true edge is recorded as an edge.
    pub alpha: f64,
    /// Probability an absent edge is recorded as absent.
    pub beta: f64,
}

impl ErrorModel {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha={alpha} outside [0,1]")));
        }
        if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta={beta} outside [0,1]")));
        }
        Ok(Self { alpha, beta })
    }

    /// Error-free observation (alpha = beta = 1).
    pub fn perfect() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    /// Whether rankings by observed-edge probability agree with rankings by
    /// true-edge probability. Constructors accept any alpha, beta in [0,1];
    /// this predicate is what ranking validity actually depends on.
    pub fn is_informative(&self) -> bool {
        self.alpha + self.beta > 1.0
    }

    /// Observed-edge probability for a pair with true-edge probability
    /// `p_true`.
    pub fn observed_probability(&self, p_true: f64) -> Result<f64> {
        check_probability(p_true)?;
        Ok((self.alpha + self.beta - 1.0) * p_true + (1.0 - self.beta))
    }

    /// Probability of a true edge given the observed bit.
    ///
    /// `observed = true` is the conditional given an observed edge,
    /// `observed = false` given an observed non-edge. Errors when the
    /// corresponding denominator (the probability of that observation) is
    /// zero.
    pub fn posterior_given_observed(&self, p_true: f64, observed: bool) -> Result<f64> {
        check_probability(p_true)?;
        let p_obs = (self.alpha + self.beta - 1.0) * p_true + (1.0 - self.beta);
        if observed {
            if p_obs == 0.0 {
                return Err(Error::Domain(
                    "posterior given an observed edge is undefined: P(observed edge) = 0".into(),
                ));
            }
            Ok(self.alpha * p_true / p_obs)
        } else {
            if p_obs == 1.0 {
                return Err(Error::Domain(
                    "posterior given an observed non-edge is undefined: P(observed non-edge) = 0"
                        .into(),
                ));
            }
            Ok((1.0 - self.alpha) * p_true / (1.0 - p_obs))
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::Domain(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_observation_is_identity() {
        let m = ErrorModel::perfect();
        assert_eq!(m.observed_probability(0.3).unwrap(), 0.3);
        assert_eq!(m.observed_probability(0.0).unwrap(), 0.0);
        assert_eq!(m.posterior_given_observed(0.3, true).unwrap(), 1.0);
        assert_eq!(m.posterior_given_observed(0.3, false).unwrap(), 0.0);
    }

    #[test]
    fn observed_probability_matches_affine_form() {
        // (0.8 + 0.9 - 1) * 0.5 + (1 - 0.9) = 0.45
        let m = ErrorModel::new(0.8, 0.9).unwrap();
        assert_abs_diff_eq!(m.observed_probability(0.5).unwrap(), 0.45, epsilon = 1e-15);
    }

    #[test]
    fn posterior_observed_edge() {
        // alpha*p / p_obs = 0.4 / 0.45 = 8/9
        let m = ErrorModel::new(0.8, 0.9).unwrap();
        assert_abs_diff_eq!(
            m.posterior_given_observed(0.5, true).unwrap(),
            0.8 / 0.9,
            epsilon = 1e-15
        );
    }

    #[test]
    fn posterior_bounds_and_errors() {
        let m = ErrorModel::new(1.0, 1.0).unwrap();
        // P(observed non-edge) = 0 at p_true = 1
        assert!(m.posterior_given_observed(1.0, false).is_err());
        // P(observed edge) = 0 at p_true = 0
        assert!(m.posterior_given_observed(0.0, true).is_err());
        assert!(m.posterior_given_observed(1.5, true).is_err());
        assert!(ErrorModel::new(-0.1, 0.5).is_err());
        assert!(ErrorModel::new(0.5, 1.1).is_err());
    }

    #[test]
    fn informative_predicate() {
        assert!(ErrorModel::new(0.8, 0.9).unwrap().is_informative());
        assert!(!ErrorModel::new(0.5, 0.5).unwrap().is_informative());
        // allowed by the constructor, flagged by the predicate
        assert!(ErrorModel::new(0.2, 0.3).is_ok());
    }

    #[test]
    fn observed_probability_is_affine_with_slope_alpha_plus_beta_minus_one() {
        let m = ErrorModel::new(0.7, 0.8).unwrap();
        let f = |p: f64| m.observed_probability(p).unwrap();
        let slope = (f(0.6) - f(0.2)) / 0.4;
        assert_abs_diff_eq!(slope, 0.7 + 0.8 - 1.0, epsilon = 1e-12);
        // second difference vanishes on three equally spaced points
        let second = f(0.2) - 2.0 * f(0.4) + f(0.6);
        assert_abs_diff_eq!(second, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn posteriors_monotone_in_p_true_when_informative() {
        let models = [(0.8, 0.9), (0.6, 0.7), (0.9, 0.2), (0.3, 0.8)];
        for (alpha, beta) in models {
            let m = ErrorModel::new(alpha, beta).unwrap();
            if !m.is_informative() {
                continue;
            }
            for observed in [true, false] {
                let mut prev = f64::NEG_INFINITY;
                for k in 0..=1000 {
                    let p = k as f64 / 1000.0;
                    match m.posterior_given_observed(p, observed) {
                        Ok(v) => {
                            assert!(
                                v >= prev - 1e-12,
                                "posterior not monotone at p={p} for ({alpha},{beta})"
                            );
                            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
                            prev = v;
                        }
                        Err(_) => continue, // degenerate endpoint
                    }
                }
            }
        }
    }

    #[test]
    fn total_probability_identity() {
        // P_obs = alpha * p + (1 - beta) * (1 - p)
        let m = ErrorModel::new(0.65, 0.85).unwrap();
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let lhs = m.observed_probability(p).unwrap();
            let rhs = m.alpha * p + (1.0 - m.beta) * (1.0 - p);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        }
    }
}

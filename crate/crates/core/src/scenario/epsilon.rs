//! Violation-level functions for `β`-confidence certificates.

use crate::error::{GneError, Result};
use statrs::function::gamma::ln_gamma;

/// `ln C(K, h)`.
pub fn ln_binomial(k: usize, h: usize) -> f64 {
    assert!(h <= k);
    if h == 0 || h == k {
        return 0.0;
    }
    ln_gamma(k as f64 + 1.0) - ln_gamma(h as f64 + 1.0) - ln_gamma((k - h) as f64 + 1.0)
}

/// `ε : {0..K} → [0, 1]` satisfying `Σ_{h<K} C(K,h)(1 − ε(h))^{K−h} = Σ_h w_h`
/// for positive weights `w_0..w_{K−1}`, with `ε(K) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonFunction {
    k: usize,
    ln_weights: Vec<f64>,
}

impl EpsilonFunction {
    /// Splits the confidence budget `β` evenly over `h = 0..K−1`.
    pub fn even(k: usize, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let lw = beta.ln() - (k.max(1) as f64).ln();
        Ok(EpsilonFunction {
            k,
            ln_weights: vec![lw; k],
        })
    }

    /// Arbitrary positive split of the budget; `weights[h]` is spent on `h`.
    pub fn weighted(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(GneError::InvalidArgument("weights must be positive and finite".into()));
        }
        check_beta(weights.iter().sum())?;
        Ok(EpsilonFunction {
            k: weights.len(),
            ln_weights: weights.iter().map(|w| w.ln()).collect(),
        })
    }

    pub fn num_samples(&self) -> usize {
        self.k
    }

    pub fn budget(&self) -> f64 {
        self.ln_weights.iter().map(|l| l.exp()).sum()
    }

    pub fn eval(&self, h: usize) -> Result<f64> {
        Ok((-self.ln_complement(h)?.exp_m1()).clamp(0.0, 1.0))
    }

    /// `1 − ε(h)`, accurate even where `ε(h)` rounds to one.
    pub fn complement(&self, h: usize) -> Result<f64> {
        Ok(self.ln_complement(h)?.exp().clamp(0.0, 1.0))
    }

    fn ln_complement(&self, h: usize) -> Result<f64> {
        if h > self.k {
            return Err(GneError::InvalidArgument(format!(
                "support count {h} exceeds sample size {}",
                self.k
            )));
        }
        if h == self.k {
            return Ok(f64::NEG_INFINITY);
        }
        Ok((self.ln_weights[h] - ln_binomial(self.k, h)) / (self.k - h) as f64)
    }

    /// `Σ_{h<K} C(K,h)(1 − ε(h))^{K−h}`, which should give back the budget.
    pub fn defining_sum(&self) -> f64 {
        (0..self.k)
            .map(|h| {
                let c = self.complement(h).unwrap();
                (ln_binomial(self.k, h) + (self.k - h) as f64 * c.ln()).exp()
            })
            .sum()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(GneError::InvalidArgument(format!("beta out of range: {beta} not in (0, 1)")))
    }
}

/// `ε(h)` for the even split, with `ε(h) = 1` when `h = K` (including `K = 0`).
pub fn epsilon_even_split(k: usize, beta: f64, h: usize) -> Result<f64> {
    EpsilonFunction::even(k, beta)?.eval(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn boundary_values() {
        assert_eq!(epsilon_even_split(0, 0.1, 0).unwrap(), 1.0);
        assert_eq!(epsilon_even_split(5, 0.1, 5).unwrap(), 1.0);
        assert!(epsilon_even_split(5, 0.1, 6).is_err());
        assert!(epsilon_even_split(5, 0.0, 1).is_err());
        assert!(epsilon_even_split(5, 1.0, 1).is_err());
    }

    #[test]
    fn single_sample() {
        // K = 1, h = 0: 1 − ε = β.
        assert_relative_eq!(epsilon_even_split(1, 0.25, 0).unwrap(), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn weighted_reduces_to_even() {
        let even = EpsilonFunction::even(20, 1e-3).unwrap();
        let w = EpsilonFunction::weighted(&[1e-3 / 20.0; 20]).unwrap();
        for h in 0..=20 {
            assert_relative_eq!(even.eval(h).unwrap(), w.eval(h).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn defining_sum_recovers_budget() {
        let f = EpsilonFunction::even(300, 1e-6).unwrap();
        assert_relative_eq!(f.defining_sum(), 1e-6, max_relative = 1e-12);
    }
}

//! Projected extragradient for box-constrained affine VIs.
//!
//! Kept as an independent cross-check of the pivoting solver; it never
//! feeds the certificate pipeline.

use crate::error::{GneError, Result};
use crate::linalg::{norm_inf, spectral_norm, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtragradientOptions {
    /// Fraction of `1/‖M‖₂` used as the fixed stepsize; must be in `(0, 1)`.
    pub step_fraction: f64,
    pub max_iterations: usize,
    /// Stop when the natural residual `‖x − Π(x − F(x))‖∞` drops below this.
    pub residual_tol: f64,
}

impl Default for ExtragradientOptions {
    fn default() -> Self {
        ExtragradientOptions {
            step_fraction: 0.9,
            max_iterations: 2_000_000,
            residual_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtragradientResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

fn affine(m: &Matrix, q: &[f64], x: &[f64]) -> Vec<f64> {
    let mut f = m.mul_vec(x);
    f.iter_mut().zip(q).for_each(|(a, b)| *a += b);
    f
}

/// Natural-map residual over a box.
pub fn natural_residual(m: &Matrix, q: &[f64], bounds: &[(f64, f64)], x: &[f64]) -> f64 {
    let f = affine(m, q, x);
    let mut y: Vec<f64> = x.iter().zip(&f).map(|(a, b)| a - b).collect();
    project(&mut y, bounds);
    let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
    norm_inf(&diff)
}

pub fn extragradient_box(
    m: &Matrix,
    q: &[f64],
    bounds: &[(f64, f64)],
    start: &[f64],
    opts: &ExtragradientOptions,
) -> Result<ExtragradientResult> {
    let n = q.len();
    if m.rows() != n || m.cols() != n || bounds.len() != n || start.len() != n {
        return Err(GneError::Dimension("extragradient data shapes disagree".into()));
    }
    if !(opts.step_fraction > 0.0 && opts.step_fraction < 1.0) {
        return Err(GneError::InvalidArgument("step fraction must lie in (0, 1)".into()));
    }
    let norm = spectral_norm(m);
    let gamma = if norm > 0.0 { opts.step_fraction / norm } else { 1.0 };

    let mut x = start.to_vec();
    project(&mut x, bounds);
    let mut residual = natural_residual(m, q, bounds, &x);
    let mut it = 0;
    while residual > opts.residual_tol && it < opts.max_iterations {
        let f = affine(m, q, &x);
        let mut y: Vec<f64> = x.iter().zip(&f).map(|(a, b)| a - gamma * b).collect();
        project(&mut y, bounds);
        let fy = affine(m, q, &y);
        x.iter_mut().zip(&fy).for_each(|(a, b)| *a -= gamma * b);
        project(&mut x, bounds);
        it += 1;
        if it % 16 == 0 {
            residual = natural_residual(m, q, bounds, &x);
        }
    }
    residual = natural_residual(m, q, bounds, &x);
    if residual > opts.residual_tol {
        return Err(GneError::Numerical(format!(
            "extragradient stopped at residual {residual:e} after {it} iterations"
        )));
    }
    Ok(ExtragradientResult {
        x,
        iterations: it,
        residual,
    })
}

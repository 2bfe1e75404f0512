//! Lemke's complementary pivoting with a covering vector.
//!
//! Finds `z ≥ 0` with `w = Mz + q ≥ 0` and `zᵀw = 0`. Degenerate ties in the
//! ratio test are broken lexicographically on the rows of the current basis
//! inverse, which rules out cycling. For positive semidefinite `M` the
//! method either stops with a solution or on a secondary ray, and the ray
//! only happens when the LCP is infeasible.

use crate::error::{GneError, Result};
use crate::linalg::Matrix;
use crate::tolerance::ToleranceSet;

#[derive(Debug, Clone, PartialEq)]
pub struct LcpSolution {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub pivots: usize,
}

pub fn lemke(m: &Matrix, q: &[f64], cover: &[f64], tol: &ToleranceSet) -> Result<LcpSolution> {
    let n = q.len();
    if m.rows() != n || m.cols() != n || cover.len() != n {
        return Err(GneError::Dimension("LCP data shapes disagree".into()));
    }
    if cover.iter().any(|&d| d <= 0.0 || !d.is_finite()) {
        return Err(GneError::InvalidArgument("covering vector must be positive".into()));
    }
    if q.iter().all(|&qi| qi >= 0.0) {
        return Ok(LcpSolution {
            z: vec![0.0; n],
            w: q.to_vec(),
            pivots: 0,
        });
    }

    // Columns: w (0..n), z (n..2n), z0 (2n), rhs (2n+1).
    let z0 = 2 * n;
    let rhs = 2 * n + 1;
    let width = 2 * n + 2;
    let mut t = vec![0.0; n * width];
    for i in 0..n {
        let r = &mut t[i * width..(i + 1) * width];
        r[i] = 1.0;
        for j in 0..n {
            r[n + j] = -m[(i, j)];
        }
        r[z0] = -cover[i];
        r[rhs] = q[i];
    }
    let mut basis: Vec<usize> = (0..n).collect();

    // z0 enters at the level that makes every w non-negative.
    let cand = min_ratio_rows((0..n).map(|i| (i, q[i] / cover[i])));
    let r = lex_pick(&t, width, n, z0, cand, |a| -a);
    pivot(&mut t, width, n, r, z0);
    let mut leaving = basis[r];
    basis[r] = z0;
    let mut pivots = 1;

    loop {
        if pivots > tol.max_iterations {
            return Err(GneError::Numerical(format!(
                "complementary pivoting exceeded {} pivots",
                tol.max_iterations
            )));
        }
        let entering = if leaving < n { leaving + n } else { leaving - n };
        let col_scale = (0..n).fold(0.0_f64, |s, i| s.max(t[i * width + entering].abs()));
        let piv_tol = tol.pivot * col_scale.max(1.0);

        let cand = min_ratio_rows((0..n).filter_map(|i| {
            let a = t[i * width + entering];
            (a > piv_tol).then(|| (i, t[i * width + rhs].max(0.0) / a))
        }));
        if cand.is_empty() {
            return Err(GneError::RayTermination { pivots });
        }
        // Prefer letting z0 leave: that ends the path.
        let r = match cand.iter().find(|&&i| basis[i] == z0) {
            Some(&i) => i,
            None => lex_pick(&t, width, n, entering, cand, |a| a),
        };
        pivot(&mut t, width, n, r, entering);
        leaving = basis[r];
        basis[r] = entering;
        pivots += 1;
        if leaving == z0 {
            break;
        }
    }

    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        let v = t[i * width + rhs].max(0.0);
        if b < n {
            w[b] = v;
        } else if b < 2 * n {
            z[b - n] = v;
        }
    }
    Ok(LcpSolution { z, w, pivots })
}

/// Rows attaining the smallest ratio, up to a relative tie tolerance.
fn min_ratio_rows(ratios: impl Iterator<Item = (usize, f64)>) -> Vec<usize> {
    let ratios: Vec<(usize, f64)> = ratios.collect();
    let Some(best) = ratios.iter().map(|r| r.1).min_by(f64::total_cmp) else {
        return Vec::new();
    };
    let slack = 1e-12 * (1.0 + best.abs());
    ratios.iter().filter(|r| r.1 <= best + slack).map(|r| r.0).collect()
}

/// Lexicographic minimum of `(B⁻¹ row) / a` among tied candidates.
fn lex_pick(t: &[f64], width: usize, n: usize, col: usize, mut cand: Vec<usize>, denom: impl Fn(f64) -> f64) -> usize {
    let mut k = 0;
    while cand.len() > 1 && k < n {
        let vals: Vec<f64> = cand.iter().map(|&i| t[i * width + k] / denom(t[i * width + col])).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let keep: Vec<usize> = cand
            .iter()
            .zip(&vals)
            .filter(|(_, &v)| v <= min + 1e-12 * (1.0 + min.abs()))
            .map(|(&i, _)| i)
            .collect();
        cand = keep;
        k += 1;
    }
    cand[0]
}

fn pivot(t: &mut [f64], width: usize, n: usize, r: usize, col: usize) {
    let p = t[r * width + col];
    for v in &mut t[r * width..(r + 1) * width] {
        *v /= p;
    }
    t[r * width + col] = 1.0;
    let prow: Vec<f64> = t[r * width..(r + 1) * width].to_vec();
    for i in 0..n {
        if i == r {
            continue;
        }
        let row = &mut t[i * width..(i + 1) * width];
        let f = row[col];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            row[col] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn check(m: &Matrix, q: &[f64], s: &LcpSolution) {
        let w = m.mul_vec(&s.z);
        for i in 0..q.len() {
            assert_abs_diff_eq!(w[i] + q[i], s.w[i], epsilon = 1e-9);
            assert!(s.z[i] >= 0.0 && s.w[i] >= 0.0);
            assert!(s.z[i] * s.w[i] <= 1e-12);
        }
    }

    #[test]
    fn trivial_when_q_nonnegative() {
        let m = Matrix::identity(2);
        let s = lemke(&m, &[1.0, 0.0], &[1.0, 1.0], &ToleranceSet::default()).unwrap();
        assert_eq!(s.z, vec![0.0, 0.0]);
        assert_eq!(s.pivots, 0);
    }

    #[test]
    fn positive_definite_instance() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let q = [-5.0, -6.0];
        let s = lemke(&m, &q, &[1.0, 1.0], &ToleranceSet::default()).unwrap();
        check(&m, &q, &s);
        assert_abs_diff_eq!(s.z[0], 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.z[1], 7.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_psd_instance() {
        // Skew part plus a zero diagonal block: the KKT system of a small LP.
        let m = Matrix::from_rows(&[
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![-1.0, -1.0, 0.0, 0.0],
            vec![-1.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        let q = [-1.0, -1.0, 2.0, 0.0];
        let s = lemke(&m, &q, &[1.0; 4], &ToleranceSet::default()).unwrap();
        check(&m, &q, &s);
    }

    #[test]
    fn infeasible_lcp_ends_on_ray() {
        // w = −z − 1 can never be non-negative.
        let m = Matrix::from_rows(&[vec![-1.0]]).unwrap();
        assert!(matches!(
            lemke(&m, &[-1.0], &[1.0], &ToleranceSet::default()),
            Err(GneError::RayTermination { .. })
        ));
    }
}

//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use scenario_gne::lp::{LinearProgram, LpStatus};
use scenario_gne::polytope::HalfspaceSystem;
use scenario_gne::{AggregativeGame, Matrix, ToleranceSet};

/// Solves the square system `A x = b` by Gaussian elimination with partial
/// pivoting; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Vertices of `{x : A x ≤ b, E x = f}` by trying every square subsystem.
pub fn vertices(a: &[Vec<f64>], b: &[f64], e: &[Vec<f64>], f: &[f64], n: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let need = n - e.len().min(n);
    for rows in combinations(a.len(), need) {
        let mut m: Vec<Vec<f64>> = e.to_vec();
        let mut rhs: Vec<f64> = f.to_vec();
        for &r in &rows {
            m.push(a[r].clone());
            rhs.push(b[r]);
        }
        if m.len() != n {
            continue;
        }
        let Some(x) = solve_square(m, rhs) else { continue };
        let ok = a
            .iter()
            .zip(b)
            .all(|(row, &bi)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bi + tol * (1.0 + bi.abs()));
        let ok_eq = e
            .iter()
            .zip(f)
            .all(|(row, &fi)| (row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - fi).abs() <= tol * (1.0 + fi.abs()));
        if ok && ok_eq {
            out.push(x);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleVerdict {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// `min cᵀx` subject to `A x ≤ b`, `x ≥ 0`, by vertex enumeration of the
/// (pointed) feasible set and of the normalised recession cone.
pub fn lp_oracle(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> OracleVerdict {
    let n = c.len();
    let mut rows = a.to_vec();
    let mut rhs = b.to_vec();
    for j in 0..n {
        let mut r = vec![0.0; n];
        r[j] = -1.0;
        rows.push(r);
        rhs.push(0.0);
    }
    let verts = vertices(&rows, &rhs, &[], &[], n, 1e-9);
    if verts.is_empty() {
        return OracleVerdict::Infeasible;
    }
    // Recession directions: A d ≤ 0, d ≥ 0, Σd = 1.
    let zeros = vec![0.0; rows.len()];
    let rays = vertices(&rows, &zeros, &[vec![1.0; n]], &[1.0], n, 1e-9);
    if rays.iter().any(|d| c.iter().zip(d).map(|(p, q)| p * q).sum::<f64>() < -1e-9) {
        return OracleVerdict::Unbounded;
    }
    let best = verts
        .iter()
        .map(|x| c.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    OracleVerdict::Optimal(best)
}

pub fn to_lp(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LinearProgram {
    let n = c.len();
    let mut lp = LinearProgram::new(n).minimize(c.to_vec());
    for (row, &bi) in a.iter().zip(b) {
        lp.push_ub(row, bi);
    }
    for j in 0..n {
        lp.set_bounds(j, 0.0, f64::INFINITY);
    }
    lp
}

/// Random small LP with integer data, giving a mix of all three statuses.
pub fn random_lp<R: Rng>(rng: &mut R) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=8);
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect())
        .collect();
    let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-4..=10) as f64).collect();
    (c, a, b)
}

pub fn status_matches(out: LpStatus, oracle: OracleVerdict) -> bool {
    matches!(
        (out, oracle),
        (LpStatus::Optimal, OracleVerdict::Optimal(_))
            | (LpStatus::Infeasible, OracleVerdict::Infeasible)
            | (LpStatus::Unbounded, OracleVerdict::Unbounded)
    )
}

/// Vertices of a bounded 2-D system (inequalities only).
pub fn polygon_vertices(sys: &HalfspaceSystem) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = (0..sys.num_rows()).map(|i| sys.a.row(i).to_vec()).collect();
    vertices(&rows, &sys.b, &[], &[], 2, 1e-9)
}

/// Gap function `max_{z ∈ K} F(y)ᵀ(y − z)` over a polygon given by its vertices.
pub fn gap(m: &Matrix, q: &[f64], verts: &[Vec<f64>], y: &[f64]) -> f64 {
    let f: Vec<f64> = m.mul_vec(y).iter().zip(q).map(|(a, b)| a + b).collect();
    let fy: f64 = f.iter().zip(y).map(|(a, b)| a * b).sum();
    verts
        .iter()
        .map(|z| fy - f.iter().zip(z).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random monotone affine 2-D game on a box cut by one random halfspace
/// that keeps the origin strictly feasible.
pub fn random_monotone_2d<R: Rng>(rng: &mut R) -> AggregativeGame {
    let tol = ToleranceSet::default();
    loop {
        // symmetric PSD part L Lᵀ plus a skew part
        let l = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let s = [[l[0] * l[0], l[0] * l[1]], [l[0] * l[1], l[1] * l[1] + l[2] * l[2]]];
        let rank_one = rng.gen_bool(0.3);
        let s = if rank_one {
            [[l[0] * l[0], l[0] * l[1]], [l[0] * l[1], l[1] * l[1]]]
        } else {
            s
        };
        let k = rng.gen_range(-2.0..2.0);
        let m = Matrix::from_rows(&[vec![s[0][0], s[0][1] + k], vec![s[1][0] - k, s[1][1]]]).unwrap();
        let q = vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let mut a = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let mut b = vec![2.0; 4];
        a.push(vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]);
        b.push(rng.gen_range(0.5..3.0));
        let a = Matrix::from_rows(&a).unwrap();
        if let Ok(g) = AggregativeGame::from_affine(m, q, a, b, &tol) {
            return g;
        }
    }
}

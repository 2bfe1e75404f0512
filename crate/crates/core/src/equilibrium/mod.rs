//! Variational equilibria of the affine game mapping.
//!
//! [`solve_vi`] produces one solution of `VI(X_K, F)` by complementary
//! pivoting on its KKT system. For monotone `F` every solution shares the
//! invariants `c = (M + Mᵀ)x` and `d = xᵀMx`, which is what makes
//! [`is_equilibrium`] and [`equilibrium_lift`] possible without ever listing
//! the equilibrium set.

pub mod extragradient;
pub mod lemke;

use crate::error::{GneError, Result};
use crate::game::AggregativeGame;
use crate::linalg::{dot, norm_inf, Matrix};
use crate::lp::{solve_lp, LpStatus};
use crate::polytope::{support_value, HalfspaceSystem, RowOrigin};
use crate::tolerance::ToleranceSet;
use serde::{Deserialize, Serialize};

pub use extragradient::{extragradient_box, ExtragradientOptions, ExtragradientResult};
pub use lemke::{lemke, LcpSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct VIProblem {
    pub mapping_matrix: Matrix,
    pub mapping_offset: Vec<f64>,
    pub feasible: HalfspaceSystem,
}

impl VIProblem {
    pub fn new(game: &AggregativeGame, feasible: HalfspaceSystem) -> Self {
        VIProblem {
            mapping_matrix: game.mapping_matrix.clone(),
            mapping_offset: game.mapping_offset.clone(),
            feasible,
        }
    }

    /// The coupling-free Nash problem over the local polytope.
    pub fn uncoupled(game: &AggregativeGame) -> Self {
        Self::new(game, game.local_system())
    }

    pub fn dim(&self) -> usize {
        self.mapping_offset.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViOptions {
    /// Covering vector for the pivoting scheme; all ones when `None`.
    /// Different vectors give different pivot paths to possibly different
    /// solutions.
    pub cover: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViSolution {
    pub x: Vec<f64>,
    /// Multipliers for the inequality rows, then for the equality rows.
    pub multipliers: Vec<f64>,
    pub eq_multipliers: Vec<f64>,
    pub pivots: usize,
    pub residual: KktResidual,
}

/// Components of the KKT error of a candidate `(x, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResidual {
    /// `‖Mx + q + Aᵀλ + Eᵀμ‖∞`
    pub stationarity: f64,
    /// `max(0, Ax − b)` and `|Ex − f|`
    pub primal: f64,
    /// `max(0, −λ)`
    pub dual: f64,
    /// `|λᵀ(b − Ax)|`
    pub complementarity: f64,
}

impl KktResidual {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.primal)
            .max(self.dual)
            .max(self.complementarity)
    }
}

pub fn kkt_residual(prob: &VIProblem, x: &[f64], lambda: &[f64], mu: &[f64]) -> KktResidual {
    let sys = &prob.feasible;
    let mut grad = prob.mapping_matrix.mul_vec(x);
    for (g, q) in grad.iter_mut().zip(&prob.mapping_offset) {
        *g += q;
    }
    let at = sys.a.tr_mul_vec(lambda);
    let et = if mu.is_empty() { vec![0.0; x.len()] } else { sys.eq_a.tr_mul_vec(mu) };
    let station: Vec<f64> = (0..x.len()).map(|j| grad[j] + at[j] + et[j]).collect();
    let slack: Vec<f64> = (0..sys.num_rows()).map(|i| sys.b[i] - dot(sys.a.row(i), x)).collect();
    let mut primal = slack.iter().fold(0.0_f64, |m, s| m.max(-s));
    for i in 0..sys.eq_b.len() {
        primal = primal.max((dot(sys.eq_a.row(i), x) - sys.eq_b[i]).abs());
    }
    KktResidual {
        stationarity: norm_inf(&station),
        primal,
        dual: lambda.iter().fold(0.0_f64, |m, l| m.max(-l)),
        complementarity: dot(lambda, &slack).abs(),
    }
}

/// Solves `VI(feasible, Mx + q)` through its KKT conditions.
///
/// The strategy vector is shifted to `u = x − (ℓ − 1) ≥ 0`, with `ℓ` the
/// coordinate-wise lower extent of the feasible set, so the KKT system
/// becomes a standard LCP in `(u, λ)` with matrix `[[M, Aᵀ], [−A, 0]]`. The
/// bounds `u ≥ 0` can never bind at a solution, since every feasible `x`
/// lies strictly above `ℓ − 1`.
pub fn solve_vi(prob: &VIProblem, opts: &ViOptions, tol: &ToleranceSet) -> Result<ViSolution> {
    let n = prob.dim();
    let sys = &prob.feasible;
    if prob.mapping_matrix.rows() != n || prob.mapping_matrix.cols() != n || sys.dim() != n {
        return Err(GneError::Dimension("VI data shapes disagree".into()));
    }

    let mut shift = vec![0.0; n];
    for (j, s) in shift.iter_mut().enumerate() {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        let lo = -support_value(sys, &e, tol)?.finite()?;
        *s = lo - 1.0;
    }

    // Equalities enter as opposing inequality pairs.
    let mut a = sys.a.clone();
    let mut b = sys.b.clone();
    for i in 0..sys.eq_b.len() {
        let row = sys.eq_a.row(i);
        a.push_row(row);
        b.push(sys.eq_b[i]);
        a.push_row(&row.iter().map(|v| -v).collect::<Vec<_>>());
        b.push(-sys.eq_b[i]);
    }
    let m_rows = b.len();
    let size = n + m_rows;

    let mut big = Matrix::zeros(size, size);
    big.set_block(0, 0, &prob.mapping_matrix);
    big.set_block(0, n, &a.transpose());
    big.set_block(n, 0, &a.scale(-1.0));
    let mut qq = prob.mapping_matrix.mul_vec(&shift);
    for (v, q) in qq.iter_mut().zip(&prob.mapping_offset) {
        *v += q;
    }
    let a_shift = a.mul_vec(&shift);
    qq.extend(b.iter().zip(&a_shift).map(|(bi, ai)| bi - ai));

    let cover = match &opts.cover {
        Some(c) if c.len() == size => c.clone(),
        Some(c) => {
            return Err(GneError::Dimension(format!(
                "covering vector has length {}, LCP size is {size}",
                c.len()
            )))
        }
        None => vec![1.0; size],
    };
    let sol = lemke(&big, &qq, &cover, tol)?;

    let x: Vec<f64> = shift.iter().zip(&sol.z[..n]).map(|(s, u)| s + u).collect();
    let nineq = sys.num_rows();
    let multipliers = sol.z[n..n + nineq].to_vec();
    let eq_multipliers: Vec<f64> = (0..sys.eq_b.len())
        .map(|i| sol.z[n + nineq + 2 * i] - sol.z[n + nineq + 2 * i + 1])
        .collect();
    let residual = kkt_residual(prob, &x, &multipliers, &eq_multipliers);
    let kkt_tol = tol.kkt * (1.0 + norm_inf(&prob.mapping_offset));
    if residual.max() > kkt_tol.max(tol.feasibility * (1.0 + norm_inf(&sys.b))) {
        return Err(GneError::Numerical(format!(
            "pivoting solution has KKT residual {:e}",
            residual.max()
        )));
    }
    Ok(ViSolution {
        x,
        multipliers,
        eq_multipliers,
        pivots: sol.pivots,
        residual,
    })
}

/// The pair `(c, d)` shared by every equilibrium, plus the point it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumInvariants {
    pub c: Vec<f64>,
    pub d: f64,
    pub witness: Vec<f64>,
}

/// `c = (M + Mᵀ)x₀`, `d = x₀ᵀMx₀` for an equilibrium `x₀` of the uncoupled problem.
pub fn compute_invariants(game: &AggregativeGame, witness: &[f64]) -> EquilibriumInvariants {
    let m = &game.mapping_matrix;
    let c = m.sym_sum().mul_vec(witness);
    let d = dot(witness, &m.mul_vec(witness));
    EquilibriumInvariants {
        c,
        d,
        witness: witness.to_vec(),
    }
}

/// Solves the uncoupled Nash problem and derives its invariants.
pub fn uncoupled_invariants(game: &AggregativeGame, tol: &ToleranceSet) -> Result<EquilibriumInvariants> {
    let sol = solve_vi(&VIProblem::uncoupled(game), &ViOptions::default(), tol)?;
    Ok(compute_invariants(game, &sol.x))
}

/// `ω(x) = min_{y ∈ sys} yᵀ(Mx + q)`.
pub fn omega(game: &AggregativeGame, sys: &HalfspaceSystem, x: &[f64], tol: &ToleranceSet) -> Result<f64> {
    let out = solve_lp(&sys.to_lp(game.mapping(x)), tol)?;
    match out.status {
        LpStatus::Optimal => Ok(out.value.unwrap()),
        LpStatus::Infeasible => Err(GneError::Infeasible("ω over an empty set".into())),
        LpStatus::Unbounded => Err(GneError::Unbounded("ω over an unbounded set".into())),
        LpStatus::NumericalFailure => Err(GneError::Numerical(out.diagnostic.unwrap_or_default())),
    }
}

/// Invariant-based membership test for the equilibrium set over `sys`.
///
/// `x` must satisfy `(M + Mᵀ)x = c`, lie in `sys`, and attain
/// `ω(x) ≥ d + qᵀx` with `ω` minimised over `sys` itself.
pub fn is_equilibrium(
    game: &AggregativeGame,
    inv: &EquilibriumInvariants,
    sys: &HalfspaceSystem,
    x: &[f64],
    tol: &ToleranceSet,
) -> Result<bool> {
    if x.len() != game.dim() || sys.dim() != game.dim() {
        return Err(GneError::Dimension("membership query dimension".into()));
    }
    let carrier = game.mapping_matrix.sym_sum().mul_vec(x);
    let eq_res = carrier.iter().zip(&inv.c).fold(0.0_f64, |m, (a, c)| m.max((a - c).abs()));
    if eq_res > tol.equilibrium {
        return Ok(false);
    }
    if !sys.contains(x, tol) {
        return Ok(false);
    }
    let w = omega(game, sys, x, tol)?;
    Ok(w - (inv.d + dot(&game.mapping_offset, x)) >= -tol.equilibrium)
}

/// Lifted description of `Ω₀ ∩ sys` in the variables `(x, λ)`,
/// `λ ∈ R^{rows of H}`:
///
/// ```text
/// x ∈ sys,  λ ≥ 0,  hᵀλ + qᵀx + d ≤ 0,  Hᵀλ + Mx + q = 0,  (M + Mᵀ)x = c
/// ```
///
/// By LP duality for `ω` over the local polytope, its projection onto `x`
/// is exactly the set of uncoupled equilibria that survive the rows of
/// `sys`. Row labels of `sys` carry over.
pub fn equilibrium_lift(game: &AggregativeGame, inv: &EquilibriumInvariants, sys: &HalfspaceSystem) -> HalfspaceSystem {
    let n = game.dim();
    let nl = game.local_b.len();
    let mut out = HalfspaceSystem::empty(n + nl);
    let pad = |row: &[f64], lam: &[f64]| -> Vec<f64> {
        let mut r = row.to_vec();
        r.extend_from_slice(lam);
        r
    };
    let zeros = vec![0.0; nl];
    for i in 0..sys.num_rows() {
        out.push_row(sys.labels[i], &pad(sys.a.row(i), &zeros), sys.b[i]);
    }
    for i in 0..sys.eq_b.len() {
        out.push_eq(&pad(sys.eq_a.row(i), &zeros), sys.eq_b[i]);
    }
    for k in 0..nl {
        let mut lam = vec![0.0; nl];
        lam[k] = -1.0;
        out.push_row(RowOrigin::Local, &pad(&vec![0.0; n], &lam), 0.0);
    }
    out.push_row(RowOrigin::Local, &pad(&game.mapping_offset, &game.local_b), -inv.d);
    let ht = game.local_a.transpose();
    for j in 0..n {
        out.push_eq(&pad(game.mapping_matrix.row(j), ht.row(j)), -game.mapping_offset[j]);
    }
    let s = game.mapping_matrix.sym_sum();
    for j in 0..n {
        out.push_eq(&pad(s.row(j), &zeros), inv.c[j]);
    }
    out
}

//! Dense two-phase primal simplex.
//!
//! Problems are brought into standard form (non-negative variables, equality
//! rows with slacks), phase one minimises the sum of artificials, phase two
//! the user objective. Dantzig pricing is used until the objective stalls for
//! `stall_threshold` pivots, after which Bland's rule takes over for the rest
//! of the phase. Ratio-test ties go to the row whose basic variable has the
//! lowest column index.

use crate::error::{GneError, Result};
use crate::linalg::{dot, norm_inf, Matrix};
use crate::tolerance::ToleranceSet;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// `minimize cᵀz  s.t.  A_ub z ≤ b_ub,  A_eq z = b_eq,  lo ≤ z ≤ hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub a_ub: Matrix,
    pub b_ub: Vec<f64>,
    pub a_eq: Matrix,
    pub b_eq: Vec<f64>,
    /// Per-variable `[lo, hi]`; either side may be infinite.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// `n` free variables, zero objective, no rows.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            a_ub: Matrix::zeros(0, n),
            b_ub: Vec::new(),
            a_eq: Matrix::zeros(0, n),
            b_eq: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn minimize(mut self, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), self.num_vars());
        self.objective = c;
        self
    }

    pub fn push_ub(&mut self, a: &[f64], b: f64) {
        self.a_ub.push_row(a);
        self.b_ub.push(b);
    }

    pub fn push_eq(&mut self, a: &[f64], b: f64) {
        self.a_eq.push_row(a);
        self.b_eq.push(b);
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.bounds[j] = (lo, hi);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |what: &str| Err(GneError::Dimension(format!("linear program: {what}")));
        if self.a_ub.rows() != self.b_ub.len() || (self.a_ub.rows() > 0 && self.a_ub.cols() != n) {
            return bad("inequality block shape");
        }
        if self.a_eq.rows() != self.b_eq.len() || (self.a_eq.rows() > 0 && self.a_eq.cols() != n) {
            return bad("equality block shape");
        }
        if self.bounds.len() != n {
            return bad("bounds length");
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.b_ub) || !finite(&self.b_eq) || !finite(&self.objective) {
            return Err(GneError::InvalidArgument("linear program has non-finite data".into()));
        }
        if !self.a_ub.all_finite() || !self.a_eq.all_finite() {
            return Err(GneError::InvalidArgument("linear program has non-finite coefficients".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return bad(&format!("variable {j} has malformed bounds"));
            }
        }
        Ok(())
    }

    /// Checks `z` against every row and bound at the scaled feasibility tolerance.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.a_ub.rows() {
            worst = worst.max(dot(self.a_ub.row(i), z) - self.b_ub[i]);
        }
        for i in 0..self.a_eq.rows() {
            worst = worst.max((dot(self.a_eq.row(i), z) - self.b_eq[i]).abs());
        }
        for (&zj, &(lo, hi)) in z.iter().zip(&self.bounds) {
            worst = worst.max(lo - zj).max(zj - hi);
        }
        worst
    }

    fn rhs_scale(&self) -> f64 {
        1.0 + norm_inf(&self.b_ub)
            .max(norm_inf(&self.b_eq))
            .max(self.bounds.iter().fold(0.0_f64, |m, &(lo, hi)| {
                let lo = if lo.is_finite() { lo.abs() } else { 0.0 };
                let hi = if hi.is_finite() { hi.abs() } else { 0.0 };
                m.max(lo).max(hi)
            }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// No admissible pivot above the pivot tolerance, the iteration cap was
    /// hit, or the final point failed verification.
    NumericalFailure,
}

/// Lagrange multipliers of an optimal solution.
///
/// With `r = c − A_ubᵀ y_ub − A_eqᵀ y_eq` the reduced costs, optimality means
/// `y_ub ≤ 0`, `r_j ≥ 0` at a lower bound and `r_j ≤ 0` at an upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Duals {
    pub ub: Vec<f64>,
    pub eq: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub point: Option<Vec<f64>>,
    pub value: Option<f64>,
    pub iterations: usize,
    pub duals: Option<Duals>,
    pub diagnostic: Option<String>,
}

impl LpOutcome {
    fn failed(status: LpStatus, iterations: usize, diagnostic: Option<String>) -> Self {
        LpOutcome {
            status,
            point: None,
            value: None,
            iterations,
            duals: None,
            diagnostic,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// One pivot of the tableau trajectory, for failure triage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotStep {
    pub phase: u8,
    pub iteration: usize,
    pub entering: usize,
    pub leaving: usize,
    pub objective: f64,
    pub bland: bool,
}

/// Writes a pivot trajectory as CSV.
pub fn write_trace_csv<W: Write>(mut w: W, steps: &[PivotStep]) -> std::io::Result<()> {
    writeln!(w, "phase,iteration,entering,leaving,objective,bland")?;
    for s in steps {
        writeln!(
            w,
            "{},{},{},{},{:.17e},{}",
            s.phase, s.iteration, s.entering, s.leaving, s.objective, s.bland
        )?;
    }
    Ok(())
}

pub fn solve_lp(lp: &LinearProgram, tol: &ToleranceSet) -> Result<LpOutcome> {
    Ok(Simplex::solve(lp, tol, false)?.0)
}

/// Like [`solve_lp`], also returning the pivot trajectory.
pub fn solve_lp_traced(lp: &LinearProgram, tol: &ToleranceSet) -> Result<(LpOutcome, Vec<PivotStep>)> {
    Simplex::solve(lp, tol, true)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible,
}

/// Phase-one verdict for `A_ub z ≤ b_ub, A_eq z = b_eq` within `bounds`.
pub fn check_feasible(
    a_ub: &Matrix,
    b_ub: &[f64],
    a_eq: &Matrix,
    b_eq: &[f64],
    bounds: &[(f64, f64)],
    tol: &ToleranceSet,
) -> Result<Feasibility> {
    let lp = LinearProgram {
        objective: vec![0.0; bounds.len()],
        a_ub: a_ub.clone(),
        b_ub: b_ub.to_vec(),
        a_eq: a_eq.clone(),
        b_eq: b_eq.to_vec(),
        bounds: bounds.to_vec(),
    };
    feasibility_of(&lp, tol)
}

/// Feasibility verdict for the constraints of `lp` (its objective is ignored).
pub fn feasibility_of(lp: &LinearProgram, tol: &ToleranceSet) -> Result<Feasibility> {
    let mut lp = lp.clone();
    lp.objective.iter_mut().for_each(|c| *c = 0.0);
    let out = solve_lp(&lp, tol)?;
    match out.status {
        LpStatus::Optimal => Ok(Feasibility::Feasible(out.point.expect("optimal has a point"))),
        LpStatus::Infeasible => Ok(Feasibility::Infeasible),
        LpStatus::Unbounded => unreachable!("zero objective cannot be unbounded"),
        LpStatus::NumericalFailure => Err(GneError::Numerical(
            out.diagnostic.unwrap_or_else(|| "feasibility check failed".into()),
        )),
    }
}

/// How an original variable maps onto non-negative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lo + u`
    Shift { col: usize, lo: f64 },
    /// `x = hi − u`
    Mirror { col: usize, hi: f64 },
    /// `x = u⁺ − u⁻`
    Split { pos: usize, neg: usize },
}

impl VarMap {
    fn offset(&self) -> f64 {
        match *self {
            VarMap::Shift { lo, .. } => lo,
            VarMap::Mirror { hi, .. } => hi,
            VarMap::Split { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowSource {
    Ub(usize),
    Eq(usize),
    Bound,
}

struct Simplex<'a> {
    tol: &'a ToleranceSet,
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    width: usize,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    /// First artificial column; artificials occupy `art_start..cols`.
    art_start: usize,
    /// Column holding the initial identity for each row.
    identity_col: Vec<usize>,
    /// `-1` if the row was negated to make its rhs non-negative.
    row_sign: Vec<f64>,
    source: Vec<RowSource>,
    iterations: usize,
    trace: Option<Vec<PivotStep>>,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    Breakdown(String),
}

impl<'a> Simplex<'a> {
    fn solve(lp: &LinearProgram, tol: &'a ToleranceSet, traced: bool) -> Result<(LpOutcome, Vec<PivotStep>)> {
        lp.validate()?;
        let n = lp.num_vars();
        let zero_tol = tol.pivot;

        // Variable mapping.
        let mut maps = Vec::with_capacity(n);
        let mut ncols = 0usize;
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for &(lo, hi) in &lp.bounds {
            let map = match (lo.is_finite(), hi.is_finite()) {
                (true, _) => {
                    if hi.is_finite() {
                        if hi < lo {
                            return Ok((LpOutcome::failed(LpStatus::Infeasible, 0, Some("empty variable bounds".into())), vec![]));
                        }
                        bound_rows.push((ncols, hi - lo));
                    }
                    ncols += 1;
                    VarMap::Shift { col: ncols - 1, lo }
                }
                (false, true) => {
                    ncols += 1;
                    VarMap::Mirror { col: ncols - 1, hi }
                }
                (false, false) => {
                    ncols += 2;
                    VarMap::Split { pos: ncols - 2, neg: ncols - 1 }
                }
            };
            maps.push(map);
        }
        let nstruct = ncols;
        let offset: Vec<f64> = maps.iter().map(VarMap::offset).collect();

        let to_std = |a: &[f64]| -> (Vec<f64>, f64) {
            let mut row = vec![0.0; nstruct];
            for (j, m) in maps.iter().enumerate() {
                match *m {
                    VarMap::Shift { col, .. } => row[col] = a[j],
                    VarMap::Mirror { col, .. } => row[col] = -a[j],
                    VarMap::Split { pos, neg } => {
                        row[pos] = a[j];
                        row[neg] = -a[j];
                    }
                }
            }
            (row, dot(a, &offset))
        };

        // Standard-form rows; all-zero rows are presolved away.
        let mut std_rows: Vec<(Vec<f64>, f64, bool, RowSource)> = Vec::new();
        for i in 0..lp.a_ub.rows() {
            let a = lp.a_ub.row(i);
            if a.iter().all(|v| v.abs() <= zero_tol) {
                if lp.b_ub[i] < -tol.feasibility * (1.0 + lp.b_ub[i].abs()) {
                    return Ok((LpOutcome::failed(LpStatus::Infeasible, 0, Some(format!("zero row {i} with negative rhs"))), vec![]));
                }
                continue;
            }
            let (row, shift) = to_std(a);
            std_rows.push((row, lp.b_ub[i] - shift, false, RowSource::Ub(i)));
        }
        for i in 0..lp.a_eq.rows() {
            let a = lp.a_eq.row(i);
            if a.iter().all(|v| v.abs() <= zero_tol) {
                if lp.b_eq[i].abs() > tol.feasibility * (1.0 + lp.b_eq[i].abs()) {
                    return Ok((LpOutcome::failed(LpStatus::Infeasible, 0, Some(format!("zero equality row {i} with nonzero rhs"))), vec![]));
                }
                continue;
            }
            let (row, shift) = to_std(a);
            std_rows.push((row, lp.b_eq[i] - shift, true, RowSource::Eq(i)));
        }
        for &(col, width) in &bound_rows {
            let mut row = vec![0.0; nstruct];
            row[col] = 1.0;
            std_rows.push((row, width, false, RowSource::Bound));
        }

        let m = std_rows.len();
        let nslack = std_rows.iter().filter(|r| !r.2).count();
        let needs_art: Vec<bool> = std_rows.iter().map(|(_, b, is_eq, _)| *is_eq || *b < 0.0).collect();
        let nart = needs_art.iter().filter(|&&x| x).count();
        let art_start = nstruct + nslack;
        let cols = art_start + nart;
        let width = cols + 1;

        let mut s = Simplex {
            tol,
            t: vec![0.0; m * width],
            width,
            rows: m,
            cols,
            basis: vec![0; m],
            art_start,
            identity_col: vec![0; m],
            row_sign: vec![1.0; m],
            source: Vec::with_capacity(m),
            iterations: 0,
            trace: traced.then(Vec::new),
        };
        let mut next_slack = nstruct;
        let mut next_art = art_start;
        for (i, (row, b, is_eq, src)) in std_rows.into_iter().enumerate() {
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            let r = &mut s.t[i * width..(i + 1) * width];
            for (dst, v) in r.iter_mut().zip(&row) {
                *dst = sign * v;
            }
            r[cols] = sign * b;
            if !is_eq {
                r[next_slack] = sign;
                if !needs_art[i] {
                    s.identity_col[i] = next_slack;
                }
                next_slack += 1;
            }
            if needs_art[i] {
                r[next_art] = 1.0;
                s.identity_col[i] = next_art;
                next_art += 1;
            }
            s.basis[i] = s.identity_col[i];
            s.row_sign[i] = sign;
            s.source.push(src);
        }

        // Phase one.
        if nart > 0 {
            let mut cost = vec![0.0; cols];
            cost[art_start..].iter_mut().for_each(|c| *c = 1.0);
            let mut obj = s.objective_row(&cost);
            match s.run_phase(&mut obj, 1, cols) {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded => {
                    return Ok((LpOutcome::failed(LpStatus::NumericalFailure, s.iterations, Some("phase one reported unbounded".into())), s.take_trace()));
                }
                PhaseEnd::Breakdown(msg) => {
                    return Ok((LpOutcome::failed(LpStatus::NumericalFailure, s.iterations, Some(msg)), s.take_trace()));
                }
            }
            let infeas = -obj[cols];
            if infeas > tol.feasibility * lp.rhs_scale() {
                return Ok((
                    LpOutcome::failed(LpStatus::Infeasible, s.iterations, Some(format!("phase one residual {infeas:e}"))),
                    s.take_trace(),
                ));
            }
            s.drive_out_artificials();
        }

        // Phase two.
        let mut cost = vec![0.0; cols];
        for (j, m) in maps.iter().enumerate() {
            let c = lp.objective[j];
            match *m {
                VarMap::Shift { col, .. } => cost[col] = c,
                VarMap::Mirror { col, .. } => cost[col] = -c,
                VarMap::Split { pos, neg } => {
                    cost[pos] = c;
                    cost[neg] = -c;
                }
            }
        }
        let mut obj = s.objective_row(&cost);
        match s.run_phase(&mut obj, 2, art_start) {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => {
                return Ok((LpOutcome::failed(LpStatus::Unbounded, s.iterations, None), s.take_trace()));
            }
            PhaseEnd::Breakdown(msg) => {
                return Ok((LpOutcome::failed(LpStatus::NumericalFailure, s.iterations, Some(msg)), s.take_trace()));
            }
        }

        // Recover the point in original coordinates.
        let mut u = vec![0.0; cols];
        for (i, &b) in s.basis.iter().enumerate() {
            u[b] = s.t[i * width + cols];
        }
        let point: Vec<f64> = maps
            .iter()
            .map(|m| match *m {
                VarMap::Shift { col, lo } => lo + u[col],
                VarMap::Mirror { col, hi } => hi - u[col],
                VarMap::Split { pos, neg } => u[pos] - u[neg],
            })
            .collect();
        let violation = lp.max_violation(&point);
        if violation > tol.feasibility * lp.rhs_scale() {
            return Ok((
                LpOutcome::failed(
                    LpStatus::NumericalFailure,
                    s.iterations,
                    Some(format!("recovered point violates constraints by {violation:e}")),
                ),
                s.take_trace(),
            ));
        }

        let mut duals = Duals {
            ub: vec![0.0; lp.b_ub.len()],
            eq: vec![0.0; lp.b_eq.len()],
        };
        for i in 0..s.rows {
            let y = -obj[s.identity_col[i]] * s.row_sign[i];
            match s.source[i] {
                RowSource::Ub(k) => duals.ub[k] = y,
                RowSource::Eq(k) => duals.eq[k] = y,
                RowSource::Bound => {}
            }
        }

        let value = dot(&lp.objective, &point);
        let trace = s.take_trace();
        Ok((
            LpOutcome {
                status: LpStatus::Optimal,
                point: Some(point),
                value: Some(value),
                iterations: s.iterations,
                duals: Some(duals),
                diagnostic: None,
            },
            trace,
        ))
    }

    fn take_trace(&mut self) -> Vec<PivotStep> {
        self.trace.take().unwrap_or_default()
    }

    /// Reduced-cost row `c − c_Bᵀ B⁻¹A`; the last entry holds `−c_Bᵀ B⁻¹ b`.
    fn objective_row(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let r = &self.t[i * self.width..(i + 1) * self.width];
            for (o, v) in obj.iter_mut().zip(r) {
                *o -= cb * v;
            }
        }
        obj
    }

    fn run_phase(&mut self, obj: &mut [f64], phase: u8, enter_limit: usize) -> PhaseEnd {
        let cmax = obj[..self.cols].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let opt_tol = 1e-9 * (1.0 + cmax);
        let mut bland = false;
        let mut stalled = 0usize;
        let mut last_obj = obj[self.cols];
        loop {
            if self.iterations >= self.tol.max_iterations {
                return PhaseEnd::Breakdown(format!("iteration cap {} reached", self.tol.max_iterations));
            }
            let entering = if bland {
                (0..enter_limit).find(|&j| obj[j] < -opt_tol)
            } else {
                let mut best = None;
                let mut best_val = -opt_tol;
                for (j, &d) in obj.iter().enumerate().take(enter_limit) {
                    if d < best_val {
                        best_val = d;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else {
                return PhaseEnd::Optimal;
            };

            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            let mut tiny_pivot = false;
            for i in 0..self.rows {
                let a = self.t[i * self.width + e];
                if a <= self.tol.pivot {
                    tiny_pivot |= a > self.tol.pivot * 1e-4;
                    continue;
                }
                let ratio = self.t[i * self.width + self.cols].max(0.0) / a;
                let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                match leave {
                    None => {
                        leave = Some(i);
                        best_ratio = ratio;
                    }
                    Some(l) if tie => {
                        if self.basis[i] < self.basis[l] {
                            leave = Some(i);
                            best_ratio = best_ratio.min(ratio);
                        }
                    }
                    Some(_) if ratio < best_ratio => {
                        leave = Some(i);
                        best_ratio = ratio;
                    }
                    _ => {}
                }
            }
            let Some(l) = leave else {
                if tiny_pivot {
                    return PhaseEnd::Breakdown(format!("only sub-tolerance pivots in column {e}"));
                }
                return PhaseEnd::Unbounded;
            };

            let leaving_var = self.basis[l];
            self.pivot(l, e, obj);
            self.iterations += 1;
            if let Some(tr) = self.trace.as_mut() {
                tr.push(PivotStep {
                    phase,
                    iteration: self.iterations,
                    entering: e,
                    leaving: leaving_var,
                    objective: -obj[self.cols],
                    bland,
                });
            }

            let cur = obj[self.cols];
            if (cur - last_obj).abs() <= 1e-13 * (1.0 + cur.abs()) {
                stalled += 1;
                if stalled >= self.tol.stall_threshold {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
            last_obj = cur;
        }
    }

    fn pivot(&mut self, l: usize, e: usize, obj: &mut [f64]) {
        let w = self.width;
        let p = self.t[l * w + e];
        for v in &mut self.t[l * w..(l + 1) * w] {
            *v /= p;
        }
        self.t[l * w + e] = 1.0;
        let (before, rest) = self.t.split_at_mut(l * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |r: &mut [f64]| {
            let f = r[e];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                r[e] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        let f = obj[e];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            obj[e] = 0.0;
        }
        self.basis[l] = e;
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent and get dropped.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows {
            if self.basis[i] < self.art_start {
                i += 1;
                continue;
            }
            let w = self.width;
            let mut best = None;
            let mut best_abs = self.tol.pivot;
            for j in 0..self.art_start {
                let a = self.t[i * w + j].abs();
                if a > best_abs {
                    best_abs = a;
                    best = Some(j);
                }
            }
            match best {
                Some(j) => {
                    let mut dummy = vec![0.0; w];
                    self.pivot(i, j, &mut dummy);
                    i += 1;
                }
                None => {
                    self.t.drain(i * w..(i + 1) * w);
                    self.basis.remove(i);
                    self.identity_col.remove(i);
                    self.row_sign.remove(i);
                    self.source.remove(i);
                    self.rows -= 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    #[test]
    fn unit_square_maximisation() {
        let mut lp = LinearProgram::new(2).minimize(vec![-1.0, -1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        let out = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        let p = out.point.unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.value.unwrap(), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new(1);
        lp.push_ub(&[1.0], -1.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        assert_eq!(solve_lp(&lp, &tol()).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn free_direction_is_unbounded() {
        let mut lp = LinearProgram::new(2).minimize(vec![1.0, 0.0]);
        lp.push_ub(&[0.0, 1.0], 1.0);
        assert_eq!(solve_lp(&lp, &tol()).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn feasibility_witness_and_verdicts() {
        let a = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        let none = Matrix::zeros(0, 1);
        let free = [(f64::NEG_INFINITY, f64::INFINITY)];
        match check_feasible(&a, &[1.0, 0.0], &none, &[], &free, &tol()).unwrap() {
            Feasibility::Feasible(w) => assert!((-1e-12..=1.0 + 1e-12).contains(&w[0])),
            Feasibility::Infeasible => panic!("expected feasible"),
        }
        assert_eq!(
            check_feasible(&a, &[0.0, -1.0], &none, &[], &free, &tol()).unwrap(),
            Feasibility::Infeasible
        );
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        // x + y = 1 stated twice, plus 2x + 2y = 2.
        let mut lp = LinearProgram::new(2).minimize(vec![1.0, 2.0]);
        lp.push_eq(&[1.0, 1.0], 1.0);
        lp.push_eq(&[1.0, 1.0], 1.0);
        lp.push_eq(&[2.0, 2.0], 2.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        lp.set_bounds(1, 0.0, f64::INFINITY);
        let out = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_abs_diff_eq!(out.value.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mirrored_and_shifted_bounds() {
        // min x - y, x ∈ [2, 5], y ≤ 3 and x + y ≥ 1
        let mut lp = LinearProgram::new(2).minimize(vec![1.0, -1.0]);
        lp.set_bounds(0, 2.0, 5.0);
        lp.set_bounds(1, f64::NEG_INFINITY, 3.0);
        lp.push_ub(&[-1.0, -1.0], -1.0);
        let out = solve_lp(&lp, &tol()).unwrap();
        let p = out.point.unwrap();
        assert_abs_diff_eq!(p[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn duals_close_the_gap() {
        let mut lp = LinearProgram::new(2).minimize(vec![-3.0, -2.0]);
        lp.push_ub(&[1.0, 1.0], 4.0);
        lp.push_ub(&[1.0, 3.0], 6.0);
        lp.set_bounds(0, 0.0, 3.0);
        lp.set_bounds(1, 0.0, f64::INFINITY);
        let out = solve_lp(&lp, &tol()).unwrap();
        let y = out.duals.unwrap();
        assert!(y.ub.iter().all(|&v| v <= 1e-12));
        let r = [
            -3.0 - y.ub[0] - y.ub[1],
            -2.0 - y.ub[0] - 3.0 * y.ub[1],
        ];
        let dual = 4.0 * y.ub[0] + 6.0 * y.ub[1] + if r[0] > 0.0 { 0.0 } else { 3.0 * r[0] };
        assert!(r[1] >= -1e-12);
        assert_abs_diff_eq!(out.value.unwrap(), dual, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_cycling_prone_problem() {
        // Beale's example, cycles under naive Dantzig pricing with
        // lowest-ratio-first ties.
        let mut lp = LinearProgram::new(4).minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.push_ub(&[0.25, -60.0, -0.04, 9.0], 0.0);
        lp.push_ub(&[0.5, -90.0, -0.02, 3.0], 0.0);
        lp.push_ub(&[0.0, 0.0, 1.0, 0.0], 1.0);
        for j in 0..4 {
            lp.set_bounds(j, 0.0, f64::INFINITY);
        }
        let out = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_abs_diff_eq!(out.value.unwrap(), -0.05, epsilon = 1e-10);
    }

    #[test]
    fn trace_is_recorded() {
        let mut lp = LinearProgram::new(2).minimize(vec![-1.0, -1.0]);
        lp.push_ub(&[1.0, 2.0], 4.0);
        lp.push_ub(&[3.0, 1.0], 6.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        lp.set_bounds(1, 0.0, f64::INFINITY);
        let (out, steps) = solve_lp_traced(&lp, &tol()).unwrap();
        assert_eq!(steps.len(), out.iterations);
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &steps).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("phase,iteration"));
        assert_eq!(text.lines().count(), steps.len() + 1);
    }

    #[test]
    fn nan_input_is_rejected() {
        let mut lp = LinearProgram::new(1);
        lp.push_ub(&[f64::NAN], 1.0);
        assert!(solve_lp(&lp, &tol()).is_err());
    }
}

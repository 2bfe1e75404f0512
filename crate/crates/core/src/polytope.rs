//! Queries over systems of halfspaces `Az ≤ b` (optionally with `Ez = f`).

use crate::error::{GneError, Result};
use crate::linalg::{dot, norm_inf, Matrix};
use crate::lp::{feasibility_of, solve_lp, Feasibility, LinearProgram, LpStatus};
use crate::tolerance::ToleranceSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Where an inequality row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOrigin {
    Local,
    /// One-based sample index.
    Sample(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSystem {
    pub a: Matrix,
    pub b: Vec<f64>,
    /// One label per inequality row.
    pub labels: Vec<RowOrigin>,
    pub eq_a: Matrix,
    pub eq_b: Vec<f64>,
}

impl HalfspaceSystem {
    pub fn empty(dim: usize) -> Self {
        HalfspaceSystem {
            a: Matrix::zeros(0, dim),
            b: Vec::new(),
            labels: Vec::new(),
            eq_a: Matrix::zeros(0, dim),
            eq_b: Vec::new(),
        }
    }

    /// All rows tagged as local constraints.
    pub fn local(a: Matrix, b: Vec<f64>) -> Self {
        assert_eq!(a.rows(), b.len());
        let dim = a.cols();
        HalfspaceSystem {
            labels: vec![RowOrigin::Local; b.len()],
            a,
            b,
            eq_a: Matrix::zeros(0, dim),
            eq_b: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn push_row(&mut self, origin: RowOrigin, a: &[f64], b: f64) {
        self.a.push_row(a);
        self.b.push(b);
        self.labels.push(origin);
    }

    /// Appends the rows of sample `k` (one-based).
    pub fn push_sample(&mut self, k: usize, a: &Matrix, b: &[f64]) {
        for (r, &br) in b.iter().enumerate().take(a.rows()) {
            self.push_row(RowOrigin::Sample(k), a.row(r), br);
        }
    }

    pub fn push_eq(&mut self, a: &[f64], f: f64) {
        self.eq_a.push_row(a);
        self.eq_b.push(f);
    }

    /// Distinct sample indices present, ascending.
    pub fn sample_indices(&self) -> BTreeSet<usize> {
        self.labels
            .iter()
            .filter_map(|l| match l {
                RowOrigin::Sample(k) => Some(*k),
                RowOrigin::Local => None,
            })
            .collect()
    }

    /// Keeps local rows and the rows of samples accepted by `keep`.
    pub fn filter_samples(&self, keep: impl Fn(usize) -> bool) -> HalfspaceSystem {
        let mut out = HalfspaceSystem::empty(self.dim());
        out.eq_a = self.eq_a.clone();
        out.eq_b = self.eq_b.clone();
        for (i, l) in self.labels.iter().enumerate() {
            let take = match l {
                RowOrigin::Local => true,
                RowOrigin::Sample(k) => keep(*k),
            };
            if take {
                out.push_row(*l, self.a.row(i), self.b[i]);
            }
        }
        out
    }

    /// Linear program over this system with the given objective.
    pub fn to_lp(&self, objective: Vec<f64>) -> LinearProgram {
        let mut lp = LinearProgram::new(self.dim()).minimize(objective);
        lp.a_ub = self.a.clone();
        lp.b_ub = self.b.clone();
        lp.a_eq = self.eq_a.clone();
        lp.b_eq = self.eq_b.clone();
        lp
    }

    fn feas_slack(&self, tol: &ToleranceSet) -> f64 {
        tol.feasibility * (1.0 + norm_inf(&self.b).max(norm_inf(&self.eq_b)))
    }

    /// Row-wise membership within the scaled feasibility tolerance.
    pub fn contains(&self, z: &[f64], tol: &ToleranceSet) -> bool {
        let slack = self.feas_slack(tol);
        (0..self.num_rows()).all(|i| dot(self.a.row(i), z) - self.b[i] <= slack)
            && (0..self.eq_b.len()).all(|i| (dot(self.eq_a.row(i), z) - self.eq_b[i]).abs() <= slack)
    }

    pub fn feasible_point(&self, tol: &ToleranceSet) -> Result<Option<Vec<f64>>> {
        Ok(match feasibility_of(&self.to_lp(vec![0.0; self.dim()]), tol)? {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SupportValue {
    Value(f64),
    Unbounded,
    Infeasible,
}

impl SupportValue {
    pub fn finite(self) -> Result<f64> {
        match self {
            SupportValue::Value(v) => Ok(v),
            SupportValue::Unbounded => Err(GneError::Unbounded("support value".into())),
            SupportValue::Infeasible => Err(GneError::Infeasible("support value of an empty system".into())),
        }
    }
}

/// `max dᵀz` over the system.
pub fn support_value(sys: &HalfspaceSystem, direction: &[f64], tol: &ToleranceSet) -> Result<SupportValue> {
    if direction.len() != sys.dim() {
        return Err(GneError::Dimension(format!(
            "direction has length {}, system dimension is {}",
            direction.len(),
            sys.dim()
        )));
    }
    let out = solve_lp(&sys.to_lp(direction.iter().map(|d| -d).collect()), tol)?;
    match out.status {
        LpStatus::Optimal => Ok(SupportValue::Value(-out.value.expect("optimal has a value"))),
        LpStatus::Unbounded => Ok(SupportValue::Unbounded),
        LpStatus::Infeasible => Ok(SupportValue::Infeasible),
        LpStatus::NumericalFailure => Err(GneError::Numerical(
            out.diagnostic.unwrap_or_else(|| "support value".into()),
        )),
    }
}

/// Maximiser of `dᵀz` together with the attained value.
pub fn support_point(sys: &HalfspaceSystem, direction: &[f64], tol: &ToleranceSet) -> Result<(f64, Vec<f64>)> {
    let out = solve_lp(&sys.to_lp(direction.iter().map(|d| -d).collect()), tol)?;
    match out.status {
        LpStatus::Optimal => Ok((-out.value.unwrap(), out.point.unwrap())),
        LpStatus::Unbounded => Err(GneError::Unbounded("support point".into())),
        LpStatus::Infeasible => Err(GneError::Infeasible("support point of an empty system".into())),
        LpStatus::NumericalFailure => Err(GneError::Numerical(out.diagnostic.unwrap_or_default())),
    }
}

/// Per-sample activity: which rows of each sample touch the feasible set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Activity {
    /// Sample index ↦ indices (into the system) of its touching rows.
    pub active_rows: BTreeMap<usize, Vec<usize>>,
}

impl Activity {
    pub fn samples(&self) -> BTreeSet<usize> {
        self.active_rows.keys().copied().collect()
    }
}

/// Row `r` touches the system when `max_{z∈sys} a_rᵀz ≥ b_r − τ(1 + |b_r|)`.
pub fn row_activity(sys: &HalfspaceSystem, tol: &ToleranceSet) -> Result<Activity> {
    if sys.feasible_point(tol)?.is_none() {
        return Err(GneError::Infeasible("activity query on an empty system".into()));
    }
    let sample_rows: Vec<(usize, usize)> = sys
        .labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| match l {
            RowOrigin::Sample(k) => Some((i, *k)),
            RowOrigin::Local => None,
        })
        .collect();
    let verdicts: Vec<Result<bool>> = sample_rows
        .par_iter()
        .map(|&(i, _)| {
            let b = sys.b[i];
            let sv = support_value(sys, sys.a.row(i), tol)?.finite()?;
            Ok(sv >= b - tol.activity * (1.0 + b.abs()))
        })
        .collect();
    let mut activity = Activity::default();
    for (&(i, k), v) in sample_rows.iter().zip(verdicts) {
        if v? {
            activity.active_rows.entry(k).or_default().push(i);
        }
    }
    Ok(activity)
}

/// Samples with at least one row touching the feasible set.
pub fn active_samples(sys: &HalfspaceSystem, tol: &ToleranceSet) -> Result<BTreeSet<usize>> {
    Ok(row_activity(sys, tol)?.samples())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

/// `[−σ(−d), σ(d)]` where `σ` is the support value.
pub fn extent_along(sys: &HalfspaceSystem, direction: &[f64], tol: &ToleranceSet) -> Result<Interval> {
    let hi = support_value(sys, direction, tol)?.finite()?;
    let neg: Vec<f64> = direction.iter().map(|d| -d).collect();
    let lo = -support_value(sys, &neg, tol)?.finite()?;
    Ok(Interval { lo, hi: hi.max(lo) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::box_rows;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    fn example_box() -> HalfspaceSystem {
        let (a, b) = box_rows(&[(-2.0, 2.0), (-2.0, 2.0)]);
        HalfspaceSystem::local(a, b)
    }

    #[test]
    fn support_of_boxes() {
        let (a, b) = box_rows(&[(0.0, 1.0), (0.0, 1.0)]);
        let unit = HalfspaceSystem::local(a, b);
        assert_eq!(support_value(&unit, &[1.0, 0.0], &tol()).unwrap(), SupportValue::Value(1.0));

        let mut sys = example_box();
        assert_abs_diff_eq!(support_value(&sys, &[1.0, 1.0], &tol()).unwrap().finite().unwrap(), 4.0, epsilon = 1e-12);
        sys.push_row(RowOrigin::Sample(1), &[1.0, 1.0], 1.0);
        assert_abs_diff_eq!(support_value(&sys, &[1.0, 1.0], &tol()).unwrap().finite().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn support_reports_unbounded_and_infeasible() {
        let mut half = HalfspaceSystem::empty(1);
        half.push_row(RowOrigin::Local, &[1.0], 0.0);
        assert_eq!(support_value(&half, &[-1.0], &tol()).unwrap(), SupportValue::Unbounded);
        half.push_row(RowOrigin::Local, &[-1.0], -1.0);
        assert_eq!(support_value(&half, &[1.0], &tol()).unwrap(), SupportValue::Infeasible);
    }

    #[test]
    fn no_samples_no_activity() {
        assert!(active_samples(&example_box(), &tol()).unwrap().is_empty());
    }

    #[test]
    fn slack_sample_is_inactive() {
        let mut sys = example_box();
        sys.push_row(RowOrigin::Sample(1), &[1.0, 1.0], 10.0);
        assert!(active_samples(&sys, &tol()).unwrap().is_empty());
    }

    #[test]
    fn only_the_binding_cut_is_active() {
        let mut sys = example_box();
        sys.push_row(RowOrigin::Sample(1), &[1.0, 1.0], 1.0);
        sys.push_row(RowOrigin::Sample(2), &[1.0, 1.0], 3.0);
        assert_eq!(active_samples(&sys, &tol()).unwrap(), BTreeSet::from([1]));
    }

    #[test]
    fn tangent_sample_counts_as_active() {
        let mut sys = example_box();
        // Touches the box only at the corner (2, 2).
        sys.push_row(RowOrigin::Sample(1), &[1.0, 1.0], 4.0);
        assert_eq!(active_samples(&sys, &tol()).unwrap(), BTreeSet::from([1]));
    }

    #[test]
    fn activity_on_empty_system_errors() {
        let mut sys = example_box();
        sys.push_row(RowOrigin::Sample(1), &[1.0, 0.0], -3.0);
        assert!(matches!(active_samples(&sys, &tol()), Err(GneError::Infeasible(_))));
    }

    #[test]
    fn extent_of_unit_box() {
        let (a, b) = box_rows(&[(0.0, 1.0), (0.0, 1.0)]);
        let iv = extent_along(&HalfspaceSystem::local(a, b), &[1.0, 0.0], &tol()).unwrap();
        assert_abs_diff_eq!(iv.lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(iv.hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn extent_of_clipped_equilibrium_line() {
        // x2 − x1 = 1 inside the box: segment (−2,−1)–(1,2), length 3√2.
        let mut sys = example_box();
        sys.push_eq(&[-1.0, 1.0], 1.0);
        let d = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        let iv = extent_along(&sys, &d, &tol()).unwrap();
        assert_abs_diff_eq!(iv.length(), 3.0 * 2f64.sqrt(), epsilon = 1e-10);

        // Adding x1 + x2 ≤ 0 moves the upper end to (−0.5, 0.5).
        sys.push_row(RowOrigin::Sample(1), &[1.0, 1.0], 0.0);
        let iv = extent_along(&sys, &d, &tol()).unwrap();
        assert_abs_diff_eq!(iv.hi, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(iv.lo, -3.0 / 2f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(iv.length(), 1.5 * 2f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn filter_keeps_local_rows() {
        let mut sys = example_box();
        sys.push_row(RowOrigin::Sample(1), &[1.0, 0.0], 1.0);
        sys.push_row(RowOrigin::Sample(2), &[0.0, 1.0], 1.0);
        let f = sys.filter_samples(|k| k == 2);
        assert_eq!(f.num_rows(), 5);
        assert_eq!(f.sample_indices(), BTreeSet::from([2]));
    }
}

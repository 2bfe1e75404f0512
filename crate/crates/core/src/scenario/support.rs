//! Counting support samples of a scenario program.

use super::ScenarioProgram;
use crate::equilibrium::{solve_vi, EquilibriumInvariants, VIProblem, ViOptions};
use crate::error::Result;
use crate::linalg::{dot, Matrix};
use crate::lp::{feasibility_of, Feasibility, LinearProgram};
use crate::polytope::{row_activity, RowOrigin};
use crate::tolerance::ToleranceSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleVerdict {
    /// No row of the sample touches `X_K`.
    Inactive,
    /// Touches `X_K` but no equilibrium sits on any of its rows.
    #[serde(rename = "active_infeasible_eq10")]
    ActiveNotSupport,
    Support,
    /// Would be a support sample but repeats the rows of an earlier one,
    /// so the pair is counted once.
    DuplicateSupport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportMethod {
    /// Feasibility of the dual characterisation on each active row.
    EquilibriumSet,
    /// Activity at the unique equilibrium of a strictly monotone game.
    UniqueEquilibrium,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportResult {
    pub active: BTreeSet<usize>,
    pub s_k: usize,
    pub v_k: usize,
    pub per_sample: BTreeMap<usize, SampleVerdict>,
    pub method: SupportMethod,
}

impl SupportResult {
    pub fn support_samples(&self) -> BTreeSet<usize> {
        self.per_sample
            .iter()
            .filter(|(_, v)| **v == SampleVerdict::Support)
            .map(|(k, _)| *k)
            .collect()
    }
}

/// Feasibility system over `(x, λ)` asking for an equilibrium of the
/// program on row `r` of the pooled set:
///
/// ```text
/// hᵀλ + qᵀx + d ≤ 0,   Hᵀλ − Mᵀx + c + q = 0,   x ∈ X_K,   a_rᵀx = b_r,   λ ≥ 0
/// ```
pub fn equilibrium_on_row_system(prog: &ScenarioProgram, inv: &EquilibriumInvariants, r: usize) -> LinearProgram {
    let game = &prog.game;
    let sys = &prog.combined;
    let n = game.dim();
    let nl = game.local_b.len();
    let mut lp = LinearProgram::new(n + nl);
    for k in 0..nl {
        lp.set_bounds(n + k, 0.0, f64::INFINITY);
    }
    let row = |x: &[f64], lam: &[f64]| -> Vec<f64> {
        let mut v = x.to_vec();
        v.extend_from_slice(lam);
        v
    };
    lp.push_ub(&row(&game.mapping_offset, &game.local_b), -inv.d);
    let ht: Matrix = game.local_a.transpose();
    let mt = game.mapping_matrix.transpose();
    for j in 0..n {
        let neg_mt: Vec<f64> = mt.row(j).iter().map(|v| -v).collect();
        lp.push_eq(&row(&neg_mt, ht.row(j)), -inv.c[j] - game.mapping_offset[j]);
    }
    let zeros = vec![0.0; nl];
    for i in 0..sys.num_rows() {
        lp.push_ub(&row(sys.a.row(i), &zeros), sys.b[i]);
    }
    for i in 0..sys.eq_b.len() {
        lp.push_eq(&row(sys.eq_a.row(i), &zeros), sys.eq_b[i]);
    }
    lp.push_eq(&row(sys.a.row(r), &zeros), sys.b[r]);
    lp
}

fn verdicts_for_all(prog: &ScenarioProgram, found: &BTreeMap<usize, SampleVerdict>) -> BTreeMap<usize, SampleVerdict> {
    (1..=prog.num_samples())
        .map(|k| (k, found.get(&k).copied().unwrap_or(SampleVerdict::Inactive)))
        .collect()
}

fn summarise(
    prog: &ScenarioProgram,
    active: BTreeSet<usize>,
    found: BTreeMap<usize, SampleVerdict>,
    method: SupportMethod,
) -> SupportResult {
    let mut per_sample = verdicts_for_all(prog, &found);
    let mut kept: Vec<&super::Scenario> = Vec::new();
    for s in &prog.scenarios {
        let v = per_sample.get_mut(&s.index).expect("every sample has a verdict");
        if *v != SampleVerdict::Support {
            continue;
        }
        if kept.iter().any(|t| t.a == s.a && t.b == s.b) {
            *v = SampleVerdict::DuplicateSupport;
        } else {
            kept.push(s);
        }
    }
    let s_k = per_sample.values().filter(|v| **v == SampleVerdict::Support).count();
    SupportResult {
        v_k: active.len(),
        active,
        s_k,
        per_sample,
        method,
    }
}

/// Support count over the whole equilibrium set.
///
/// A sample is active when one of its rows touches `X_K`, and a support
/// sample when some equilibrium of the program lies on one of those rows.
pub fn algorithm1_support_count(
    prog: &ScenarioProgram,
    inv: &EquilibriumInvariants,
    tol: &ToleranceSet,
) -> Result<SupportResult> {
    let activity = row_activity(&prog.combined, tol)?;
    let jobs: Vec<(usize, &Vec<usize>)> = activity.active_rows.iter().map(|(k, rows)| (*k, rows)).collect();
    let verdicts: Vec<Result<(usize, SampleVerdict)>> = jobs
        .par_iter()
        .map(|&(k, rows)| {
            for &r in rows {
                let lp = equilibrium_on_row_system(prog, inv, r);
                if let Feasibility::Feasible(_) = feasibility_of(&lp, tol)? {
                    return Ok((k, SampleVerdict::Support));
                }
            }
            Ok((k, SampleVerdict::ActiveNotSupport))
        })
        .collect();
    let found = verdicts.into_iter().collect::<Result<BTreeMap<_, _>>>()?;
    Ok(summarise(prog, activity.samples(), found, SupportMethod::EquilibriumSet))
}

/// Support count for a strictly monotone game: the samples with a row
/// binding at the unique equilibrium of the program.
pub fn direct_activity_count(prog: &ScenarioProgram, tol: &ToleranceSet) -> Result<SupportResult> {
    let activity = row_activity(&prog.combined, tol)?;
    let sol = solve_vi(
        &VIProblem::new(&prog.game, prog.combined.clone()),
        &ViOptions::default(),
        tol,
    )?;
    let sys = &prog.combined;
    let mut found: BTreeMap<usize, SampleVerdict> =
        activity.samples().into_iter().map(|k| (k, SampleVerdict::ActiveNotSupport)).collect();
    for (i, label) in sys.labels.iter().enumerate() {
        if let RowOrigin::Sample(k) = label {
            let b = sys.b[i];
            if (dot(sys.a.row(i), &sol.x) - b).abs() <= tol.activity * (1.0 + b.abs()) {
                found.insert(*k, SampleVerdict::Support);
            }
        }
    }
    Ok(summarise(prog, activity.samples(), found, SupportMethod::UniqueEquilibrium))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::uncoupled_invariants;
    use crate::game::{box_rows, two_player_example, AggregativeGame};
    use crate::scenario::Scenario;

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    fn program(rows: &[([f64; 2], f64)]) -> ScenarioProgram {
        let scenarios = rows
            .iter()
            .enumerate()
            .map(|(k, (a, b))| Scenario::new(k + 1, Matrix::from_rows(&[a.to_vec()]).unwrap(), vec![*b]).unwrap())
            .collect();
        ScenarioProgram::new(two_player_example(), scenarios, None).unwrap()
    }

    #[test]
    fn cut_through_the_segment_supports() {
        let p = program(&[([1.0, 1.0], 0.0)]);
        let inv = uncoupled_invariants(&p.game, &tol()).unwrap();
        let r = algorithm1_support_count(&p, &inv, &tol()).unwrap();
        assert_eq!((r.s_k, r.v_k), (1, 1));
        assert_eq!(r.per_sample[&1], SampleVerdict::Support);
    }

    #[test]
    fn cut_missing_the_segment_is_active_only() {
        // x₁ ≤ 1.5 trims the box corner but not the equilibrium segment,
        // which already ends at x₁ = 1.
        let p = program(&[([1.0, 0.0], 1.5)]);
        let inv = uncoupled_invariants(&p.game, &tol()).unwrap();
        let r = algorithm1_support_count(&p, &inv, &tol()).unwrap();
        assert_eq!((r.s_k, r.v_k), (0, 1));
        assert_eq!(r.per_sample[&1], SampleVerdict::ActiveNotSupport);
    }

    #[test]
    fn redundant_cut_is_inactive() {
        let p = program(&[([1.0, 1.0], 9.0)]);
        let inv = uncoupled_invariants(&p.game, &tol()).unwrap();
        let r = algorithm1_support_count(&p, &inv, &tol()).unwrap();
        assert_eq!((r.s_k, r.v_k), (0, 0));
        assert_eq!(r.per_sample[&1], SampleVerdict::Inactive);
    }

    #[test]
    fn strictly_monotone_direct_count() {
        let (a, b) = box_rows(&[(-1.0, 1.0), (-1.0, 1.0)]);
        let g = AggregativeGame::from_affine(Matrix::identity(2), vec![-2.0, -2.0], a, b, &tol()).unwrap();
        // The unique equilibrium is the box corner (1, 1); the first cut passes through it.
        let s = vec![
            Scenario::new(1, Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(), vec![2.0]).unwrap(),
            Scenario::new(2, Matrix::from_rows(&[vec![-1.0, 0.0]]).unwrap(), vec![0.5]).unwrap(),
        ];
        let p = ScenarioProgram::new(g, s, None).unwrap();
        let r = direct_activity_count(&p, &tol()).unwrap();
        assert_eq!(r.s_k, 1);
        assert_eq!(r.v_k, 2);
        assert_eq!(r.per_sample[&1], SampleVerdict::Support);
        let inv = uncoupled_invariants(&p.game, &tol()).unwrap();
        let full = algorithm1_support_count(&p, &inv, &tol()).unwrap();
        assert_eq!(full.per_sample, r.per_sample);
    }
}

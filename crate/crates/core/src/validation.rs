//! Gridding one-dimensional equilibrium sets and Monte-Carlo violation estimates.

use crate::equilibrium::{equilibrium_lift, is_equilibrium, EquilibriumInvariants};
use crate::error::{GneError, Result};
use crate::game::AggregativeGame;
use crate::linalg::symmetric_eigen;
use crate::polytope::{extent_along, support_point, HalfspaceSystem};
use crate::scenario::{fresh_scenarios, sample_scenarios, SamplerSpec, ScenarioProgram};
use crate::tolerance::ToleranceSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Unit direction spanning the null space of `M + Mᵀ`, with its first
/// nonzero entry positive. Errors unless that null space is a line.
pub fn carrier_direction(game: &AggregativeGame, tol: &ToleranceSet) -> Result<Vec<f64>> {
    let n = game.dim();
    let eig = symmetric_eigen(&game.mapping_matrix.sym_sum());
    let scale = eig.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let rank = eig.rank(tol.monotone * scale);
    if rank + 1 != n {
        return Err(GneError::NotASegment(format!(
            "M + Mᵀ has rank {rank}, a segment needs rank {}",
            n - 1
        )));
    }
    let k = (0..n)
        .min_by(|&i, &j| eig.values[i].abs().total_cmp(&eig.values[j].abs()))
        .unwrap();
    let mut v = eig.vector(k);
    if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(v)
}

fn lifted_direction(v: &[f64], lifted_dim: usize) -> Vec<f64> {
    let mut d = v.to_vec();
    d.resize(lifted_dim, 0.0);
    d
}

/// Length of `Ω₀ ∩ sys` along the carrier line; zero when empty.
pub fn equilibrium_length(
    game: &AggregativeGame,
    inv: &EquilibriumInvariants,
    sys: &HalfspaceSystem,
    tol: &ToleranceSet,
) -> Result<f64> {
    let v = carrier_direction(game, tol)?;
    let lift = equilibrium_lift(game, inv, sys);
    match extent_along(&lift, &lifted_direction(&v, lift.dim()), tol) {
        Ok(iv) => Ok(iv.length()),
        Err(GneError::Infeasible(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Endpoints of the segment `Ω₀ ∩ sys`, ordered along the carrier direction.
pub fn equilibrium_extrema(
    game: &AggregativeGame,
    inv: &EquilibriumInvariants,
    sys: &HalfspaceSystem,
    tol: &ToleranceSet,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = game.dim();
    let v = carrier_direction(game, tol)?;
    let lift = equilibrium_lift(game, inv, sys);
    let d = lifted_direction(&v, lift.dim());
    let neg: Vec<f64> = d.iter().map(|x| -x).collect();
    let empty = |e: GneError| match e {
        GneError::Infeasible(_) => GneError::Infeasible("equilibrium set is empty".into()),
        e => e,
    };
    let (_, lo) = support_point(&lift, &neg, tol).map_err(empty)?;
    let (_, hi) = support_point(&lift, &d, tol).map_err(empty)?;
    Ok((lo[..n].to_vec(), hi[..n].to_vec()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub mu: f64,
    pub x: Vec<f64>,
}

fn grid_parameters(granularity: f64) -> Result<Vec<f64>> {
    if !(granularity > 0.0 && granularity <= 1.0) {
        return Err(GneError::InvalidArgument(format!(
            "granularity {granularity} outside (0, 1]"
        )));
    }
    let mut mus = Vec::new();
    let mut j = 0usize;
    loop {
        let mu = j as f64 * granularity;
        if mu >= 1.0 - 1e-9 {
            break;
        }
        mus.push(mu);
        j += 1;
    }
    mus.push(1.0);
    Ok(mus)
}

/// Probes `(1 − μ)x¹ + μx²` for `μ = 0, g, 2g, …, 1`, each checked with
/// [`is_equilibrium`] against `sys`.
pub fn grid_equilibrium_set(
    game: &AggregativeGame,
    inv: &EquilibriumInvariants,
    sys: &HalfspaceSystem,
    granularity: f64,
    tol: &ToleranceSet,
) -> Result<Vec<Probe>> {
    let mus = grid_parameters(granularity)?;
    let (x1, x2) = equilibrium_extrema(game, inv, sys, tol)?;
    let probes: Vec<Probe> = mus
        .into_iter()
        .map(|mu| Probe {
            mu,
            x: x1.iter().zip(&x2).map(|(a, b)| (1.0 - mu) * a + mu * b).collect(),
        })
        .collect();
    let checks: Vec<Result<bool>> = probes
        .par_iter()
        .map(|p| is_equilibrium(game, inv, sys, &p.x, tol))
        .collect();
    for (p, ok) in probes.iter().zip(checks) {
        if !ok? {
            return Err(GneError::Numerical(format!(
                "grid point at mu = {} failed the membership test",
                p.mu
            )));
        }
    }
    Ok(probes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub grid: Vec<Probe>,
    pub per_point: Vec<f64>,
    pub set_violation: f64,
    pub n_fresh: usize,
    pub epsilon_bound: Option<f64>,
}

impl ViolationReport {
    /// Parameter `μ` of the probe with the largest violation frequency
    /// (the first one on ties).
    pub fn argmax_mu(&self) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for (p, &f) in self.grid.iter().zip(&self.per_point) {
            if best.is_none_or(|(_, bf)| f > bf) {
                best = Some((p.mu, f));
            }
        }
        best.map(|(mu, _)| mu)
    }

    pub fn max_frequency(&self) -> f64 {
        self.per_point.iter().copied().fold(0.0, f64::max)
    }

    /// `mu, x1, …, xn, violation_freq`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.grid.first().map_or(0, |p| p.x.len());
        let mut header = vec!["mu".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("violation_freq".into());
        writeln!(w, "{}", header.join(","))?;
        for (p, f) in self.grid.iter().zip(&self.per_point) {
            let mut cells = vec![p.mu.to_string()];
            cells.extend(p.x.iter().map(|v| v.to_string()));
            cells.push(f.to_string());
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Violation frequencies of each probe over fresh draws `0..n_fresh` of the
/// validation stream. A probe violates a draw when some row of it is
/// exceeded by more than the feasibility tolerance.
pub fn empirical_violation(
    probes: &[Probe],
    sampler: &SamplerSpec,
    n_fresh: usize,
    seed: u64,
    tol: &ToleranceSet,
) -> Result<ViolationReport> {
    if n_fresh == 0 {
        return Err(GneError::InvalidArgument("n_fresh must be at least 1".into()));
    }
    if let Some(p) = probes.first() {
        sampler.validate(p.x.len())?;
    }
    let draws = fresh_scenarios(sampler, 0, n_fresh, seed)?;
    let (counts, set_count) = draws
        .par_iter()
        .map(|s| {
            let hits: Vec<usize> = probes
                .iter()
                .map(|p| usize::from(s.max_excess(&p.x) > tol.feasibility))
                .collect();
            let any = usize::from(hits.contains(&1));
            (hits, any)
        })
        .reduce(
            || (vec![0; probes.len()], 0),
            |(mut a, sa), (b, sb)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, sa + sb)
            },
        );
    let n = n_fresh as f64;
    Ok(ViolationReport {
        grid: probes.to_vec(),
        per_point: counts.iter().map(|&c| c as f64 / n).collect(),
        set_violation: set_count as f64 / n,
        n_fresh,
        epsilon_bound: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub mean: f64,
    pub std: f64,
    pub per_trial: Vec<f64>,
}

/// `|Ω_K| / |Ω₀|` for each `K` in `k_grid` over `trials` independent
/// multisamples. Trial `t` draws its samples with seed `seed + t`, and the
/// smaller `K` use prefixes of the same multisample, so each trial sees
/// nested sets.
pub fn normalized_length_sweep(
    game: &AggregativeGame,
    inv: &EquilibriumInvariants,
    sampler: &SamplerSpec,
    k_grid: &[usize],
    trials: usize,
    seed: u64,
    tol: &ToleranceSet,
) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(GneError::InvalidArgument("trials must be at least 1".into()));
    }
    sampler.validate(game.dim())?;
    let k_max = k_grid.iter().copied().max().unwrap_or(0);
    let base = equilibrium_length(game, inv, &game.local_system(), tol)?;
    if base <= 0.0 {
        return Err(GneError::NotASegment("uncoupled equilibrium set has zero length".into()));
    }
    let per_trial: Vec<Result<Vec<f64>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let scenarios = sample_scenarios(sampler, k_max, seed.wrapping_add(t))?;
            let prog = ScenarioProgram::new(game.clone(), scenarios, Some(seed.wrapping_add(t)))?;
            k_grid
                .iter()
                .map(|&k| {
                    if k == 0 {
                        return Ok(1.0);
                    }
                    Ok(equilibrium_length(game, inv, &prog.prefix(k).combined, tol)? / base)
                })
                .collect()
        })
        .collect();
    let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(k_grid
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let vals: Vec<f64> = per_trial.iter().map(|r| r[j]).collect();
            let (mean, std) = mean_std(&vals);
            SweepRow {
                k,
                mean,
                std,
                per_trial: vals,
            }
        })
        .collect())
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "K,mean_normalized_length,std")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.k, r.mean, r.std)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::uncoupled_invariants;
    use crate::game::two_player_example;
    use crate::linalg::Matrix;
    use crate::polytope::RowOrigin;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    #[test]
    fn half_granularity_on_the_clipped_line() {
        let g = two_player_example();
        let inv = uncoupled_invariants(&g, &tol()).unwrap();
        let probes = grid_equilibrium_set(&g, &inv, &g.local_system(), 0.5, &tol()).unwrap();
        let want = [[-2.0, -1.0], [-0.5, 0.5], [1.0, 2.0]];
        assert_eq!(probes.len(), 3);
        for (p, w) in probes.iter().zip(want) {
            assert_abs_diff_eq!(p.x[0], w[0], epsilon = 1e-9);
            assert_abs_diff_eq!(p.x[1], w[1], epsilon = 1e-9);
        }
    }

    #[test]
    fn unit_granularity_gives_extrema() {
        let g = two_player_example();
        let inv = uncoupled_invariants(&g, &tol()).unwrap();
        let probes = grid_equilibrium_set(&g, &inv, &g.local_system(), 1.0, &tol()).unwrap();
        assert_eq!(probes.iter().map(|p| p.mu).collect::<Vec<_>>(), vec![0.0, 1.0]);
        assert_eq!(grid_parameters(0.01).unwrap().len(), 101);
        assert!(grid_parameters(0.0).is_err());
    }

    #[test]
    fn base_length_is_three_root_two() {
        let g = two_player_example();
        let inv = uncoupled_invariants(&g, &tol()).unwrap();
        let len = equilibrium_length(&g, &inv, &g.local_system(), &tol()).unwrap();
        assert_abs_diff_eq!(len, 3.0 * 2f64.sqrt(), epsilon = 1e-9);
        let mut sys = g.local_system();
        sys.push_row(RowOrigin::Sample(1), &[-1.0, 0.0], -1.5);
        assert_eq!(equilibrium_length(&g, &inv, &sys, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn strictly_monotone_is_not_a_segment() {
        let (a, b) = crate::game::box_rows(&[(-1.0, 1.0), (-1.0, 1.0)]);
        let g = AggregativeGame::from_affine(Matrix::identity(2), vec![0.0, 0.0], a, b, &tol()).unwrap();
        assert!(matches!(carrier_direction(&g, &tol()), Err(GneError::NotASegment(_))));
    }

    #[test]
    fn single_row_violation_examples() {
        let spec = |a: [f64; 2], b: f64| SamplerSpec::UniformHalfspace {
            coef_bounds: vec![[a[0], a[0]], [a[1], a[1]]],
            offset_bounds: [b, b],
        };
        let probe = |x: [f64; 2]| Probe { mu: 0.0, x: x.to_vec() };
        let r = empirical_violation(&[probe([0.0, 1.0])], &spec([1.0, 1.0], 4.0), 3, 0, &tol()).unwrap();
        assert_eq!(r.per_point, vec![0.0]);
        let r = empirical_violation(&[probe([1.0, 2.0])], &spec([1.0, 1.0], 0.0), 3, 0, &tol()).unwrap();
        assert_eq!(r.per_point, vec![1.0]);
        assert_eq!(r.set_violation, 1.0);
    }

    #[test]
    fn csv_columns() {
        let r = ViolationReport {
            grid: vec![Probe { mu: 0.0, x: vec![1.0, 2.0] }],
            per_point: vec![0.25],
            set_violation: 0.25,
            n_fresh: 4,
            epsilon_bound: None,
        };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "mu,x1,x2,violation_freq\n0,1,2,0.25\n");
    }

    #[test]
    fn sweep_starts_at_one() {
        let g = two_player_example();
        let inv = uncoupled_invariants(&g, &tol()).unwrap();
        let rows =
            normalized_length_sweep(&g, &inv, &SamplerSpec::two_player_example(), &[0, 5, 20], 2, 4, &tol()).unwrap();
        assert_eq!(rows[0].mean, 1.0);
        for t in 0..2 {
            assert!(rows[1].per_trial[t] <= 1.0);
            assert!(rows[2].per_trial[t] <= rows[1].per_trial[t]);
        }
    }
}

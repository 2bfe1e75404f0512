//! Built-in checks on the two-player example, run by `scenario-gne selftest`.

use crate::equilibrium::{solve_vi, uncoupled_invariants, VIProblem, ViOptions};
use crate::error::Result;
use crate::game::two_player_example;
use crate::linalg::Matrix;
use crate::scenario::{
    algorithm1_support_count, epsilon_even_split, run_certify, CertifyOptions, EpsilonFunction, SampleVerdict,
    SamplerSpec, Scenario, ScenarioProgram,
};
use crate::tolerance::ToleranceSet;
use crate::validation::{empirical_violation, grid_equilibrium_set, normalized_length_sweep};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match run() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every check with the given base seed.
pub fn run_selftest(seed: u64) -> Vec<Check> {
    let tol = ToleranceSet::default();
    let game = two_player_example();
    let sampler = SamplerSpec::two_player_example();
    let opts = CertifyOptions::default();
    let mut out = Vec::new();

    out.push(check("invariants", || {
        let sol = solve_vi(&VIProblem::uncoupled(&game), &ViOptions::default(), &tol)?;
        let inv = crate::equilibrium::compute_invariants(&game, &sol.x);
        let err = (inv.c[0] + 2.0).abs().max((inv.c[1] - 2.0).abs()).max((inv.d - 1.0).abs());
        Ok((err <= 1e-9, format!("c = {:?}, d = {}", inv.c, inv.d)))
    }));

    out.push(check("epsilon", || {
        let e = epsilon_even_split(100, 1e-6, 2)?;
        let want = 0.240_255_973_901_323_37;
        let mut sums_ok = true;
        for k in [10, 100, 1000] {
            let s = EpsilonFunction::even(k, 1e-6)?.defining_sum();
            sums_ok &= ((s - 1e-6) / 1e-6).abs() <= 1e-12;
        }
        Ok((
            ((e - want) / want).abs() <= 1e-12 && sums_ok,
            format!("eps(2) = {e}, defining sums ok = {sums_ok}"),
        ))
    }));

    out.push(check("support-geometry", || {
        let inv = uncoupled_invariants(&game, &tol)?;
        let rows = [([1.0, 1.0], 0.0), ([1.0, -1.0], 2.5), ([1.0, 1.0], 9.0)];
        let scenarios = rows
            .iter()
            .enumerate()
            .map(|(k, (a, b))| Scenario::new(k + 1, Matrix::from_rows(&[a.to_vec()]).unwrap(), vec![*b]))
            .collect::<Result<Vec<_>>>()?;
        let prog = ScenarioProgram::new(game.clone(), scenarios, None)?;
        let r = algorithm1_support_count(&prog, &inv, &tol)?;
        let want = [
            SampleVerdict::Support,
            SampleVerdict::ActiveNotSupport,
            SampleVerdict::Inactive,
        ];
        let got: Vec<_> = r.per_sample.values().copied().collect();
        Ok((got == want, format!("verdicts {got:?}")))
    }));

    out.push(check("sweep", || {
        let inv = uncoupled_invariants(&game, &tol)?;
        let rows = normalized_length_sweep(&game, &inv, &sampler, &[1, 10, 100, 1000], 10, seed, &tol)?;
        let monotone = (0..10).all(|t| rows.windows(2).all(|w| w[1].per_trial[t] <= w[0].per_trial[t]));
        let shrinks = rows[3].mean < rows[0].mean;
        Ok((
            monotone && shrinks,
            format!("mean at K=1 {:.4}, at K=1000 {:.4}", rows[0].mean, rows[3].mean),
        ))
    }));

    out.push(check("validate", || {
        let (prog, inv, cert) = run_certify(&game, &sampler, 100, 1e-6, seed, &opts)?;
        let probes = grid_equilibrium_set(&game, &inv, &prog.combined, 0.01, &tol)?;
        let report = empirical_violation(&probes, &sampler, 10_000, seed, &tol)?;
        let below = report.max_frequency() <= cert.epsilon_sk;
        let mu = report.argmax_mu().unwrap_or(0.5);
        let near_end = mu <= 0.1 || mu >= 0.9;
        Ok((
            below && near_end,
            format!(
                "s_K = {}, eps = {:.4}, max frequency {:.4} at mu = {mu}",
                cert.s_k,
                cert.epsilon_sk,
                report.max_frequency()
            ),
        ))
    }));

    out.push(check("proposition-1", || {
        let mut ok = true;
        for (i, k) in [5usize, 20, 100].into_iter().enumerate() {
            for t in 0..4u64 {
                let s = seed.wrapping_add(1000 * (i as u64 + 1) + t);
                let (_, _, c) = run_certify(&game, &sampler, k, 1e-6, s, &opts)?;
                ok &= c.s_k <= c.v_k && c.epsilon_sk <= c.epsilon_vk;
            }
        }
        Ok((ok, "s_K <= v_K and eps(s_K) <= eps(v_K) on 12 runs".into()))
    }));

    out
}

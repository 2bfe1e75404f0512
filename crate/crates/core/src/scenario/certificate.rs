//! A-posteriori robustness certificates.

use super::epsilon::EpsilonFunction;
use super::support::{algorithm1_support_count, direct_activity_count, SampleVerdict, SupportMethod, SupportResult};
use super::{sample_scenarios, SamplerSpec, ScenarioProgram};
use crate::equilibrium::{equilibrium_lift, uncoupled_invariants, EquilibriumInvariants};
use crate::error::Result;
use crate::game::{AggregativeGame, MonotonicityVerdict};
use crate::tolerance::ToleranceSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How support samples are counted when the equilibrium is unique.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingletonPolicy {
    /// Rows binding at the unique equilibrium.
    #[default]
    DirectActivity,
    /// The same feasibility systems used for monotone games.
    EquilibriumSet,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CertifyOptions {
    pub tol: ToleranceSet,
    pub singleton_policy: SingletonPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "K")]
    pub k: usize,
    pub beta: f64,
    #[serde(rename = "s_K")]
    pub s_k: usize,
    #[serde(rename = "v_K")]
    pub v_k: usize,
    #[serde(rename = "epsilon_sK")]
    pub epsilon_sk: f64,
    #[serde(rename = "epsilon_vK")]
    pub epsilon_vk: f64,
    pub seed: Option<u64>,
    pub per_sample: BTreeMap<usize, SampleVerdict>,
    pub method: SupportMethod,
    /// First prefix length whose equilibrium set came out empty, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty_from_prefix: Option<usize>,
}

/// Smallest `k` such that `Ω₀ ∩ X_k` is empty, or `None`.
///
/// The sets shrink as samples are added, so a bisection over prefix
/// lengths suffices.
pub fn first_empty_prefix(
    prog: &ScenarioProgram,
    inv: &EquilibriumInvariants,
    tol: &ToleranceSet,
) -> Result<Option<usize>> {
    let empty = |k: usize| -> Result<bool> {
        let p = prog.prefix(k);
        Ok(equilibrium_lift(&p.game, inv, &p.combined).feasible_point(tol)?.is_none())
    };
    let n = prog.num_samples();
    if !empty(n)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0, n);
    // empty(lo) is false (Ω₀ itself is nonempty), empty(hi) is true.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if empty(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn count_support(
    prog: &ScenarioProgram,
    inv: &EquilibriumInvariants,
    opts: &CertifyOptions,
) -> Result<SupportResult> {
    let verdict = prog.game.check_monotone(opts.tol.monotone).verdict;
    if verdict == MonotonicityVerdict::StrictlyMonotone && opts.singleton_policy == SingletonPolicy::DirectActivity {
        direct_activity_count(prog, &opts.tol)
    } else {
        algorithm1_support_count(prog, inv, &opts.tol)
    }
}

/// Runs the support count and evaluates the even-split `ε` at `s_K` and `v_K`.
pub fn certify(
    prog: &ScenarioProgram,
    inv: &EquilibriumInvariants,
    beta: f64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    let k = prog.num_samples();
    let eps = EpsilonFunction::even(k, beta)?;
    let empty_from_prefix = first_empty_prefix(prog, inv, &opts.tol)?;
    if let Some(p) = empty_from_prefix {
        log::warn!("equilibrium set of the uncoupled game misses X_k from prefix k = {p}; the certificate assumes it never does");
    }
    let support = count_support(prog, inv, opts)?;
    Ok(Certificate {
        k,
        beta,
        s_k: support.s_k,
        v_k: support.v_k,
        epsilon_sk: eps.eval(support.s_k)?,
        epsilon_vk: eps.eval(support.v_k)?,
        seed: prog.seed,
        per_sample: support.per_sample,
        method: support.method,
        empty_from_prefix,
    })
}

/// Sample, assemble, solve the uncoupled problem and certify.
pub fn run_certify(
    game: &AggregativeGame,
    sampler: &SamplerSpec,
    k: usize,
    beta: f64,
    seed: u64,
    opts: &CertifyOptions,
) -> Result<(ScenarioProgram, EquilibriumInvariants, Certificate)> {
    EpsilonFunction::even(k, beta)?;
    sampler.validate(game.dim())?;
    let scenarios = sample_scenarios(sampler, k, seed)?;
    let prog = ScenarioProgram::new(game.clone(), scenarios, Some(seed))?;
    let inv = uncoupled_invariants(game, &opts.tol)?;
    let cert = certify(&prog, &inv, beta, opts)?;
    Ok((prog, inv, cert))
}

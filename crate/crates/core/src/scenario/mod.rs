//! Sampled coupling constraints and the scenario program built from them.

pub mod certificate;
pub mod epsilon;
pub mod support;

use crate::error::{GneError, Result};
use crate::game::AggregativeGame;
use crate::linalg::Matrix;
use crate::polytope::HalfspaceSystem;
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use certificate::{certify, run_certify, Certificate, CertifyOptions, SingletonPolicy};
pub use epsilon::{epsilon_even_split, EpsilonFunction};
pub use support::{algorithm1_support_count, direct_activity_count, SampleVerdict, SupportMethod, SupportResult};

/// Stream domain for the samples that build the scenario program.
pub const TRAINING_DOMAIN: u64 = 0;
/// Stream domain for fresh validation draws.
pub const VALIDATION_DOMAIN: u64 = 1;

/// One realisation of the uncertainty: rows `A x ≤ b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// One-based position in the multisample.
    pub index: usize,
    pub a: Matrix,
    pub b: Vec<f64>,
}

impl Scenario {
    pub fn new(index: usize, a: Matrix, b: Vec<f64>) -> Result<Self> {
        if a.rows() == 0 || a.rows() != b.len() {
            return Err(GneError::Dimension(format!(
                "scenario {index}: {} rows against {} offsets",
                a.rows(),
                b.len()
            )));
        }
        if !a.all_finite() || b.iter().any(|v| !v.is_finite()) {
            return Err(GneError::InvalidArgument(format!("scenario {index} has non-finite entries")));
        }
        Ok(Scenario { index, a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    /// Largest row excess `a_rᵀx − b_r`.
    pub fn max_excess(&self, x: &[f64]) -> f64 {
        (0..self.a.rows())
            .map(|r| crate::linalg::dot(self.a.row(r), x) - self.b[r])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// How scenarios are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    /// Single halfspace `δ₁x₁ + … + δₙxₙ ≤ δₙ₊₁` with every entry uniform on its interval.
    UniformHalfspace {
        coef_bounds: Vec<[f64; 2]>,
        offset_bounds: [f64; 2],
    },
    /// A fixed list. The multisample takes it in order; fresh draws
    /// resample it uniformly with replacement.
    UserSupplied { scenarios: Vec<ScenarioDocument> },
}

impl SamplerSpec {
    /// `[−4,4]² × [4,10]`, the distribution of the two-player example.
    pub fn two_player_example() -> Self {
        SamplerSpec::UniformHalfspace {
            coef_bounds: vec![[-4.0, 4.0], [-4.0, 4.0]],
            offset_bounds: [4.0, 10.0],
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            SamplerSpec::UniformHalfspace {
                coef_bounds,
                offset_bounds,
            } => {
                if coef_bounds.len() != dim {
                    return Err(GneError::Dimension(format!(
                        "sampler has {} coefficient intervals, game dimension is {dim}",
                        coef_bounds.len()
                    )));
                }
                for [lo, hi] in coef_bounds.iter().chain(std::iter::once(offset_bounds)) {
                    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                        return Err(GneError::InvalidArgument(format!(
                            "malformed sampler interval [{lo}, {hi}]"
                        )));
                    }
                }
                Ok(())
            }
            SamplerSpec::UserSupplied { scenarios } => {
                for (k, s) in scenarios.iter().enumerate() {
                    let a = Matrix::from_rows(&s.a)
                        .ok_or_else(|| GneError::Dimension(format!("scenario {} has ragged rows", k + 1)))?;
                    if a.cols() != dim {
                        return Err(GneError::Dimension(format!(
                            "scenario {} has {} columns, game dimension is {dim}",
                            k + 1,
                            a.cols()
                        )));
                    }
                    Scenario::new(k + 1, a, s.b.clone())?;
                }
                Ok(())
            }
        }
    }

    /// Draw number `index` (zero-based) of the given stream domain.
    fn draw(&self, seed: u64, domain: u64, index: u64) -> Result<Scenario> {
        let mut rng = stream_rng(seed, domain, index);
        let one_based = index as usize + 1;
        match self {
            SamplerSpec::UniformHalfspace {
                coef_bounds,
                offset_bounds,
            } => {
                let row: Vec<f64> = coef_bounds.iter().map(|&[lo, hi]| uniform(&mut rng, lo, hi)).collect();
                let b = uniform(&mut rng, offset_bounds[0], offset_bounds[1]);
                Scenario::new(one_based, Matrix::from_rows(&[row]).unwrap(), vec![b])
            }
            SamplerSpec::UserSupplied { scenarios } => {
                if scenarios.is_empty() {
                    return Err(GneError::InvalidArgument("user-supplied sampler is empty".into()));
                }
                let pick = rng.gen_range(0..scenarios.len());
                let s = &scenarios[pick];
                let a = Matrix::from_rows(&s.a).ok_or_else(|| GneError::Dimension("ragged scenario".into()))?;
                Scenario::new(one_based, a, s.b.clone())
            }
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        Uniform::new_inclusive(lo, hi).sample(rng)
    }
}

/// Counter-based generator: draw `index` of `domain` depends only on
/// `(seed, domain, index)`, never on how many other draws happened first.
pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// The `K`-multisample. Scenario `k` (one-based) comes from stream `k − 1`.
pub fn sample_scenarios(spec: &SamplerSpec, k: usize, seed: u64) -> Result<Vec<Scenario>> {
    match spec {
        SamplerSpec::UniformHalfspace { coef_bounds, .. } => {
            spec.validate(coef_bounds.len())?;
            (0..k as u64)
                .into_par_iter()
                .map(|i| spec.draw(seed, TRAINING_DOMAIN, i))
                .collect()
        }
        SamplerSpec::UserSupplied { scenarios } => {
            if k > scenarios.len() {
                return Err(GneError::InvalidArgument(format!(
                    "requested {k} scenarios but only {} were supplied",
                    scenarios.len()
                )));
            }
            scenarios[..k]
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let a = Matrix::from_rows(&s.a)
                        .ok_or_else(|| GneError::Dimension(format!("scenario {} has ragged rows", i + 1)))?;
                    Scenario::new(i + 1, a, s.b.clone())
                })
                .collect()
        }
    }
}

/// Fresh draws `start..start + count` of the validation stream.
pub fn fresh_scenarios(spec: &SamplerSpec, start: usize, count: usize, seed: u64) -> Result<Vec<Scenario>> {
    (start as u64..(start + count) as u64)
        .into_par_iter()
        .map(|i| spec.draw(seed, VALIDATION_DOMAIN, i))
        .collect()
}

/// A game together with its multisample and the pooled feasible set `X_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioProgram {
    pub game: AggregativeGame,
    pub scenarios: Vec<Scenario>,
    pub seed: Option<u64>,
    pub combined: HalfspaceSystem,
}

impl ScenarioProgram {
    pub fn new(game: AggregativeGame, scenarios: Vec<Scenario>, seed: Option<u64>) -> Result<Self> {
        let mut combined = game.local_system();
        for (pos, s) in scenarios.iter().enumerate() {
            if s.dim() != game.dim() {
                return Err(GneError::Dimension(format!(
                    "scenario {} has {} columns, game dimension is {}",
                    s.index,
                    s.dim(),
                    game.dim()
                )));
            }
            if s.index != pos + 1 {
                return Err(GneError::InvalidArgument(format!(
                    "scenario at position {} carries index {}",
                    pos + 1,
                    s.index
                )));
            }
            combined.push_sample(s.index, &s.a, &s.b);
        }
        Ok(ScenarioProgram {
            game,
            scenarios,
            seed,
            combined,
        })
    }

    pub fn num_samples(&self) -> usize {
        self.scenarios.len()
    }

    /// Program built from the first `k` scenarios.
    pub fn prefix(&self, k: usize) -> ScenarioProgram {
        ScenarioProgram::new(self.game.clone(), self.scenarios[..k].to_vec(), self.seed)
            .expect("prefix of a valid program is valid")
    }

    /// Same samples in a new order, re-indexed by position.
    pub fn reordered(&self, order: &[usize]) -> Result<ScenarioProgram> {
        let scenarios = order
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let s = &self.scenarios[i];
                Scenario::new(pos + 1, s.a.clone(), s.b.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        ScenarioProgram::new(self.game.clone(), scenarios, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::two_player_example;

    #[test]
    fn zero_samples() {
        assert!(sample_scenarios(&SamplerSpec::two_player_example(), 0, 7).unwrap().is_empty());
    }

    #[test]
    fn example_draws_respect_support() {
        let s = sample_scenarios(&SamplerSpec::two_player_example(), 3, 11).unwrap();
        assert_eq!(s.len(), 3);
        for (k, sc) in s.iter().enumerate() {
            assert_eq!(sc.index, k + 1);
            assert_eq!(sc.a.rows(), 1);
            assert!(sc.a.row(0).iter().all(|v| (-4.0..=4.0).contains(v)));
            assert!((4.0..=10.0).contains(&sc.b[0]));
        }
    }

    #[test]
    fn draws_are_reproducible_and_prefix_stable() {
        let spec = SamplerSpec::two_player_example();
        let a = sample_scenarios(&spec, 10, 5).unwrap();
        let b = sample_scenarios(&spec, 4, 5).unwrap();
        assert_eq!(&a[..4], &b[..]);
        let c = sample_scenarios(&spec, 10, 6).unwrap();
        assert_ne!(a, c);
        let fresh = fresh_scenarios(&spec, 0, 4, 5).unwrap();
        assert_ne!(fresh[0].b, a[0].b);
    }

    #[test]
    fn user_supplied_passthrough() {
        let spec = SamplerSpec::UserSupplied {
            scenarios: vec![ScenarioDocument {
                a: vec![vec![1.0, 1.0]],
                b: vec![0.0],
            }],
        };
        let s = sample_scenarios(&spec, 1, 0).unwrap();
        assert_eq!(s[0].a.row(0), &[1.0, 1.0]);
        assert_eq!(s[0].b, vec![0.0]);
        assert!(sample_scenarios(&spec, 2, 0).is_err());
    }

    #[test]
    fn malformed_box_rejected() {
        let spec = SamplerSpec::UniformHalfspace {
            coef_bounds: vec![[1.0, -1.0]],
            offset_bounds: [0.0, 1.0],
        };
        assert!(matches!(sample_scenarios(&spec, 1, 0), Err(GneError::InvalidArgument(_))));
    }

    #[test]
    fn program_pools_rows() {
        let g = two_player_example();
        let s = sample_scenarios(&SamplerSpec::two_player_example(), 5, 1).unwrap();
        let p = ScenarioProgram::new(g, s, Some(1)).unwrap();
        assert_eq!(p.combined.num_rows(), 4 + 5);
        assert_eq!(p.combined.sample_indices().len(), 5);
        assert_eq!(p.prefix(2).combined.num_rows(), 6);
    }

    #[test]
    fn sampler_json_shape() {
        let spec: SamplerSpec = serde_json::from_str(
            r#"{"kind":"uniform_halfspace","coef_bounds":[[-4,4],[-4,4]],"offset_bounds":[4,10]}"#,
        )
        .unwrap();
        assert_eq!(spec, SamplerSpec::two_player_example());
    }
}

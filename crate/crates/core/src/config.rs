//! Run configuration for the command-line pipelines.

use crate::error::{GneError, Result};
use crate::game::{AggregativeGame, GameDocument};
use crate::scenario::{SamplerSpec, SingletonPolicy};
use crate::tolerance::ToleranceSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSource {
    /// Path to a game document, relative to the config file.
    Path(PathBuf),
    Inline(GameDocument),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub game: GameSource,
    pub sampler: SamplerSpec,
    #[serde(rename = "K")]
    pub k: usize,
    pub beta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "K_grid", default = "default_k_grid")]
    pub k_grid: Vec<usize>,
    #[serde(default = "default_granularity")]
    pub granularity: f64,
    #[serde(default = "default_n_fresh")]
    pub n_fresh: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub singleton_policy: SingletonPolicy,
    #[serde(default)]
    pub tolerances: ToleranceSet,
}

fn default_k_grid() -> Vec<usize> {
    vec![1, 10, 100, 1000]
}
fn default_granularity() -> f64 {
    0.01
}
fn default_n_fresh() -> usize {
    10_000
}
fn default_trials() -> usize {
    10
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// The two-player example with `K = 100`, `β = 10⁻⁶`.
    pub fn two_player_example(seed: u64) -> Self {
        let text = include_str!("../configs/two_player.json");
        let mut cfg: RunConfig = serde_json::from_str(text).expect("bundled config parses");
        cfg.seed = seed;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(GneError::InvalidArgument(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(GneError::InvalidArgument(format!(
                "beta out of range: {} not in (0, 1)",
                self.beta
            )));
        }
        if !(self.granularity > 0.0 && self.granularity <= 1.0) {
            return Err(GneError::InvalidArgument(format!(
                "granularity out of range: {} not in (0, 1]",
                self.granularity
            )));
        }
        if self.n_fresh == 0 {
            return Err(GneError::InvalidArgument("n_fresh must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(GneError::InvalidArgument("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// A validated config with its game assembled and its hash recorded.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub game: AggregativeGame,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_in(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses `text`, resolving a game path against `base`.
    pub fn from_str_in(text: &str, base: &Path) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)?;
        config.validate()?;
        let game = match &config.game {
            GameSource::Inline(doc) => doc.clone().into_game(&config.tolerances)?,
            GameSource::Path(p) => AggregativeGame::from_json_file(&base.join(p), &config.tolerances)?,
        };
        config.sampler.validate(game.dim())?;
        Ok(LoadedConfig {
            config,
            game,
            sha256: sha256_hex(text.as_bytes()),
        })
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            config_sha256: self.sha256.clone(),
            seed: self.config.seed,
            toolkit_version: crate::TOOLKIT_VERSION.to_string(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub toolkit_version: String,
}

impl Provenance {
    /// Comment line for CSV outputs.
    pub fn csv_comment(&self) -> String {
        format!(
            "# config_sha256={} seed={} toolkit_version={}",
            self.config_sha256, self.seed, self.toolkit_version
        )
    }
}

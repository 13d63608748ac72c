//! Run configuration: one TOML file covering reward, geometry, agent,
//! evaluation, smoothing, and output settings, with defaults matching the
//! reference experiment.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::{AgentConfig, AgentKind};
use crate::error::{Error, Result};
use crate::eval::probe::ExperimentConfig;
use crate::eval::stats::{smooth_ema, smooth_pairwise};
use crate::map::{build_map, WorldMap};
use crate::mvt::RewardParams;

/// Corridor padding around the patches, in tiles.
pub const CORRIDOR_MARGIN: u32 = 1;

/// Reward curve parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardSection {
    #[serde(rename = "N")]
    pub peak: f64,
    pub lambda: f64,
}

impl Default for RewardSection {
    fn default() -> RewardSection {
        RewardSection { peak: 30.0, lambda: 0.01 }
    }
}

/// World geometry and episode length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvSection {
    /// Nearest-edge patch distances, one scenario per entry.
    pub distances: Vec<u32>,
    pub patch_side: u32,
    pub view_radius: u32,
    pub episode_steps: u32,
}

impl Default for EnvSection {
    fn default() -> EnvSection {
        EnvSection {
            distances: vec![3, 5, 7, 9],
            patch_side: 3,
            view_radius: 2,
            episode_steps: 1500,
        }
    }
}

/// Agent kind plus learning hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSection {
    pub kind: AgentKind,
    pub alpha: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub horizon: u32,
    pub lambda_return: f64,
    pub cue_bins: u16,
    pub episodes: u32,
    pub value_sweeps: u32,
}

impl Default for AgentSection {
    fn default() -> AgentSection {
        let agent = AgentConfig::default();
        AgentSection {
            kind: AgentKind::ModelBased,
            alpha: agent.alpha,
            epsilon: agent.epsilon,
            gamma: agent.gamma,
            horizon: agent.horizon,
            lambda_return: agent.lambda_return,
            cue_bins: agent.cue_bins,
            episodes: agent.episodes,
            value_sweeps: agent.value_sweeps,
        }
    }
}

/// Probe protocol settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub repetitions: u32,
    pub occupancy_steps: u32,
    pub master_seed: u64,
}

impl Default for EvalSection {
    fn default() -> EvalSection {
        EvalSection { repetitions: 25, occupancy_steps: 1000, master_seed: 7 }
    }
}

/// Which smoothing rule the learning-curve export uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingMode {
    /// Running exponential average over the whole history.
    Ema,
    /// Weighted blend of each consecutive pair only.
    Pairwise,
}

impl SmoothingMode {
    /// Apply this rule to a series.
    pub fn apply(self, series: &[f64], omega: f64) -> Result<Vec<f64>> {
        match self {
            SmoothingMode::Ema => smooth_ema(series, omega),
            SmoothingMode::Pairwise => smooth_pairwise(series, omega),
        }
    }
}

/// Learning-curve smoothing settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingSection {
    pub omega: f64,
    pub mode: SmoothingMode,
}

impl Default for SmoothingSection {
    fn default() -> SmoothingSection {
        SmoothingSection { omega: 0.95, mode: SmoothingMode::Ema }
    }
}

/// Where artifacts and reports go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> OutputSection {
        OutputSection { dir: "out".into() }
    }
}

/// The full run configuration. Every key is optional in the file and falls
/// back to the reference defaults; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub reward: RewardSection,
    pub env: EnvSection,
    pub agent: AgentSection,
    pub eval: EvalSection,
    pub smoothing: SmoothingSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Read and parse a TOML config file without validating it.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_str(&text)
            .map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    /// Check every section against the owning module's invariants.
    pub fn validate(&self) -> Result<()> {
        self.reward_params()?;
        if self.env.distances.is_empty() {
            return Err(Error::Config("env.distances must list at least one scenario".into()));
        }
        let mut seen = self.env.distances.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("env.distances must not repeat a distance".into()));
        }
        if self.env.view_radius < 1 {
            return Err(Error::Config("env.view_radius must be at least 1".into()));
        }
        // Geometry invariants (distance, patch_side, episode_steps) surface
        // through the map builder on the smallest scenario.
        let first = self.env.distances[0];
        build_map(first, self.env.patch_side, CORRIDOR_MARGIN)?
            .with_episode_steps(self.env.episode_steps)
            .validate()?;
        self.agent_config().validate()?;
        self.experiment_config().validate()?;
        if !(0.0..=1.0).contains(&self.smoothing.omega) {
            return Err(Error::Config(format!(
                "smoothing.omega must lie in [0, 1], got {}",
                self.smoothing.omega
            )));
        }
        if self.output.dir.is_empty() {
            return Err(Error::Config("output.dir must not be empty".into()));
        }
        Ok(())
    }

    /// Reward parameters as the solver type.
    pub fn reward_params(&self) -> Result<RewardParams> {
        RewardParams::new(self.reward.peak, self.reward.lambda)
    }

    /// Agent hyperparameters as the training type.
    pub fn agent_config(&self) -> AgentConfig {
        AgentConfig {
            alpha: self.agent.alpha,
            epsilon: self.agent.epsilon,
            gamma: self.agent.gamma,
            horizon: self.agent.horizon,
            lambda_return: self.agent.lambda_return,
            cue_bins: self.agent.cue_bins,
            episodes: self.agent.episodes,
            value_sweeps: self.agent.value_sweeps,
        }
    }

    /// Probe protocol parameters as the evaluation type.
    pub fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            distances: self.env.distances.clone(),
            repetitions: self.eval.repetitions,
            episode_steps: self.env.episode_steps,
            occupancy_steps: self.eval.occupancy_steps,
            master_seed: self.eval.master_seed,
        }
    }

    /// Build one world per configured distance, in listed order.
    pub fn maps(&self) -> Result<Vec<WorldMap>> {
        self.env
            .distances
            .iter()
            .map(|&d| {
                Ok(build_map(d, self.env.patch_side, CORRIDOR_MARGIN)?
                    .with_episode_steps(self.env.episode_steps))
            })
            .collect()
    }
}

impl FromStr for RunConfig {
    type Err = toml::de::Error;

    fn from_str(text: &str) -> std::result::Result<RunConfig, toml::de::Error> {
        toml::from_str(text)
    }
}

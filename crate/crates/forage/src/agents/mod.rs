//! Learning agents: a model-free temporal-difference learner and a
//! model-based planner that dreams through a learned transition table.
//!
//! Both agents act on the same compact observation encoding and share one
//! action-value table type; the model-based agent additionally maintains a
//! [`model::WorldModel`] it plans against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod artifact;
pub mod encoder;
pub mod model;
pub mod planner;
pub mod qtable;
pub mod train;

pub use artifact::{PolicyArtifact, RuntimePolicy};
pub use encoder::{CompactState, StateEncoder};
pub use model::{ImaginedStep, ImaginedTrajectory, WorldModel};
pub use qtable::QTable;
pub use train::{train, TrainResult};

/// Which learning rule drives the agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    /// Tabular one-step temporal-difference control; no transition model.
    ModelFree,
    /// Count-based transition model, value sweeps, and rollout planning.
    ModelBased,
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentKind::ModelFree => "model_free",
            AgentKind::ModelBased => "model_based",
        })
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<AgentKind> {
        match s {
            "model_free" => Ok(AgentKind::ModelFree),
            "model_based" => Ok(AgentKind::ModelBased),
            other => Err(Error::Param(format!(
                "unknown agent kind {other:?}; expected model_free or model_based"
            ))),
        }
    }
}

/// Hyperparameters shared by both agents. Fields that only one agent uses
/// (the step size for the model-free learner; horizon, blend weight, and
/// sweep count for the planner) are ignored by the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Step size for temporal-difference updates; 0 freezes learning.
    pub alpha: f64,
    /// Exploration probability while training.
    pub epsilon: f64,
    /// Discount factor.
    pub gamma: f64,
    /// Maximum imagined rollout length.
    pub horizon: u32,
    /// Blend weight for multi-step rollout scores.
    pub lambda_return: f64,
    /// Number of quantization bins for the depletion cue. Must be fine
    /// enough that consecutive harvest counters land in distinct bins over
    /// any plausible residence, or the model invents self-loops.
    pub cue_bins: u16,
    /// Training episodes.
    pub episodes: u32,
    /// Backup sweep cap over the model after each episode; sweeps stop
    /// early once the table is stationary. The table carries over between
    /// episodes, so refinement accrues across training even when single
    /// calls hit the cap.
    pub value_sweeps: u32,
}

impl Default for AgentConfig {
    fn default() -> AgentConfig {
        AgentConfig {
            alpha: 0.1,
            epsilon: 0.1,
            gamma: 0.999,
            horizon: 15,
            lambda_return: 0.95,
            cue_bins: 2048,
            episodes: 200,
            value_sweeps: 30,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Param(format!("step size must lie in [0, 1], got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Param(format!(
                "exploration rate must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Param(format!("discount must lie in (0, 1), got {}", self.gamma)));
        }
        if self.horizon < 1 {
            return Err(Error::Param("rollout horizon must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda_return) {
            return Err(Error::Param(format!(
                "blend weight must lie in [0, 1], got {}",
                self.lambda_return
            )));
        }
        if self.cue_bins == 0 || self.cue_bins == u16::MAX {
            return Err(Error::Param(format!(
                "cue bins must lie in [1, {}], got {}",
                u16::MAX - 1,
                self.cue_bins
            )));
        }
        if self.episodes < 1 {
            return Err(Error::Param("need at least one training episode".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        AgentConfig::default().validate().unwrap();
    }

    #[test]
    fn out_of_range_fields_are_rejected() {
        let ok = AgentConfig::default();
        for bad in [
            AgentConfig { alpha: -0.1, ..ok.clone() },
            AgentConfig { alpha: 1.5, ..ok.clone() },
            AgentConfig { epsilon: 2.0, ..ok.clone() },
            AgentConfig { gamma: 0.0, ..ok.clone() },
            AgentConfig { gamma: 1.0, ..ok.clone() },
            AgentConfig { horizon: 0, ..ok.clone() },
            AgentConfig { lambda_return: -0.5, ..ok.clone() },
            AgentConfig { cue_bins: 0, ..ok.clone() },
            AgentConfig { episodes: 0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?} should be invalid");
        }
    }

    #[test]
    fn zero_step_size_is_allowed() {
        AgentConfig { alpha: 0.0, ..AgentConfig::default() }.validate().unwrap();
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in [AgentKind::ModelFree, AgentKind::ModelBased] {
            assert_eq!(kind.to_string().parse::<AgentKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(serde_json::from_str::<AgentKind>(&json).unwrap(), kind);
        }
        assert!("planner".parse::<AgentKind>().is_err());
        assert_eq!(serde_json::to_string(&AgentKind::ModelBased).unwrap(), "\"model_based\"");
    }
}

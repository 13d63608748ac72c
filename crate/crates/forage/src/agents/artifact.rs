//! Saved policies: a versioned JSON artifact written after training and a
//! runtime policy rebuilt from it for evaluation.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Action, PatchEnv};
use crate::error::{Error, Result};
use crate::map::WorldMap;
use crate::mvt::RewardParams;

use super::encoder::{CompactState, StateEncoder};
use super::model::{TransitionStats, WorldModel};
use super::planner::plan_action;
use super::qtable::QTable;
use super::train::TrainResult;
use super::{AgentConfig, AgentKind};

/// Bump on any change to the artifact layout.
pub const ARTIFACT_VERSION: u32 = 1;

/// One action-value table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueEntry {
    pub state: CompactState,
    pub action: Action,
    pub value: f64,
}

/// One observed successor of a (state, action) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessorEntry {
    pub state: CompactState,
    pub count: u32,
}

/// One transition-model entry; successors are sorted by state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub state: CompactState,
    pub action: Action,
    pub reward_sum: f64,
    pub successors: Vec<SuccessorEntry>,
}

/// Everything needed to replay a trained policy, in one JSON file.
/// Entries are sorted, so saving the same policy twice produces identical
/// bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyArtifact {
    pub version: u32,
    pub kind: AgentKind,
    pub reward: RewardParams,
    pub view_radius: u32,
    pub config: AgentConfig,
    pub maps: Vec<WorldMap>,
    pub best_episode: u32,
    pub best_return: f64,
    pub values: Vec<ValueEntry>,
    /// Present exactly when `kind` is model-based.
    pub model: Option<Vec<ModelEntry>>,
}

impl PolicyArtifact {
    /// Package a training result together with the world it was trained in.
    pub fn from_training(
        result: &TrainResult,
        maps: &[WorldMap],
        reward: RewardParams,
        view_radius: u32,
        config: &AgentConfig,
    ) -> PolicyArtifact {
        let values = result
            .q
            .entries_sorted()
            .into_iter()
            .map(|(state, action, value)| ValueEntry { state, action, value })
            .collect();
        let model = result.model.as_ref().map(|m| {
            m.entries_sorted()
                .into_iter()
                .map(|(state, action, stats)| {
                    let mut successors: Vec<SuccessorEntry> = stats
                        .successors()
                        .iter()
                        .map(|&(state, count)| SuccessorEntry { state, count })
                        .collect();
                    successors.sort_by_key(|e| e.state);
                    ModelEntry { state, action, reward_sum: stats.reward_sum(), successors }
                })
                .collect()
        });
        PolicyArtifact {
            version: ARTIFACT_VERSION,
            kind: result.kind,
            reward,
            view_radius,
            config: config.clone(),
            maps: maps.to_vec(),
            best_episode: result.best_episode,
            best_return: result.best_return,
            values,
            model,
        }
    }

    /// Check internal consistency; called on every load.
    pub fn validate(&self) -> Result<()> {
        if self.version != ARTIFACT_VERSION {
            return Err(Error::Version { found: self.version, expected: ARTIFACT_VERSION });
        }
        self.reward.validate()?;
        self.config.validate()?;
        if self.view_radius < 1 {
            return Err(Error::Param("view radius must be at least 1".into()));
        }
        if self.maps.is_empty() {
            return Err(Error::Param("artifact lists no maps".into()));
        }
        for map in &self.maps {
            map.validate()?;
        }
        match (self.kind, &self.model) {
            (AgentKind::ModelBased, None) => {
                return Err(Error::Incompatible(
                    "model-based artifact is missing its transition model".into(),
                ))
            }
            (AgentKind::ModelFree, Some(_)) => {
                return Err(Error::Incompatible(
                    "model-free artifact should not carry a transition model".into(),
                ))
            }
            _ => {}
        }
        let tile_span: u32 = self.maps.iter().map(WorldMap::tile_count).sum();
        let states = self.values.iter().map(|e| &e.state).chain(
            self.model
                .iter()
                .flatten()
                .flat_map(|e| std::iter::once(&e.state).chain(e.successors.iter().map(|s| &s.state))),
        );
        for state in states {
            if state.tile >= tile_span {
                return Err(Error::Incompatible(format!(
                    "state tile {} lies outside the {} tiles of the listed maps",
                    state.tile, tile_span
                )));
            }
            if state.cue_bin > self.config.cue_bins {
                return Err(Error::Incompatible(format!(
                    "state cue bin {} exceeds the configured {} bins",
                    state.cue_bin, self.config.cue_bins
                )));
            }
        }
        Ok(())
    }

    /// Write the artifact as pretty-printed JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("could not serialize policy: {e}")))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Read and validate an artifact.
    pub fn load(path: &Path) -> Result<PolicyArtifact> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let artifact: PolicyArtifact = serde_json::from_str(&text)
            .map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        artifact.validate()?;
        Ok(artifact)
    }
}

/// A policy rebuilt from an artifact and ready to act. Evaluation runs with
/// exploration off, so action choices are a pure function of the
/// observation.
#[derive(Debug, Clone)]
pub struct RuntimePolicy {
    kind: AgentKind,
    reward: RewardParams,
    view_radius: u32,
    config: AgentConfig,
    maps: Vec<WorldMap>,
    encoder: StateEncoder,
    q: QTable,
    model: Option<WorldModel>,
    rng: ChaCha8Rng,
}

impl RuntimePolicy {
    pub fn from_artifact(artifact: &PolicyArtifact) -> Result<RuntimePolicy> {
        artifact.validate()?;
        let encoder = StateEncoder::new(&artifact.maps, artifact.config.cue_bins)?;
        let q = QTable::from_entries(artifact.values.iter().map(|e| (e.state, e.action, e.value)));
        let model = match &artifact.model {
            None => None,
            Some(entries) => {
                let mut triples = Vec::with_capacity(entries.len());
                for e in entries {
                    let successors =
                        e.successors.iter().map(|s| (s.state, s.count)).collect();
                    triples.push((
                        e.state,
                        e.action,
                        TransitionStats::from_parts(successors, e.reward_sum)?,
                    ));
                }
                Some(WorldModel::from_entries(triples))
            }
        };
        Ok(RuntimePolicy {
            kind: artifact.kind,
            reward: artifact.reward,
            view_radius: artifact.view_radius,
            config: AgentConfig { epsilon: 0.0, ..artifact.config.clone() },
            maps: artifact.maps.clone(),
            encoder,
            q,
            model,
            rng: ChaCha8Rng::seed_from_u64(0),
        })
    }

    pub fn kind(&self) -> AgentKind {
        self.kind
    }

    pub fn reward(&self) -> RewardParams {
        self.reward
    }

    pub fn view_radius(&self) -> u32 {
        self.view_radius
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    /// Maps the policy was trained on, in training order.
    pub fn maps(&self) -> &[WorldMap] {
        &self.maps
    }

    pub fn encoder(&self) -> &StateEncoder {
        &self.encoder
    }

    pub fn q(&self) -> &QTable {
        &self.q
    }

    pub fn model(&self) -> Option<&WorldModel> {
        self.model.as_ref()
    }

    /// Choose the next action for an environment running on the map at
    /// `map_index` (an index into [`RuntimePolicy::maps`]).
    pub fn act(&mut self, map_index: usize, env: &PatchEnv) -> Result<Action> {
        let state = self.encoder.encode_env(map_index, env)?;
        match self.kind {
            AgentKind::ModelFree => Ok(self.q.greedy(&state)),
            AgentKind::ModelBased => {
                let model = self.model.as_ref().expect("validated artifacts carry a model");
                plan_action(model, &self.q, &state, &self.config, &mut self.rng)
            }
        }
    }
}

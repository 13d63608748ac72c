//! Scripted evaluation runs: replaying a frozen policy over seeded
//! episodes and logging everything needed for statistics.

use serde::{Deserialize, Serialize};

use crate::agents::{CompactState, RuntimePolicy};
use crate::env::{PatchEnv, TrajStep};
use crate::error::{Error, Result};
use crate::map::WorldMap;
use crate::rng::derive_seed;

/// Evaluation protocol parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Patch-to-patch distances, one scenario each.
    pub distances: Vec<u32>,
    /// Independent episodes per scenario.
    pub repetitions: u32,
    /// Steps per episode when collecting statistics.
    pub episode_steps: u32,
    /// Steps per episode when collecting occupancy maps.
    pub occupancy_steps: u32,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.distances.is_empty() {
            return Err(Error::Param("need at least one scenario distance".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::Param("need at least one repetition".into()));
        }
        if self.episode_steps < 1 || self.occupancy_steps < 1 {
            return Err(Error::Param("episodes must run for at least one step".into()));
        }
        Ok(())
    }
}

/// Full log of one probe episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub replication: u32,
    /// One entry per environment step.
    pub steps: Vec<TrajStep>,
    /// Encoded state after each step, parallel to `steps`.
    pub states: Vec<CompactState>,
    /// Final cumulative score.
    pub score: f64,
}

/// Run `repetitions` independent greedy episodes of `steps` steps each on
/// one map. Replication seeds derive from `master_seed`, so the same seed
/// reproduces the records exactly; the policy acts without exploration.
pub fn run_probe(
    policy: &RuntimePolicy,
    map: &WorldMap,
    repetitions: u32,
    steps: u32,
    master_seed: u64,
) -> Result<Vec<EpisodeRecord>> {
    if repetitions < 1 {
        return Err(Error::Param("need at least one repetition".into()));
    }
    if steps < 1 {
        return Err(Error::Param("episodes must run for at least one step".into()));
    }
    let map_index = policy.encoder().find_map(map)?;
    let map = map.with_episode_steps(steps);
    let mut records = Vec::with_capacity(repetitions as usize);
    for replication in 0..repetitions {
        let seed = derive_seed(master_seed, u64::from(replication));
        let mut runner = policy.clone();
        let (mut env, _) =
            PatchEnv::reset(map.clone(), policy.reward(), policy.view_radius(), seed)?;
        let mut trace = Vec::with_capacity(steps as usize);
        let mut states = Vec::with_capacity(steps as usize);
        loop {
            let action = runner.act(map_index, &env)?;
            let out = env.step(action)?;
            let (x, y) = env.position();
            trace.push(TrajStep {
                step: env.steps_taken(),
                x,
                y,
                patch: env.occupied(),
                reward: out.reward,
                cue: out.observation.cue,
                score: env.score(),
            });
            states.push(runner.encoder().encode_env(map_index, &env)?);
            if out.done {
                break;
            }
        }
        records.push(EpisodeRecord { replication, steps: trace, states, score: env.score() });
    }
    Ok(records)
}

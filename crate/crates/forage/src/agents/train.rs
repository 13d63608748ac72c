//! Shared training loop for both agent kinds.

use rand::Rng;

use crate::env::{Action, PatchEnv};
use crate::error::{Error, Result};
use crate::map::{sample_map, WorldMap};
use crate::mvt::RewardParams;
use crate::rng::{derive_seed, stream_rng};

use super::encoder::StateEncoder;
use super::model::WorldModel;
use super::planner::{plan_action, value_sweeps};
use super::qtable::{act_epsilon_greedy, qlearn_update, QTable};
use super::{AgentConfig, AgentKind};

/// Outcome of a training run: the best-scoring snapshot plus the full
/// learning curve.
#[derive(Debug, Clone)]
pub struct TrainResult {
    pub kind: AgentKind,
    /// Action values from the best-returning episode.
    pub q: QTable,
    /// Transition model from the best-returning episode; model-based only.
    pub model: Option<WorldModel>,
    /// Undiscounted return of every episode, in order.
    pub curve: Vec<f64>,
    /// Index into `curve` of the snapshot that was kept.
    pub best_episode: u32,
    pub best_return: f64,
}

/// Exploration rate for one episode: anneals linearly from fully random
/// down to the configured floor across the run, so early episodes chart
/// the world while late ones refine behavior near the learned policy. A
/// zero floor disables exploration entirely.
fn annealed_epsilon(floor: f64, episode: u32, episodes: u32) -> f64 {
    if floor <= 0.0 || episodes <= 1 {
        return floor.max(0.0);
    }
    let progress = f64::from(episode) / f64::from(episodes - 1);
    floor + (1.0 - floor) * (1.0 - progress)
}

/// Train one agent across the given maps.
///
/// Episodes cycle through maps by uniform draw; every run with the same
/// `master_seed` plays out identically. The returned tables are snapshots
/// from the episode with the strictly highest return, so a late collapse
/// cannot erase a good policy.
pub fn train(
    kind: AgentKind,
    maps: &[WorldMap],
    reward: RewardParams,
    view_radius: u32,
    config: &AgentConfig,
    master_seed: u64,
) -> Result<TrainResult> {
    config.validate()?;
    if maps.is_empty() {
        return Err(Error::Param("need at least one map to train on".into()));
    }
    let encoder = StateEncoder::new(maps, config.cue_bins)?;
    let mut agent_rng = stream_rng(master_seed, 0);
    let mut q = QTable::new();
    let mut model = WorldModel::new();
    let mut curve = Vec::with_capacity(config.episodes as usize);
    let mut best: Option<(u32, f64, QTable, Option<WorldModel>)> = None;

    for episode in 0..config.episodes {
        let (map_index, map) = sample_map(maps, &mut agent_rng)?;
        let env_seed = derive_seed(master_seed, 1 + u64::from(episode));
        let (mut env, _) = PatchEnv::reset(map.clone(), reward, view_radius, env_seed)?;
        let mut state = encoder.encode_env(map_index, &env)?;
        let epsilon = annealed_epsilon(config.epsilon, episode, config.episodes);
        loop {
            let action = match kind {
                AgentKind::ModelFree => act_epsilon_greedy(&q, &state, epsilon, &mut agent_rng),
                AgentKind::ModelBased => {
                    if epsilon > 0.0 && agent_rng.random::<f64>() < epsilon {
                        Action::ALL[agent_rng.random_range(0..Action::ALL.len())]
                    } else {
                        plan_action(&model, &q, &state, config, &mut agent_rng)?
                    }
                }
            };
            let out = env.step(action)?;
            let next = encoder.encode_env(map_index, &env)?;
            match kind {
                AgentKind::ModelFree => {
                    qlearn_update(&mut q, &state, action, out.reward, &next, config.alpha, config.gamma);
                }
                AgentKind::ModelBased => model.record(state, action, out.reward, next),
            }
            state = next;
            if out.done {
                break;
            }
        }
        if kind == AgentKind::ModelBased {
            value_sweeps(&mut q, &model, config.gamma, config.value_sweeps)?;
        }
        let episode_return = env.score();
        curve.push(episode_return);
        let improved = best.as_ref().is_none_or(|(_, r, _, _)| episode_return > *r);
        if improved {
            let snapshot_model = (kind == AgentKind::ModelBased).then(|| model.clone());
            best = Some((episode, episode_return, q.clone(), snapshot_model));
        }
    }

    let (best_episode, best_return, q, model) = best.expect("at least one episode ran");
    Ok(TrainResult { kind, q, model, curve, best_episode, best_return })
}

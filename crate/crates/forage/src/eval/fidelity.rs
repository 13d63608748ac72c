//! How faithfully the learned model replays the real world: imagined
//! rollouts compared step by step against ground-truth episodes.

use serde::Serialize;

use crate::agents::model::imagine_rollout;
use crate::agents::RuntimePolicy;
use crate::env::{Action, PatchEnv};
use crate::error::{Error, Result};
use crate::map::PatchId;

/// Where a dream begins: freshly entered into one patch of one map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DreamStart {
    /// Index into the policy's map list.
    pub map_index: usize,
    /// Patch the agent walks into before dreaming.
    pub patch: PatchId,
}

/// Aggregate prediction errors of stay-in-place dreams against the real
/// environment. Cue errors are normalized to [0, 1]; reward errors are in
/// energy units. When every rollout truncates immediately there is nothing
/// to compare and the error fields stay at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelitySummary {
    pub max_cue_err: f64,
    pub mean_cue_err: f64,
    pub max_reward_err: f64,
    pub mean_reward_err: f64,
    /// Steps whose predicted patch occupancy disagreed with the world.
    pub occupancy_mismatches: u32,
    /// Transitions actually compared across all rollouts.
    pub compared_steps: u32,
    /// Rollouts that stopped early at a pair the model has never tried.
    pub truncated_rollouts: u32,
}

/// Walk the real environment into the patch named by `start`, then let the
/// model dream `horizon` stay-in-place steps from there while the real
/// environment steps alongside. Unknown start states count as truncations
/// rather than errors, so an untrained model yields a report, not a crash.
pub fn dream_fidelity(
    policy: &RuntimePolicy,
    starts: &[DreamStart],
    horizon: u32,
) -> Result<FidelitySummary> {
    if horizon < 1 {
        return Err(Error::Param("dream horizon must be at least 1".into()));
    }
    if starts.is_empty() {
        return Err(Error::Param("need at least one dream start".into()));
    }
    let model = policy
        .model()
        .ok_or_else(|| Error::Incompatible("policy has no transition model to dream with".into()))?;

    let mut cue_sum = 0.0;
    let mut reward_sum = 0.0;
    let mut summary = FidelitySummary {
        max_cue_err: 0.0,
        mean_cue_err: 0.0,
        max_reward_err: 0.0,
        mean_reward_err: 0.0,
        occupancy_mismatches: 0,
        compared_steps: 0,
        truncated_rollouts: 0,
    };

    for start in starts {
        let map = policy.maps().get(start.map_index).ok_or_else(|| {
            Error::Param(format!("dream start references unknown map {}", start.map_index))
        })?;
        // Room for the walk to the patch plus the dream itself.
        let map = map.with_episode_steps(map.width + horizon + 1);
        let (mut env, _) =
            PatchEnv::reset(map.clone(), policy.reward(), policy.view_radius(), 0)?;
        let direction = match start.patch {
            PatchId::A => Action::Left,
            PatchId::B => Action::Right,
        };
        for _ in 0..map.width {
            if env.occupied() == Some(start.patch) {
                break;
            }
            env.step(direction)?;
        }
        if env.occupied() != Some(start.patch) {
            return Err(Error::Geometry(format!(
                "no straight-line entry into patch {:?} from the spawn row",
                start.patch
            )));
        }

        let state = policy.encoder().encode_env(start.map_index, &env)?;
        let dream = match imagine_rollout(model, policy.q(), state, |_, _| Action::Stay, horizon) {
            Ok(dream) => dream,
            Err(Error::UnknownState) => {
                summary.truncated_rollouts += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if dream.truncated || (dream.steps.len() as u32) < horizon {
            summary.truncated_rollouts += 1;
        }
        let peak = policy.reward().peak;
        for imagined in &dream.steps {
            let out = env.step(Action::Stay)?;
            let cue_err = (imagined.reward / peak - out.observation.cue).abs();
            let reward_err = (imagined.reward - out.reward).abs();
            cue_sum += cue_err;
            reward_sum += reward_err;
            summary.max_cue_err = summary.max_cue_err.max(cue_err);
            summary.max_reward_err = summary.max_reward_err.max(reward_err);
            if imagined.state.patch != env.occupied() {
                summary.occupancy_mismatches += 1;
            }
            summary.compared_steps += 1;
        }
    }

    if summary.compared_steps > 0 {
        summary.mean_cue_err = cue_sum / f64::from(summary.compared_steps);
        summary.mean_reward_err = reward_sum / f64::from(summary.compared_steps);
    }
    Ok(summary)
}

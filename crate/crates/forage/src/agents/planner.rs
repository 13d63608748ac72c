//! Planning on top of the learned model: value backups over visited pairs
//! and action selection by scoring short imagined rollouts.

use rand_chacha::ChaCha8Rng;

use crate::env::Action;
use crate::error::{Error, Result};

use super::encoder::CompactState;
use super::model::{imagine_rollout, WorldModel};
use super::qtable::{act_epsilon_greedy, QTable};
use super::AgentConfig;

/// Blended multi-step return of one trajectory.
///
/// `values` holds one state-value estimate per state visited, so it must be
/// exactly one longer than `rewards`; the final entry bootstraps the tail.
/// `lambda` = 0 reduces to the one-step target, `lambda` = 1 to the
/// discounted reward sum bootstrapped at the final state. With no rewards
/// the return is just the first value.
pub fn lambda_return(rewards: &[f64], values: &[f64], gamma: f64, lambda: f64) -> Result<f64> {
    if values.len() != rewards.len() + 1 {
        return Err(Error::Shape(format!(
            "need one value per state: got {} rewards and {} values",
            rewards.len(),
            values.len()
        )));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Param(format!("discount must lie in (0, 1], got {gamma}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Param(format!("blend weight must lie in [0, 1], got {lambda}")));
    }
    let mut g = values[values.len() - 1];
    for t in (0..rewards.len()).rev() {
        g = rewards[t] + gamma * ((1.0 - lambda) * values[t + 1] + lambda * g);
    }
    Ok(g)
}

/// A full pass that moves no entry by more than this leaves the table
/// stationary, so further passes are skipped.
const SWEEP_TOLERANCE: f64 = 1e-6;

fn backed_up_value(q: &QTable, model: &WorldModel, gamma: f64, state: &CompactState, action: Action) -> f64 {
    let stats = model.lookup(state, action).expect("backed-up pairs are recorded");
    let expected_next: f64 = stats.probabilities().map(|(next, p)| p * q.state_value(next)).sum();
    stats.mean_reward() + gamma * expected_next
}

/// Refresh the value table against the model with repeated in-place backups:
///
/// ```text
/// Q(s, a) <- mean_reward(s, a) + gamma * sum_s' p(s' | s, a) * V(s')
/// ```
///
/// where `V` maxes the current table over all actions. Each pass visits the
/// recorded pairs in reverse recording order; value flows backward along
/// experience, so a pass in that order propagates corrections across a whole
/// trajectory instead of a single step. `sweeps` caps the number of passes;
/// they stop early once a full pass leaves the table stationary.
pub fn value_sweeps(q: &mut QTable, model: &WorldModel, gamma: f64, sweeps: u32) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Param(format!("discount must lie in (0, 1), got {gamma}")));
    }
    for _ in 0..sweeps {
        let mut largest = 0.0_f64;
        for (state, action) in model.pairs().iter().rev() {
            let updated = backed_up_value(q, model, gamma, state, *action);
            largest = largest.max((updated - q.get(state, *action)).abs());
            q.set(*state, *action, updated);
        }
        if largest <= SWEEP_TOLERANCE {
            break;
        }
    }
    Ok(())
}

/// Choose an action by dreaming one rollout per tried action.
///
/// Each candidate rollout forces that action first, then continues greedily
/// under `q` for up to `config.horizon` steps, truncating at unknown pairs.
/// Rollouts are scored with [`lambda_return`], bootstrapping from the value
/// of the last imagined state; the best-scoring first action wins, ties
/// breaking in fixed action order. States the model has never tried fall
/// back to epsilon-greedy selection on `q`.
pub fn plan_action(
    model: &WorldModel,
    q: &QTable,
    state: &CompactState,
    config: &AgentConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Action> {
    if !model.knows_state(state) {
        return Ok(act_epsilon_greedy(q, state, config.epsilon, rng));
    }
    let mut best: Option<(Action, f64)> = None;
    for root in Action::ALL {
        if !model.knows(state, root) {
            continue;
        }
        let traj = imagine_rollout(
            model,
            q,
            *state,
            |s, step| if step == 0 { root } else { q.greedy(s) },
            config.horizon,
        )?;
        let mut values = Vec::with_capacity(traj.len());
        values.push(q.state_value(state));
        values.extend(traj.steps.iter().map(|s| s.value));
        let score = lambda_return(&traj.rewards(), &values, config.gamma, config.lambda_return)?;
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((root, score));
        }
    }
    Ok(best.expect("known states have at least one tried action").0)
}

//! Count-based transition model and imagination rollouts through it.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::Action;
use crate::error::{Error, Result};

use super::encoder::CompactState;
use super::qtable::QTable;

/// Experience gathered at one (state, action) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionStats {
    /// Successor histogram in first-seen order.
    successors: Vec<(CompactState, u32)>,
    reward_sum: f64,
    visits: u32,
}

impl TransitionStats {
    fn new() -> TransitionStats {
        TransitionStats { successors: Vec::new(), reward_sum: 0.0, visits: 0 }
    }

    pub fn visits(&self) -> u32 {
        self.visits
    }

    pub fn reward_sum(&self) -> f64 {
        self.reward_sum
    }

    pub fn mean_reward(&self) -> f64 {
        self.reward_sum / f64::from(self.visits)
    }

    fn record(&mut self, next: CompactState, reward: f64) {
        self.visits += 1;
        self.reward_sum += reward;
        match self.successors.iter_mut().find(|(s, _)| *s == next) {
            Some((_, count)) => *count += 1,
            None => self.successors.push((next, 1)),
        }
    }

    /// Successor with the highest count; ties break toward the smaller
    /// state so the choice does not depend on observation order.
    pub fn most_likely(&self) -> &CompactState {
        self.successors
            .iter()
            .max_by(|(sa, ca), (sb, cb)| ca.cmp(cb).then_with(|| sb.cmp(sa)))
            .map(|(s, _)| s)
            .expect("recorded pairs have at least one successor")
    }

    /// Successors with their empirical probabilities.
    pub fn probabilities(&self) -> impl Iterator<Item = (&CompactState, f64)> + '_ {
        let total = f64::from(self.visits);
        self.successors.iter().map(move |(s, c)| (s, f64::from(*c) / total))
    }

    /// Draw a successor with probability proportional to its count.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> &CompactState {
        let mut remaining = rng.random_range(0..self.visits);
        for (s, c) in &self.successors {
            if remaining < *c {
                return s;
            }
            remaining -= c;
        }
        unreachable!("successor counts sum to visits")
    }

    pub fn successors(&self) -> &[(CompactState, u32)] {
        &self.successors
    }

    /// Rebuild stats from stored parts. Every successor needs a positive
    /// count; visits are recomputed as their sum.
    pub fn from_parts(successors: Vec<(CompactState, u32)>, reward_sum: f64) -> Result<TransitionStats> {
        if successors.is_empty() {
            return Err(Error::Param("a recorded pair needs at least one successor".into()));
        }
        if successors.iter().any(|(_, c)| *c == 0) {
            return Err(Error::Param("successor counts must be positive".into()));
        }
        let total: u64 = successors.iter().map(|(_, c)| u64::from(*c)).sum();
        let visits = u32::try_from(total)
            .map_err(|_| Error::Param("successor counts overflow the visit counter".into()))?;
        Ok(TransitionStats { successors, reward_sum, visits })
    }
}

/// Tabular world model: per-pair successor histograms and mean rewards.
/// Pairs also live in a first-seen list so sweeps iterate deterministically.
#[derive(Debug, Clone, Default)]
pub struct WorldModel {
    table: HashMap<(CompactState, Action), TransitionStats>,
    order: Vec<(CompactState, Action)>,
}

impl WorldModel {
    pub fn new() -> WorldModel {
        WorldModel::default()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Record one observed transition.
    pub fn record(&mut self, state: CompactState, action: Action, reward: f64, next: CompactState) {
        let stats = self.table.entry((state, action)).or_insert_with(|| {
            self.order.push((state, action));
            TransitionStats::new()
        });
        stats.record(next, reward);
    }

    pub fn lookup(&self, state: &CompactState, action: Action) -> Option<&TransitionStats> {
        self.table.get(&(*state, action))
    }

    pub fn knows(&self, state: &CompactState, action: Action) -> bool {
        self.table.contains_key(&(*state, action))
    }

    /// True when any action has been tried at this state.
    pub fn knows_state(&self, state: &CompactState) -> bool {
        Action::ALL.iter().any(|a| self.knows(state, *a))
    }

    /// Visited pairs in first-seen order.
    pub fn pairs(&self) -> &[(CompactState, Action)] {
        &self.order
    }

    /// All recorded pairs with their stats, sorted by state then action so
    /// serialized output is stable across runs.
    pub fn entries_sorted(&self) -> Vec<(CompactState, Action, &TransitionStats)> {
        let mut out: Vec<_> =
            self.order.iter().map(|&(s, a)| (s, a, &self.table[&(s, a)])).collect();
        out.sort_by_key(|&(s, a, _)| (s, a.index()));
        out
    }

    /// Rebuild a model from stored entries; iteration order becomes the
    /// sweep order. Later duplicates of a pair replace earlier ones.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (CompactState, Action, TransitionStats)>,
    ) -> WorldModel {
        let mut model = WorldModel::new();
        for (state, action, stats) in entries {
            if model.table.insert((state, action), stats).is_none() {
                model.order.push((state, action));
            }
        }
        model
    }
}

/// One predicted transition in an imagined trajectory: the successor state,
/// the expected reward of the action that reached it, the successor's cue
/// bin, and its current value estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImaginedStep {
    pub state: CompactState,
    pub reward: f64,
    pub cue_bin: u16,
    pub value: f64,
}

/// A rollout dreamed through the model, never through the environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ImaginedTrajectory {
    pub start: CompactState,
    /// Actions actually taken; one per entry of `steps`.
    pub actions: Vec<Action>,
    pub steps: Vec<ImaginedStep>,
    /// True when the rollout stopped early at a pair the model has never
    /// tried; `steps` then holds only the completed transitions.
    pub truncated: bool,
}

impl ImaginedTrajectory {
    /// Number of states mentioned, the start included; at least 1.
    pub fn len(&self) -> usize {
        1 + self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }
}

fn imagine_with(
    model: &WorldModel,
    values: &QTable,
    start: CompactState,
    mut policy: impl FnMut(&CompactState, u32) -> Action,
    horizon: u32,
    mut pick: impl FnMut(&TransitionStats) -> CompactState,
) -> Result<ImaginedTrajectory> {
    if horizon < 1 {
        return Err(Error::Param("imagination horizon must be at least 1".into()));
    }
    if !model.knows_state(&start) {
        return Err(Error::UnknownState);
    }
    let mut state = start;
    let mut steps = Vec::new();
    let mut actions = Vec::new();
    let mut truncated = false;
    for t in 0..horizon {
        let action = policy(&state, t);
        match model.lookup(&state, action) {
            None => {
                truncated = true;
                break;
            }
            Some(stats) => {
                let next = pick(stats);
                actions.push(action);
                steps.push(ImaginedStep {
                    state: next,
                    reward: stats.mean_reward(),
                    cue_bin: next.cue_bin,
                    value: values.state_value(&next),
                });
                state = next;
            }
        }
    }
    Ok(ImaginedTrajectory { start, actions, steps, truncated })
}

/// Dream forward through most-likely successors, up to `horizon` steps,
/// choosing actions with `policy(state, step)`. Stops early at the first
/// pair the model has never tried.
pub fn imagine_rollout(
    model: &WorldModel,
    values: &QTable,
    start: CompactState,
    policy: impl FnMut(&CompactState, u32) -> Action,
    horizon: u32,
) -> Result<ImaginedTrajectory> {
    imagine_with(model, values, start, policy, horizon, |stats| *stats.most_likely())
}

/// Like [`imagine_rollout`] but drawing successors from the empirical
/// transition distribution.
pub fn imagine_rollout_sampled(
    model: &WorldModel,
    values: &QTable,
    start: CompactState,
    policy: impl FnMut(&CompactState, u32) -> Action,
    horizon: u32,
    rng: &mut ChaCha8Rng,
) -> Result<ImaginedTrajectory> {
    imagine_with(model, values, start, policy, horizon, |stats| *stats.sample(rng))
}

//! Tabular action values with deterministic tie-breaking.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::Action;

use super::encoder::CompactState;

/// Sparse (state, action) → value table; absent entries read as 0.
#[derive(Debug, Clone, Default)]
pub struct QTable {
    values: HashMap<(CompactState, Action), f64>,
}

impl QTable {
    pub fn new() -> QTable {
        QTable::default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, state: &CompactState, action: Action) -> f64 {
        self.values.get(&(*state, action)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, state: CompactState, action: Action, value: f64) {
        self.values.insert((state, action), value);
    }

    /// Highest action value at `state`; 0 for unseen states.
    pub fn state_value(&self, state: &CompactState) -> f64 {
        Action::ALL
            .iter()
            .map(|a| self.get(state, *a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// First action in the fixed order achieving the highest value.
    pub fn greedy(&self, state: &CompactState) -> Action {
        let mut best = Action::ALL[0];
        let mut best_value = self.get(state, best);
        for &a in &Action::ALL[1..] {
            let v = self.get(state, a);
            if v > best_value {
                best = a;
                best_value = v;
            }
        }
        best
    }

    /// Entries in (state, action) order, for stable serialization.
    pub fn entries_sorted(&self) -> Vec<(CompactState, Action, f64)> {
        let mut entries: Vec<_> =
            self.values.iter().map(|(&(s, a), &v)| (s, a, v)).collect();
        entries.sort_by_key(|&(s, a, _)| (s, a));
        entries
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (CompactState, Action, f64)>) -> QTable {
        let mut q = QTable::new();
        for (s, a, v) in entries {
            q.set(s, a, v);
        }
        q
    }
}

/// Greedy action with probability `1 - epsilon`, uniform random otherwise.
/// Draws nothing from the generator when `epsilon` is 0.
pub fn act_epsilon_greedy(
    q: &QTable,
    state: &CompactState,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> Action {
    debug_assert!((0.0..=1.0).contains(&epsilon));
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        Action::ALL[rng.random_range(0..Action::ALL.len())]
    } else {
        q.greedy(state)
    }
}

/// One-step temporal-difference backup:
/// `Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))`.
pub fn qlearn_update(
    q: &mut QTable,
    state: &CompactState,
    action: Action,
    reward: f64,
    next: &CompactState,
    alpha: f64,
    gamma: f64,
) {
    let target = reward + gamma * q.state_value(next);
    let old = q.get(state, action);
    q.set(*state, action, old + alpha * (target - old));
}

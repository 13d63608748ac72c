//! Two-patch grid world.
//!
//! The agent walks a corridor between two square patches. Standing inside a
//! patch harvests an exponentially shrinking reward; the opposite patch
//! refills the moment the agent enters this one. Observations are a local
//! tile window plus a scalar freshness cue for the occupied patch, so the
//! true depletion counters stay hidden.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{PatchId, WorldMap};
use crate::mvt::RewardParams;
use crate::rng::stream_rng;

/// One tile move per step; `Stay` harvests in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Stay,
}

impl Action {
    /// Fixed order used for tie-breaking everywhere.
    pub const ALL: [Action; 5] = [Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
            Action::Stay => (0, 0),
        }
    }

    pub fn index(self) -> usize {
        Action::ALL.iter().position(|a| *a == self).expect("action listed in ALL")
    }

    /// Single-letter code used in scripts and logs.
    pub fn letter(self) -> char {
        match self {
            Action::Up => 'U',
            Action::Down => 'D',
            Action::Left => 'L',
            Action::Right => 'R',
            Action::Stay => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Action> {
        match c.to_ascii_uppercase() {
            'U' => Some(Action::Up),
            'D' => Some(Action::Down),
            'L' => Some(Action::Left),
            'R' => Some(Action::Right),
            'S' => Some(Action::Stay),
            _ => None,
        }
    }
}

/// Freshness fraction of a patch harvested `steps` times since its last
/// replenishment: 1 when untouched, decaying toward 0.
pub fn cue_level(params: &RewardParams, steps: u32) -> f64 {
    (-params.decay * f64::from(steps)).exp()
}

/// Depletion of one patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchState {
    /// Harvest steps since last replenishment.
    pub steps: u32,
    /// Freshness cue, `cue_level` of `steps`.
    pub cue: f64,
}

/// Tile codes appearing in observation windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileCode {
    Open,
    PatchA,
    PatchB,
    Wall,
    Agent,
}

/// Partial view after a step: a `(2r+1)²` window of tile codes centred on
/// the agent, the occupied patch's cue, and whether any other patch shows
/// inside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub window_side: u32,
    /// Row-major, `window_side²` entries; out-of-grid tiles code as `Wall`.
    pub tiles: Vec<TileCode>,
    /// Freshness of the occupied patch; 0 outside both patches.
    pub cue: f64,
    pub occupied: Option<PatchId>,
    pub other_patch_visible: bool,
}

impl Observation {
    pub fn in_patch(&self) -> bool {
        self.occupied.is_some()
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
}

/// A running episode. Dynamics are fully deterministic; the embedded rng
/// stream is the instance-local source for callers that want episode-scoped
/// draws without coupling replications to each other.
#[derive(Debug, Clone)]
pub struct PatchEnv {
    map: WorldMap,
    reward: RewardParams,
    view_radius: u32,
    agent: (u32, u32),
    counters: [u32; 2],
    steps_taken: u32,
    score: f64,
    rng: ChaCha8Rng,
}

impl PatchEnv {
    /// Start an episode: agent at spawn, both patches fresh, score zero.
    pub fn reset(
        map: WorldMap,
        reward: RewardParams,
        view_radius: u32,
        seed: u64,
    ) -> Result<(PatchEnv, Observation)> {
        map.validate()?;
        reward.validate()?;
        if view_radius < 1 {
            return Err(Error::Param("view radius must be at least 1".into()));
        }
        let env = PatchEnv {
            agent: map.spawn,
            map,
            reward,
            view_radius,
            counters: [0, 0],
            steps_taken: 0,
            score: 0.0,
            rng: stream_rng(seed, 0),
        };
        let obs = env.observe(view_radius);
        Ok((env, obs))
    }

    /// Move (clamped at walls), harvest if the new tile is in a patch,
    /// replenish the opposite patch, and advance the step counter.
    pub fn step(&mut self, action: Action) -> Result<StepOutcome> {
        if self.done() {
            return Err(Error::EpisodeOver);
        }
        let (dx, dy) = action.delta();
        let nx = (i64::from(self.agent.0) + dx).clamp(0, i64::from(self.map.width) - 1);
        let ny = (i64::from(self.agent.1) + dy).clamp(0, i64::from(self.map.height) - 1);
        self.agent = (nx as u32, ny as u32);

        let reward = match self.map.patch_at(self.agent.0, self.agent.1) {
            Some(patch) => {
                self.counters[patch.opposite().index()] = 0;
                self.counters[patch.index()] += 1;
                self.reward.reward_at(self.counters[patch.index()])
            }
            None => 0.0,
        };
        debug_assert!(
            self.counters[0] == 0 || self.counters[1] == 0,
            "both patches depleted at once"
        );

        self.score += reward;
        self.steps_taken += 1;
        Ok(StepOutcome {
            observation: self.observe(self.view_radius),
            reward,
            done: self.done(),
        })
    }

    /// Window of side `2*view_radius + 1` centred on the agent. Total for
    /// any radius; radius 0 degenerates to the agent tile alone.
    pub fn observe(&self, view_radius: u32) -> Observation {
        let side = 2 * view_radius + 1;
        let r = i64::from(view_radius);
        let (ax, ay) = (i64::from(self.agent.0), i64::from(self.agent.1));
        let mut tiles = Vec::with_capacity((side * side) as usize);
        for wy in -r..=r {
            for wx in -r..=r {
                let (gx, gy) = (ax + wx, ay + wy);
                let code = if gx < 0
                    || gy < 0
                    || gx >= i64::from(self.map.width)
                    || gy >= i64::from(self.map.height)
                {
                    TileCode::Wall
                } else if (gx, gy) == (ax, ay) {
                    TileCode::Agent
                } else {
                    match self.map.patch_at(gx as u32, gy as u32) {
                        Some(PatchId::A) => TileCode::PatchA,
                        Some(PatchId::B) => TileCode::PatchB,
                        None => TileCode::Open,
                    }
                };
                tiles.push(code);
            }
        }

        let occupied = self.map.patch_at(self.agent.0, self.agent.1);
        let cue = occupied.map_or(0.0, |p| cue_level(&self.reward, self.counters[p.index()]));
        let other_patch_visible = PatchId::BOTH
            .iter()
            .filter(|p| Some(**p) != occupied)
            .any(|p| {
                self.map.tiles(*p).iter().any(|&(tx, ty)| {
                    (i64::from(tx) - ax).abs() <= r && (i64::from(ty) - ay).abs() <= r
                })
            });

        Observation { window_side: side, tiles, cue, occupied, other_patch_visible }
    }

    pub fn done(&self) -> bool {
        self.steps_taken >= self.map.episode_steps
    }

    pub fn position(&self) -> (u32, u32) {
        self.agent
    }

    pub fn steps_taken(&self) -> u32 {
        self.steps_taken
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    /// Patch occupied after the last move, if any.
    pub fn occupied(&self) -> Option<PatchId> {
        self.map.patch_at(self.agent.0, self.agent.1)
    }

    pub fn patch_state(&self, patch: PatchId) -> PatchState {
        let steps = self.counters[patch.index()];
        PatchState { steps, cue: cue_level(&self.reward, steps) }
    }

    pub fn map(&self) -> &WorldMap {
        &self.map
    }

    pub fn reward_params(&self) -> &RewardParams {
        &self.reward
    }

    pub fn view_radius(&self) -> u32 {
        self.view_radius
    }

    /// Instance-local random stream.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// One character per tile: `@` agent, `A`/`B` patches, `.` open ground.
    pub fn render_text(&self) -> String {
        let mut out = String::with_capacity((self.map.width as usize + 1) * self.map.height as usize);
        for y in 0..self.map.height {
            for x in 0..self.map.width {
                let c = if (x, y) == self.agent {
                    '@'
                } else {
                    match self.map.patch_at(x, y) {
                        Some(PatchId::A) => 'A',
                        Some(PatchId::B) => 'B',
                        None => '.',
                    }
                };
                out.push(c);
            }
            out.push('\n');
        }
        out
    }
}

/// One recorded step of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajStep {
    /// 1-based step counter.
    pub step: u32,
    pub x: u32,
    pub y: u32,
    pub patch: Option<PatchId>,
    pub reward: f64,
    pub cue: f64,
    /// Cumulative score after this step.
    pub score: f64,
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::map::build_map;

    fn params() -> RewardParams {
        RewardParams::new(30.0, 0.01).unwrap()
    }

    fn fresh_env(distance: u32) -> PatchEnv {
        let map = build_map(distance, 3, 1).unwrap();
        PatchEnv::reset(map, params(), 5, 0).unwrap().0
    }

    #[test]
    fn reset_state_is_fresh() {
        let (env, obs) = PatchEnv::reset(build_map(3, 3, 1).unwrap(), params(), 5, 0).unwrap();
        assert_eq!(env.position(), (5, 2));
        assert_eq!(env.score(), 0.0);
        assert!(!obs.in_patch());
        assert_eq!(obs.cue, 0.0);
        assert_eq!(env.patch_state(PatchId::A).cue, 1.0);
        assert_eq!(env.patch_state(PatchId::B).cue, 1.0);
    }

    #[test]
    fn rejects_zero_view_radius() {
        let map = build_map(3, 3, 1).unwrap();
        assert!(PatchEnv::reset(map, params(), 0, 0).is_err());
    }

    #[test]
    fn walls_clamp_movement() {
        let mut env = fresh_env(3);
        for _ in 0..10 {
            env.step(Action::Up).unwrap();
        }
        assert_eq!(env.position().1, 0);
        for _ in 0..30 {
            env.step(Action::Right).unwrap();
        }
        assert_eq!(env.position().0, env.map().width - 1);
    }

    #[test]
    fn harvest_sequence_matches_schedule_exactly() {
        let mut env = fresh_env(3);
        // Spawn (5,2) -> two moves left land inside patch A's right edge.
        assert_eq!(env.step(Action::Left).unwrap().reward, 0.0);
        let p = params();
        let first = env.step(Action::Left).unwrap();
        assert_eq!(env.occupied(), Some(PatchId::A));
        assert!((first.reward - p.reward_at(1)).abs() < 1e-12);
        for n in 2..=20 {
            let out = env.step(Action::Stay).unwrap();
            assert!((out.reward - p.reward_at(n)).abs() < 1e-12, "harvest {n}");
        }
    }

    #[test]
    fn reward_positive_exactly_when_inside_a_patch() {
        let mut env = fresh_env(3);
        let mut rng = crate::rng::stream_rng(3, 0);
        use rand::Rng;
        for _ in 0..500 {
            let a = Action::ALL[rng.random_range(0..5)];
            let out = env.step(a).unwrap();
            assert_eq!(out.reward > 0.0, env.occupied().is_some());
        }
    }

    #[test]
    fn leaving_and_returning_does_not_replenish() {
        let mut env = fresh_env(3);
        env.step(Action::Left).unwrap();
        env.step(Action::Left).unwrap(); // in A, n=1
        env.step(Action::Stay).unwrap(); // n=2
        env.step(Action::Right).unwrap(); // corridor
        env.step(Action::Right).unwrap(); // corridor
        let back = env.step(Action::Left).unwrap(); // corridor, still outside
        assert_eq!(back.reward, 0.0);
        let again = env.step(Action::Left).unwrap(); // re-enter A
        assert!((again.reward - params().reward_at(3)).abs() < 1e-12);
    }

    #[test]
    fn entering_opposite_patch_replenishes_the_depleted_one() {
        let mut env = fresh_env(3);
        env.step(Action::Left).unwrap();
        env.step(Action::Left).unwrap();
        for _ in 0..5 {
            env.step(Action::Stay).unwrap();
        }
        assert_eq!(env.patch_state(PatchId::A).steps, 6);
        // Exactly 3 reward-free corridor tiles between A's right edge (x=3)
        // and B's left edge (x=7).
        for _ in 0..3 {
            assert_eq!(env.step(Action::Right).unwrap().reward, 0.0);
        }
        let in_b = env.step(Action::Right).unwrap();
        assert_eq!(env.occupied(), Some(PatchId::B));
        assert!((in_b.reward - params().reward_at(1)).abs() < 1e-12, "fresh B");
        assert_eq!(env.patch_state(PatchId::A).steps, 0);
        assert_eq!(env.patch_state(PatchId::A).cue, 1.0);
    }

    #[test]
    fn cue_tracks_depletion_of_occupied_patch_only() {
        let mut env = fresh_env(3);
        env.step(Action::Left).unwrap();
        let out = env.step(Action::Left).unwrap();
        assert!((out.observation.cue - (-0.01_f64).exp()).abs() < 1e-15);
        let p = params();
        for n in 2_u32..=10 {
            let out = env.step(Action::Stay).unwrap();
            let expected = p.reward_at(n) / p.peak;
            assert!((out.observation.cue - expected).abs() < 1e-12);
        }
        let outside = env.step(Action::Right).unwrap();
        assert_eq!(outside.observation.cue, 0.0);
    }

    #[test]
    fn episode_ends_after_configured_steps() {
        let map = build_map(3, 3, 1).unwrap().with_episode_steps(10);
        let (mut env, _) = PatchEnv::reset(map, params(), 5, 0).unwrap();
        for i in 1..=10 {
            let out = env.step(Action::Stay).unwrap();
            assert_eq!(out.done, i == 10);
        }
        assert!(matches!(env.step(Action::Stay), Err(Error::EpisodeOver)));
    }

    #[test]
    fn observation_window_shape_and_walls() {
        let env = fresh_env(3);
        let obs = env.observe(5);
        assert_eq!(obs.window_side, 11);
        assert_eq!(obs.tiles.len(), 121);
        // Grid is 5 tall; rows beyond it code as walls.
        assert_eq!(obs.tiles[0], TileCode::Wall);
        assert_eq!(obs.tiles[60], TileCode::Agent); // centre of an 11x11 window
        let obs3 = env.observe(1);
        assert_eq!(obs3.window_side, 3);
        assert_eq!(obs3.tiles.len(), 9);
    }

    #[test]
    fn other_patch_visibility_depends_on_radius() {
        // Gap 9: corridor midpoint is 5 tiles from each patch edge.
        let env = fresh_env(9);
        assert!(env.observe(5).other_patch_visible);
        assert!(!env.observe(4).other_patch_visible);
    }

    #[test]
    fn from_inside_a_patch_the_far_patch_is_out_of_view_at_gap_nine() {
        let mut env = fresh_env(9);
        for _ in 0..5 {
            env.step(Action::Left).unwrap();
        }
        assert_eq!(env.occupied(), Some(PatchId::A));
        let obs = env.observe(5);
        // Patch B's nearest edge is 10 tiles away from A's right edge.
        assert!(!obs.other_patch_visible);
        assert!(obs.in_patch());
    }

    #[test]
    fn score_accumulates_all_rewards() {
        let mut env = fresh_env(5);
        let mut rng = crate::rng::stream_rng(9, 1);
        use rand::Rng;
        let mut total = 0.0;
        for _ in 0..800 {
            let a = Action::ALL[rng.random_range(0..5)];
            total += env.step(a).unwrap().reward;
        }
        assert!((env.score() - total).abs() < 1e-9);
    }

    #[test]
    fn identical_seeds_and_actions_reproduce_trajectories() {
        let run = |seed: u64| {
            let map = build_map(5, 3, 1).unwrap();
            let (mut env, _) = PatchEnv::reset(map, params(), 5, seed).unwrap();
            let mut rng = crate::rng::stream_rng(77, 2);
            use rand::Rng;
            let mut log = Vec::new();
            for _ in 0..600 {
                let a = Action::ALL[rng.random_range(0..5)];
                let out = env.step(a).unwrap();
                log.push((env.position(), out.reward.to_bits(), env.score().to_bits()));
            }
            log
        };
        assert_eq!(run(4), run(4));
    }

    #[test]
    fn render_snapshots() {
        let mut env = fresh_env(3);
        assert_eq!(
            env.render_text(),
            "...........\n\
             .AAA...BBB.\n\
             .AAA.@.BBB.\n\
             .AAA...BBB.\n\
             ...........\n"
        );
        env.step(Action::Left).unwrap();
        assert_eq!(
            env.render_text(),
            "...........\n\
             .AAA...BBB.\n\
             .AAA@..BBB.\n\
             .AAA...BBB.\n\
             ...........\n"
        );
        env.step(Action::Left).unwrap();
        assert_eq!(
            env.render_text(),
            "...........\n\
             .AAA...BBB.\n\
             .AA@...BBB.\n\
             .AAA...BBB.\n\
             ...........\n"
        );
    }

    #[test]
    fn action_letters_round_trip() {
        for a in Action::ALL {
            assert_eq!(Action::from_letter(a.letter()), Some(a));
            assert_eq!(Action::from_letter(a.letter().to_ascii_lowercase()), Some(a));
        }
        assert_eq!(Action::from_letter('x'), None);
    }

    proptest! {
        #[test]
        fn at_most_one_patch_is_ever_depleted(seed in 0_u64..500) {
            let map = build_map(3, 3, 1).unwrap().with_episode_steps(300);
            let (mut env, _) = PatchEnv::reset(map, params(), 5, 0).unwrap();
            let mut rng = crate::rng::stream_rng(seed, 0);
            use rand::Rng;
            while !env.done() {
                env.step(Action::ALL[rng.random_range(0..5)]).unwrap();
                let a = env.patch_state(PatchId::A).steps;
                let b = env.patch_state(PatchId::B).steps;
                prop_assert!(a == 0 || b == 0);
            }
        }

        #[test]
        fn agent_stays_in_bounds(seed in 0_u64..200) {
            let map = build_map(5, 3, 1).unwrap().with_episode_steps(200);
            let (w, h) = (map.width, map.height);
            let (mut env, _) = PatchEnv::reset(map, params(), 5, 0).unwrap();
            let mut rng = crate::rng::stream_rng(seed, 3);
            use rand::Rng;
            while !env.done() {
                env.step(Action::ALL[rng.random_range(0..5)]).unwrap();
                let (x, y) = env.position();
                prop_assert!(x < w && y < h);
            }
        }
    }
}

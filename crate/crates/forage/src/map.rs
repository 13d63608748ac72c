//! Corridor maps: two square resource patches separated by open ground.
//!
//! Maps are value types. The builder produces the canonical layout (patches
//! at both ends of a corridor, spawn in the middle); arbitrary layouts can
//! be loaded from a map file as long as they validate.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Episode length used by `build_map`; override with `with_episode_steps`.
pub const DEFAULT_EPISODE_STEPS: u32 = 1500;

/// Identifies one of the two patches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatchId {
    A,
    B,
}

impl PatchId {
    pub const BOTH: [PatchId; 2] = [PatchId::A, PatchId::B];

    pub fn opposite(self) -> PatchId {
        match self {
            PatchId::A => PatchId::B,
            PatchId::B => PatchId::A,
        }
    }

    /// Slot in per-patch arrays.
    pub fn index(self) -> usize {
        match self {
            PatchId::A => 0,
            PatchId::B => 1,
        }
    }

    /// Numeric code used in CSV output; 0 is reserved for "outside".
    pub fn code(self) -> u8 {
        match self {
            PatchId::A => 1,
            PatchId::B => 2,
        }
    }
}

/// A rectangular grid holding two disjoint patch regions, a spawn tile, and
/// the episode length for runs on this map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldMap {
    pub width: u32,
    pub height: u32,
    /// Tiles of patch A, row-major order.
    pub patch_a: Vec<(u32, u32)>,
    /// Tiles of patch B, row-major order.
    pub patch_b: Vec<(u32, u32)>,
    /// Open tiles between the patches' nearest edges.
    pub travel_gap: u32,
    pub spawn: (u32, u32),
    pub episode_steps: u32,
}

impl WorldMap {
    /// Patch containing the tile, if any.
    pub fn patch_at(&self, x: u32, y: u32) -> Option<PatchId> {
        if self.patch_a.contains(&(x, y)) {
            Some(PatchId::A)
        } else if self.patch_b.contains(&(x, y)) {
            Some(PatchId::B)
        } else {
            None
        }
    }

    pub fn tiles(&self, patch: PatchId) -> &[(u32, u32)] {
        match patch {
            PatchId::A => &self.patch_a,
            PatchId::B => &self.patch_b,
        }
    }

    pub fn in_bounds(&self, x: u32, y: u32) -> bool {
        x < self.width && y < self.height
    }

    /// Row-major tile index.
    pub fn tile_index(&self, x: u32, y: u32) -> u32 {
        y * self.width + x
    }

    pub fn tile_count(&self) -> u32 {
        self.width * self.height
    }

    /// Same layout regardless of episode length.
    pub fn geometry_matches(&self, other: &WorldMap) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.patch_a == other.patch_a
            && self.patch_b == other.patch_b
            && self.travel_gap == other.travel_gap
            && self.spawn == other.spawn
    }

    pub fn with_episode_steps(&self, episode_steps: u32) -> WorldMap {
        WorldMap { episode_steps, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Geometry("grid must have positive dimensions".into()));
        }
        if self.patch_a.is_empty() || self.patch_b.is_empty() {
            return Err(Error::Geometry("both patches must be non-empty".into()));
        }
        if self.episode_steps < 1 {
            return Err(Error::Geometry("episode length must be at least 1".into()));
        }
        for &(x, y) in self.patch_a.iter().chain(&self.patch_b) {
            if !self.in_bounds(x, y) {
                return Err(Error::Geometry(format!("patch tile ({x}, {y}) out of bounds")));
            }
        }
        let a: HashSet<_> = self.patch_a.iter().collect();
        if self.patch_b.iter().any(|t| a.contains(t)) {
            return Err(Error::Geometry("patch regions overlap".into()));
        }
        if !self.in_bounds(self.spawn.0, self.spawn.1) {
            return Err(Error::Geometry("spawn tile out of bounds".into()));
        }
        if self.patch_at(self.spawn.0, self.spawn.1).is_some() {
            return Err(Error::Geometry("spawn tile must lie outside both patches".into()));
        }
        let measured = measured_gap(&self.patch_a, &self.patch_b);
        if measured != self.travel_gap {
            return Err(Error::Geometry(format!(
                "declared travel gap {} but measured {measured}",
                self.travel_gap
            )));
        }
        Ok(())
    }

    /// Write the map description as pretty JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut body = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("map serialization failed: {e}")))?;
        body.push('\n');
        fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    /// Load and validate a map description file.
    pub fn load(path: &Path) -> Result<WorldMap> {
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let map: WorldMap = serde_json::from_str(&body)
            .map_err(|e| Error::Parse { path: path.into(), message: e.to_string() })?;
        map.validate()?;
        Ok(map)
    }
}

/// Minimum Manhattan distance between the regions, minus one: the number of
/// open tiles strictly between their nearest edges.
fn measured_gap(a: &[(u32, u32)], b: &[(u32, u32)]) -> u32 {
    let mut best = u32::MAX;
    for &(ax, ay) in a {
        for &(bx, by) in b {
            let d = ax.abs_diff(bx) + ay.abs_diff(by);
            best = best.min(d);
        }
    }
    best.saturating_sub(1)
}

/// Build the canonical corridor layout: two `patch_side`-square patches with
/// exactly `distance` open tiles between their facing edges, wrapped in
/// `corridor_margin` rows/columns of open ground, spawn at the corridor
/// midpoint. Episode length defaults to [`DEFAULT_EPISODE_STEPS`].
pub fn build_map(distance: u32, patch_side: u32, corridor_margin: u32) -> Result<WorldMap> {
    if distance < 1 {
        return Err(Error::Geometry("patch distance must be at least 1 tile".into()));
    }
    if patch_side < 1 {
        return Err(Error::Geometry("patch side must be at least 1 tile".into()));
    }
    let width = 2 * corridor_margin + 2 * patch_side + distance;
    let height = 2 * corridor_margin + patch_side;

    let square = |x0: u32| -> Vec<(u32, u32)> {
        let mut tiles = Vec::with_capacity((patch_side * patch_side) as usize);
        for y in corridor_margin..corridor_margin + patch_side {
            for x in x0..x0 + patch_side {
                tiles.push((x, y));
            }
        }
        tiles
    };
    let patch_a = square(corridor_margin);
    let patch_b = square(corridor_margin + patch_side + distance);
    let spawn = (corridor_margin + patch_side + distance / 2, corridor_margin + patch_side / 2);

    let map = WorldMap {
        width,
        height,
        patch_a,
        patch_b,
        travel_gap: distance,
        spawn,
        episode_steps: DEFAULT_EPISODE_STEPS,
    };
    map.validate()?;
    Ok(map)
}

/// Draw one map uniformly; returns its index alongside the reference.
pub fn sample_map<'a>(maps: &'a [WorldMap], rng: &mut ChaCha8Rng) -> Result<(usize, &'a WorldMap)> {
    if maps.is_empty() {
        return Err(Error::Param("cannot sample from an empty map set".into()));
    }
    let idx = rng.random_range(0..maps.len());
    Ok((idx, &maps[idx]))
}

//! Tile-visit counting and its image/CSV exports.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::map::WorldMap;

use super::probe::EpisodeRecord;

/// Per-tile visit counts accumulated over a set of episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: u32,
    height: u32,
    /// Row-major counts, one per tile.
    counts: Vec<u64>,
    /// Total positions recorded; always equals the sum of `counts`.
    total: u64,
}

/// Count the agent's position after every step of every record.
pub fn occupancy_map(records: &[EpisodeRecord], map: &WorldMap) -> Result<OccupancyGrid> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records to count".into()));
    }
    let mut counts = vec![0_u64; (map.width * map.height) as usize];
    let mut total = 0_u64;
    for record in records {
        for step in &record.steps {
            if !map.in_bounds(step.x, step.y) {
                return Err(Error::Shape(format!(
                    "position ({}, {}) lies outside the {}x{} map",
                    step.x, step.y, map.width, map.height
                )));
            }
            counts[map.tile_index(step.x, step.y) as usize] += 1;
            total += 1;
        }
    }
    Ok(OccupancyGrid { width: map.width, height: map.height, counts, total })
}

impl OccupancyGrid {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Pixels-per-count factor used by [`OccupancyGrid::to_pgm`]; 0 for an
    /// all-zero grid.
    pub fn scale(&self) -> f64 {
        match self.max_count() {
            0 => 0.0,
            max => 255.0 / max as f64,
        }
    }

    /// Plain-text 8-bit PGM, one pixel per tile, counts rescaled so the
    /// busiest tile is white.
    pub fn to_pgm(&self) -> String {
        let max = self.max_count();
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for row in self.counts.chunks(self.width as usize) {
            let mut line = String::new();
            for (i, &count) in row.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                let pixel = (count * 255).checked_div(max).unwrap_or(0);
                write!(line, "{pixel}").expect("writing to a string cannot fail");
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Raw counts as CSV, one row per map row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.counts.chunks(self.width as usize) {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

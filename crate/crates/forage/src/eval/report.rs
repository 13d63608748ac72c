//! Report assembly and export: one JSON document plus the CSV and PGM
//! artifacts it references.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::agents::RuntimePolicy;
use crate::env::TrajStep;
use crate::error::{Error, Result};
use crate::map::PatchId;

use super::fidelity::FidelitySummary;
use super::occupancy::OccupancyGrid;
use super::probe::EpisodeRecord;
use super::stats::{MvtComparison, SampleStats};

fn patch_code(patch: Option<PatchId>) -> u8 {
    patch.map_or(0, PatchId::code)
}

/// One exported step: the encoded state as plain numbers plus its value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub tile_index: u32,
    pub patch_id: u8,
    pub cue_bin: u16,
    pub other_fresh: u8,
    pub state_value: f64,
}

/// Flatten every step of every record into numeric feature rows for
/// external projection tools; the row count equals the total step count.
pub fn latent_feature_dump(
    policy: &RuntimePolicy,
    records: &[EpisodeRecord],
) -> Result<Vec<FeatureRow>> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records to dump features from".into()));
    }
    let mut rows = Vec::with_capacity(records.iter().map(|r| r.states.len()).sum());
    for record in records {
        for state in &record.states {
            rows.push(FeatureRow {
                tile_index: state.tile,
                patch_id: patch_code(state.patch),
                cue_bin: state.cue_bin,
                other_fresh: patch_code(state.fresh_side),
                state_value: policy.q().state_value(state),
            });
        }
    }
    Ok(rows)
}

/// Occupancy numbers echoed into the report next to the file names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancySummary {
    pub total: u64,
    pub max_count: u64,
    /// Pixels-per-count factor applied in the PGM.
    pub scale: f64,
    pub pgm: String,
    pub csv: String,
}

/// Everything reported about one travel-distance scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub x_bar: u32,
    pub n_star: u32,
    pub mvt_rate: f64,
    pub residence_stats: SampleStats,
    pub scores: SampleStats,
    pub within_quartile_band: bool,
    pub mean_abs_deviation: f64,
    /// Mean over episodes of each episode's mean visit length.
    pub episode_mean_residence: f64,
    pub occupancy: OccupancySummary,
}

impl ScenarioReport {
    pub fn new(
        comparison: &MvtComparison,
        residence_stats: SampleStats,
        scores: SampleStats,
        episode_mean_residence: f64,
        grid: &OccupancyGrid,
    ) -> ScenarioReport {
        let x_bar = comparison.x_bar;
        ScenarioReport {
            x_bar,
            n_star: comparison.n_star,
            mvt_rate: comparison.optimal_rate,
            residence_stats,
            scores,
            within_quartile_band: comparison.within_quartile_band,
            mean_abs_deviation: comparison.mean_abs_deviation,
            episode_mean_residence,
            occupancy: OccupancySummary {
                total: grid.total(),
                max_count: grid.max_count(),
                scale: grid.scale(),
                pgm: format!("occupancy_x{x_bar}.pgm"),
                csv: format!("occupancy_x{x_bar}.csv"),
            },
        }
    }
}

/// The full evaluation report serialized to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenarios: Vec<ScenarioReport>,
    /// Absent for policies without a transition model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dream_fidelity: Option<FidelitySummary>,
    /// Effective configuration the run used.
    pub config_echo: serde_json::Value,
}

/// Per-scenario files that accompany the report.
#[derive(Debug, Clone)]
pub struct ScenarioFiles {
    pub grid: OccupancyGrid,
    /// Sample trajectory (first replication).
    pub trajectory: Vec<TrajStep>,
}

/// A report plus everything export writes next to it.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub report: Report,
    /// Parallel to `report.scenarios`.
    pub scenario_files: Vec<ScenarioFiles>,
    pub features: Vec<FeatureRow>,
}

/// Render a trajectory as CSV.
pub fn trajectory_csv(steps: &[TrajStep]) -> String {
    let mut out = String::from("step,x,y,in_patch,patch_id,reward,cue,score\n");
    for s in steps {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.step,
            s.x,
            s.y,
            u8::from(s.patch.is_some()),
            patch_code(s.patch),
            s.reward,
            s.cue,
            s.score
        )
        .expect("writing to a string cannot fail");
    }
    out
}

/// Render feature rows as CSV.
pub fn features_csv(rows: &[FeatureRow]) -> String {
    let mut out = String::from("tile_index,patch_id,cue_bin,other_fresh,state_value\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.tile_index, r.patch_id, r.cue_bin, r.other_fresh, r.state_value
        )
        .expect("writing to a string cannot fail");
    }
    out
}

/// Render a learning curve with its smoothed companion as CSV.
pub fn curves_csv(returns: &[f64], smoothed: &[f64]) -> Result<String> {
    if returns.len() != smoothed.len() {
        return Err(Error::Shape(format!(
            "curve lengths differ: {} returns, {} smoothed",
            returns.len(),
            smoothed.len()
        )));
    }
    let mut out = String::from("episode,return,smoothed_return\n");
    for (i, (r, s)) in returns.iter().zip(smoothed).enumerate() {
        writeln!(out, "{},{},{}", i + 1, r, s).expect("writing to a string cannot fail");
    }
    Ok(out)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write `report.json` and every referenced artifact into `dir`, creating
/// it if needed. Returns the written paths in write order.
pub fn export_report(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    if bundle.scenario_files.len() != bundle.report.scenarios.len() {
        return Err(Error::Shape(format!(
            "{} scenarios but {} file sets",
            bundle.report.scenarios.len(),
            bundle.scenario_files.len()
        )));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let mut json = serde_json::to_string_pretty(&bundle.report)
        .map_err(|e| Error::Internal(format!("could not serialize report: {e}")))?;
    json.push('\n');
    let report_path = dir.join("report.json");
    write_text(&report_path, &json)?;
    written.push(report_path);

    for (scenario, files) in bundle.report.scenarios.iter().zip(&bundle.scenario_files) {
        let pgm = dir.join(&scenario.occupancy.pgm);
        write_text(&pgm, &files.grid.to_pgm())?;
        written.push(pgm);
        let csv = dir.join(&scenario.occupancy.csv);
        write_text(&csv, &files.grid.to_csv())?;
        written.push(csv);
        let trajectory = dir.join(format!("trajectory_x{}.csv", scenario.x_bar));
        write_text(&trajectory, &trajectory_csv(&files.trajectory))?;
        written.push(trajectory);
    }

    let features = dir.join("features.csv");
    write_text(&features, &features_csv(&bundle.features))?;
    written.push(features);
    Ok(written)
}

//! Evaluation protocol: frozen-policy probes, residence statistics against
//! the analytic optimum, occupancy maps, imagined-rollout fidelity, and the
//! report bundle that ties them together.

pub mod fidelity;
pub mod occupancy;
pub mod probe;
pub mod report;
pub mod stats;

pub use fidelity::{dream_fidelity, DreamStart, FidelitySummary};
pub use occupancy::{occupancy_map, OccupancyGrid};
pub use probe::{run_probe, EpisodeRecord, ExperimentConfig};
pub use report::{
    curves_csv, export_report, features_csv, latent_feature_dump, trajectory_csv, FeatureRow,
    OccupancySummary, Report, ReportBundle, ScenarioFiles, ScenarioReport,
};
pub use stats::{
    compare_to_mvt, curve_mean_std, residence_runs, smooth_ema, smooth_pairwise, summarize,
    MvtComparison, SampleStats,
};

//! Command-line front end: solve the patch-leaving optimum, train agents,
//! probe frozen policies, and replay scripted episodes.

use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use forage::agents::{train, AgentKind, PolicyArtifact, RuntimePolicy};
use forage::config::{RunConfig, CORRIDOR_MARGIN};
use forage::env::{Action, PatchEnv};
use forage::error::{Error, Result};
use forage::eval::{
    compare_to_mvt, curves_csv, dream_fidelity, export_report, latent_feature_dump, occupancy_map,
    residence_runs, run_probe, summarize, trajectory_csv, DreamStart, Report, ReportBundle,
    ScenarioFiles, ScenarioReport,
};
use forage::map::{build_map, PatchId};
use forage::mvt::{marginal_condition_check, optimal_residence};
use forage::rng::derive_seed;

/// Imagination depth for the dream-fidelity analysis, deeper than the
/// planning horizon so depletion has room to show.
const DREAM_HORIZON: u32 = 50;

#[derive(Parser)]
#[command(name = "forage", version, about = "Patch-foraging simulator and benchmark")]
struct Cli {
    /// TOML run configuration; defaults apply for every missing key.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed, overriding the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the analytic patch-leaving optimum per distance as JSON.
    Mvt,
    /// Train the configured agent; writes policy.json and curves.csv.
    Train {
        /// Agent kind, overriding the config file (model_free or model_based).
        #[arg(long)]
        kind: Option<AgentKind>,
    },
    /// Probe a trained policy across all scenarios and write the report.
    Probe {
        /// Policy artifact to probe; defaults to <out>/policy.json.
        #[arg(long, value_name = "PATH")]
        artifact: Option<PathBuf>,
    },
    /// Replay a scripted action sequence, printing the world every step.
    Play {
        /// Patch distance to play on; defaults to the first configured one.
        #[arg(long)]
        distance: Option<u32>,
        /// Action letters (U, D, L, R, S); read from stdin when omitted.
        #[arg(long)]
        script: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests succeed; everything else is a
            // usage error.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.eval.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.display().to_string();
    }
    match cli.command {
        Command::Mvt => cmd_mvt(&config),
        Command::Train { kind } => {
            if let Some(kind) = kind {
                config.agent.kind = kind;
            }
            cmd_train(&config)
        }
        Command::Probe { artifact } => cmd_probe(&config, artifact.as_deref()),
        Command::Play { distance, script } => cmd_play(&config, distance, script.as_deref()),
    }
}

/// Solve the optimum for every configured distance and print JSON rows.
fn cmd_mvt(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let params = config.reward_params()?;
    let scan_bound = config.env.episode_steps;
    let mut rows = Vec::with_capacity(config.env.distances.len());
    for &distance in &config.env.distances {
        let travel = f64::from(distance);
        let solution = optimal_residence(&params, travel, scan_bound)?;
        let marginal_ok = marginal_condition_check(&params, travel, solution.optimal_steps)?;
        rows.push(serde_json::json!({
            "x_bar": distance,
            "n_star": solution.optimal_steps,
            "optimal_rate": solution.optimal_rate,
            "marginal_ok": marginal_ok,
        }));
    }
    let text = serde_json::to_string_pretty(&rows)
        .map_err(|e| Error::Internal(format!("could not serialize rows: {e}")))?;
    println!("{text}");
    Ok(())
}

/// Train the configured agent and write the artifact plus learning curve.
fn cmd_train(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let reward = config.reward_params()?;
    let maps = config.maps()?;
    let agent = config.agent_config();
    let result = train(
        config.agent.kind,
        &maps,
        reward,
        config.env.view_radius,
        &agent,
        config.eval.master_seed,
    )?;
    let smoothed = config.smoothing.mode.apply(&result.curve, config.smoothing.omega)?;
    let curves = curves_csv(&result.curve, &smoothed)?;
    let artifact =
        PolicyArtifact::from_training(&result, &maps, reward, config.env.view_radius, &agent);

    let dir = Path::new(&config.output.dir);
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let policy_path = dir.join("policy.json");
    artifact.save(&policy_path)?;
    let curves_path = dir.join("curves.csv");
    fs::write(&curves_path, curves).map_err(|e| Error::io(&curves_path, e))?;

    println!(
        "trained {} agent for {} episodes; best return {:.3} at episode {}",
        config.agent.kind, agent.episodes, result.best_return, result.best_episode
    );
    println!("wrote {}", policy_path.display());
    println!("wrote {}", curves_path.display());
    Ok(())
}

/// Probe a frozen policy over every scenario and export the full report.
fn cmd_probe(config: &RunConfig, artifact_path: Option<&Path>) -> Result<()> {
    config.validate()?;
    let dir = PathBuf::from(&config.output.dir);
    let default_path = dir.join("policy.json");
    let path = artifact_path.unwrap_or(&default_path);
    let artifact = PolicyArtifact::load(path)?;
    let policy = RuntimePolicy::from_artifact(&artifact)?;
    let reward = config.reward_params()?;
    let experiment = config.experiment_config();
    let maps = config.maps()?;

    let mut scenarios = Vec::with_capacity(maps.len());
    let mut files = Vec::with_capacity(maps.len());
    let mut features = Vec::new();
    for (index, map) in maps.iter().enumerate() {
        let distance = map.travel_gap;
        let solution =
            optimal_residence(&reward, f64::from(distance), experiment.episode_steps)?;

        let stats_seed = derive_seed(experiment.master_seed, 100 + index as u64);
        let records =
            run_probe(&policy, map, experiment.repetitions, experiment.episode_steps, stats_seed)?;
        let mut runs = Vec::new();
        let mut episode_means = Vec::new();
        for record in &records {
            let lengths = residence_runs(&record.steps);
            if !lengths.is_empty() {
                let total: u32 = lengths.iter().sum();
                episode_means.push(f64::from(total) / lengths.len() as f64);
            }
            runs.extend(lengths.into_iter().map(f64::from));
        }
        if runs.is_empty() {
            return Err(Error::InsufficientData(format!(
                "policy never entered a patch at x_bar={distance}; no residence statistics"
            )));
        }
        let residence_stats = summarize(&runs)?;
        let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
        let score_stats = summarize(&scores)?;
        let episode_mean_residence = if episode_means.is_empty() {
            0.0
        } else {
            episode_means.iter().sum::<f64>() / episode_means.len() as f64
        };
        let comparison = compare_to_mvt(&residence_stats, &solution, distance);

        let occupancy_seed = derive_seed(experiment.master_seed, 200 + index as u64);
        let occupancy_records = run_probe(
            &policy,
            map,
            experiment.repetitions,
            experiment.occupancy_steps,
            occupancy_seed,
        )?;
        let grid = occupancy_map(&occupancy_records, map)?;

        features.extend(latent_feature_dump(&policy, std::slice::from_ref(&records[0]))?);
        scenarios.push(ScenarioReport::new(
            &comparison,
            residence_stats,
            score_stats,
            episode_mean_residence,
            &grid,
        ));
        files.push(ScenarioFiles { grid, trajectory: records[0].steps.clone() });
    }

    let dreams = match policy.kind() {
        AgentKind::ModelBased => {
            let starts: Vec<DreamStart> = (0..maps.len())
                .flat_map(|map_index| {
                    [
                        DreamStart { map_index, patch: PatchId::A },
                        DreamStart { map_index, patch: PatchId::B },
                    ]
                })
                .collect();
            Some(dream_fidelity(&policy, &starts, DREAM_HORIZON)?)
        }
        AgentKind::ModelFree => None,
    };

    let config_echo = serde_json::to_value(config)
        .map_err(|e| Error::Internal(format!("could not echo config: {e}")))?;
    let bundle = ReportBundle {
        report: Report { scenarios, dream_fidelity: dreams, config_echo },
        scenario_files: files,
        features,
    };
    let written = export_report(&bundle, &dir)?;

    for scenario in &bundle.report.scenarios {
        println!(
            "x_bar={}: n*={}, mean residence {:.2}, within quartile band: {}",
            scenario.x_bar,
            scenario.n_star,
            scenario.residence_stats.mean,
            scenario.within_quartile_band
        );
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn parse_script(text: &str) -> Result<Vec<Action>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            Action::from_letter(c)
                .ok_or_else(|| Error::Config(format!("unknown action letter {c:?} in script")))
        })
        .collect()
}

/// Replay a scripted action sequence, printing the render each step and
/// writing the trajectory CSV.
fn cmd_play(config: &RunConfig, distance: Option<u32>, script: Option<&str>) -> Result<()> {
    config.validate()?;
    let text = match script {
        Some(s) => s.to_string(),
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| Error::io(Path::new("stdin"), e))?;
            buffer
        }
    };
    let actions = parse_script(&text)?;

    let distance = distance.unwrap_or(config.env.distances[0]);
    let map = build_map(distance, config.env.patch_side, CORRIDOR_MARGIN)?
        .with_episode_steps(config.env.episode_steps);
    let reward = config.reward_params()?;
    let (mut env, _) = PatchEnv::reset(
        map,
        reward,
        config.env.view_radius,
        derive_seed(config.eval.master_seed, 300),
    )?;
    println!("step 0 (reset)");
    println!("{}", env.render_text());

    let mut trace = Vec::with_capacity(actions.len());
    for action in actions {
        let out = env.step(action)?;
        let (x, y) = env.position();
        trace.push(forage::env::TrajStep {
            step: env.steps_taken(),
            x,
            y,
            patch: env.occupied(),
            reward: out.reward,
            cue: out.observation.cue,
            score: env.score(),
        });
        println!(
            "step {} action {} reward {:.4} score {:.4}",
            env.steps_taken(),
            action.letter(),
            out.reward,
            env.score()
        );
        println!("{}", env.render_text());
        if out.done {
            break;
        }
    }

    let dir = PathBuf::from(&config.output.dir);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let path = dir.join("play_trajectory.csv");
    fs::write(&path, trajectory_csv(&trace)).map_err(|e| Error::io(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

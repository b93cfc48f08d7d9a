#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! `sklab`: simulate paths, compute M1 distances, draw from the limit and run experiments.

mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};
use sklab::experiments::{run_experiment, ConfigOverrides, Experiment, ExperimentConfig, ExperimentReport};
use sklab::limits::{limit_spec_for, simulate_limit_joint, truncation_tail_bound, LimitRun, MarkLaw};
use sklab::models::{gn_path, moving_maxima_sequence, norming, partial_processes, truncated_process};
use sklab::skorokhod::{m1_distance, omega_delta, wm1_distance, M1Options};
use sklab::stats::quantile;
use sklab::CadlagPath;

use args::{Cli, Command, DistCommand, ExpArgs, LimitArgs, ModelArgs, Process, ReportCommand, SimulateArgs};

const SEED_ENV: &str = "SKLAB_SEED";

/// Failed criteria.
const EXIT_FAILED: u8 = 1;
/// Bad configuration, bad input or a library error.
const EXIT_CONFIG: u8 = 2;

enum Outcome {
    Done,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match sklab::par::with_threads(cli.threads, || dispatch(cli.command)) {
        Ok(Ok(Outcome::Done)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::Failed)) => ExitCode::from(EXIT_FAILED),
        Ok(Err(msg)) | Err(sklab::Error::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome, String> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Dist(d) => dist(d),
        Command::Limit(a) => limit(a),
        Command::Exp(a) => exp(a),
        Command::Report { command: ReportCommand::Merge { reports, out } } => merge(&reports, out.as_deref()),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn emit(value: &impl serde::Serialize, out: Option<&Path>) -> Result<(), String> {
    let text = sklab::experiments::canonical_json(value).map_err(err)?;
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn model_of(m: &ModelArgs) -> Result<sklab::models::MovingMaximaModel, String> {
    sklab::models::MovingMaximaModel::new(m.alpha, m.coefficients.clone()).map_err(err)
}

fn simulate(a: SimulateArgs) -> Result<Outcome, String> {
    let model = model_of(&a.model)?;
    let a_n = norming(&model, a.n, a.norming.into()).map_err(err)?;
    let sample = moving_maxima_sequence(&model, a.n, a.seed);
    let path = match a.process {
        Process::Pair => partial_processes(&sample, a_n),
        Process::Truncated => truncated_process(&sample, a_n, a.u),
        Process::Difference => gn_path(&sample, a_n),
    }
    .map_err(err)?;
    emit(&json!({ "a_n": a_n, "n": a.n, "seed": a.seed, "path": path }), a.out.as_deref())?;
    Ok(Outcome::Done)
}

/// Accepts a bare path or any object with a `path` field (such as `simulate` output).
fn read_path(file: &Path) -> Result<CadlagPath, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    let inner = match value.get("path") {
        Some(p) => p.clone(),
        None => value,
    };
    serde_json::from_value(inner).map_err(|e| format!("{}: {e}", file.display()))
}

fn dist(d: DistCommand) -> Result<Outcome, String> {
    let result = match d {
        DistCommand::M1 { x, y, tolerance } => {
            let opts = M1Options { tolerance, ..Default::default() };
            serde_json::to_value(m1_distance(&read_path(&x)?, &read_path(&y)?, &opts).map_err(err)?)
        }
        DistCommand::Wm1 { x, y, tolerance } => {
            let opts = M1Options { tolerance, ..Default::default() };
            serde_json::to_value(wm1_distance(&read_path(&x)?, &read_path(&y)?, &opts).map_err(err)?)
        }
        DistCommand::Omega { x, delta } => {
            Ok(json!({ "delta": delta, "omega": omega_delta(&read_path(&x)?, delta).map_err(err)? }))
        }
    }
    .map_err(err)?;
    emit(&result, None)?;
    Ok(Outcome::Done)
}

fn limit(a: LimitArgs) -> Result<Outcome, String> {
    let model = model_of(&a.model)?;
    let spec = limit_spec_for(&model).map_err(err)?;
    let marks = MarkLaw::for_model(&model);
    let mode: sklab::models::NormingMode = a.norming.into();
    let scale = mode.mark_scale(&model);
    let run = LimitRun::new(a.t_grid.clone(), a.truncation, a.reps, a.seed).with_point_scale(scale);
    let samples = simulate_limit_joint(&spec, &marks, &run).map_err(err)?;
    let summary: Vec<Value> = a
        .t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (v, w) = (samples.v_at(k), samples.w_at(k));
            let q = |s: &[f64]| json!({ "q10": quantile(s, 0.1), "median": quantile(s, 0.5), "q90": quantile(s, 0.9) });
            json!({ "t": t, "v": q(&v), "w": q(&w) })
        })
        .collect();
    if let Some(path) = &a.samples_csv {
        let mut csv = String::from("replica,t,v,w\n");
        for rep in 0..a.reps {
            for (k, t) in a.t_grid.iter().enumerate() {
                csv.push_str(&format!("{rep},{t:?},{:?},{:?}\n", samples.v(rep, k), samples.w(rep, k)));
            }
        }
        fs::write(path, csv).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    emit(
        &json!({
            "spec": spec,
            "seed": a.seed,
            "reps": a.reps,
            "truncation": a.truncation,
            "mark_scale": scale,
            "tail_bound": truncation_tail_bound(&spec, &marks, a.truncation, scale),
            "quantiles": summary,
        }),
        a.out.as_deref(),
    )?;
    Ok(Outcome::Done)
}

fn read_config_file(path: &Path) -> Result<ConfigOverrides, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(err)
    } else {
        toml::from_str(&text).map_err(err)
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

fn seed_from_env() -> Result<ConfigOverrides, String> {
    match std::env::var(SEED_ENV) {
        Ok(s) => {
            let seed =
                s.trim().parse().map_err(|_| format!("{SEED_ENV} must be a 64-bit unsigned integer, got {s:?}"))?;
            Ok(ConfigOverrides { seed: Some(seed), ..Default::default() })
        }
        Err(_) => Ok(ConfigOverrides::default()),
    }
}

/// Defaults, then the config file, then `SKLAB_SEED`, then flags.
fn resolve_config(experiment: Experiment, a: &ExpArgs) -> Result<ExperimentConfig, String> {
    let file = match &a.config {
        Some(p) => read_config_file(p)?,
        None => ConfigOverrides::default(),
    };
    let merged = file.merge(seed_from_env()?).merge(a.overrides());
    Ok(ExperimentConfig::defaults(experiment).with_overrides(merged))
}

fn write_curves(report: &ExperimentReport, dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for (name, curve) in &report.curves {
        let path = dir.join(format!("{}_{name}.csv", report.experiment));
        fs::write(&path, curve.to_csv()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn exp(a: ExpArgs) -> Result<Outcome, String> {
    let experiment: Experiment = a.experiment.parse().map_err(err)?;
    let config = resolve_config(experiment, &a)?;
    let report = run_experiment(experiment, &config).map_err(err)?;
    eprint!("{}", report.summary());
    emit(&report, a.out.as_deref())?;
    if let Some(dir) = &a.csv_dir {
        write_curves(&report, dir)?;
    }
    Ok(if report.all_pass() { Outcome::Done } else { Outcome::Failed })
}

fn merge(files: &[PathBuf], out: Option<&Path>) -> Result<Outcome, String> {
    let reports = files
        .iter()
        .map(|f| {
            let text = fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
            serde_json::from_str::<ExperimentReport>(&text).map_err(|e| format!("{}: {e}", f.display()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let all = reports.iter().all(ExperimentReport::all_pass);
    emit(&reports, out)?;
    Ok(if all { Outcome::Done } else { Outcome::Failed })
}

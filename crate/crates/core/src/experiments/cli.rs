//! Command-line verbs. [`run`] returns the process exit code.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use super::canonical::{self, CanonicalName};
use super::config::{ConfigError, RunConfig};
use crate::diagnostics::{audit, sup_gap, AuditThresholds};
use crate::dynamics::ModelKind;
use crate::error::Error;
use crate::integrator::integrate;
use crate::trajectory::TrajectoryRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_BREACH: i32 = 4;
pub const EXIT_RUNAWAY: i32 = 5;
pub const EXIT_ACCEPTANCE: i32 = 6;

/// Exit code for an error raised while building or integrating a run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::StepSizeUnderflow { .. } | Error::NonFinite(_) => EXIT_CONVERGENCE,
        Error::MaximalAccelBreach { .. } | Error::DomainBreach { .. } => EXIT_BREACH,
        Error::RunawayAbort { .. } => EXIT_RUNAWAY,
        Error::InvalidArgument(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "radreact", version, about = "Radiation-reaction trajectories and invariant audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Output directory, replacing `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(dt) = self.dt {
            cfg.solver.dt = dt;
        }
        if let Some(tol) = self.tol {
            cfg.solver.tol = tol;
        }
        cfg.validate()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one configured run and audit it.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run one configured scenario under several models and report the gaps.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Model name; repeat for each model.
        #[arg(long = "model", required = true)]
        models: Vec<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a built-in scenario and print its checks.
    Canonical {
        #[arg(value_enum)]
        name: CanonicalName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for `<name>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit a trajectory CSV written by `simulate` (reads the `.meta.json` sidecar).
    Audit {
        trajectory: PathBuf,
        /// Config whose `[audit]` thresholds replace the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report path; defaults to `<stem>.audit.json` next to the trajectory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Simulate { config, overrides } => simulate(&config, &overrides),
        Command::Compare {
            config,
            models,
            overrides,
        } => compare(&config, &models, &overrides),
        Command::Canonical { name, seed, out } => run_canonical(name, seed, out.as_deref()),
        Command::Audit {
            trajectory,
            config,
            out,
        } => run_audit(&trajectory, config.as_deref(), out.as_deref()),
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, i32> {
    let mut cfg = RunConfig::load(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    overrides.apply(&mut cfg).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    std::fs::write(path, text + "\n")
}

fn io_failure(e: std::io::Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_FAILURE
}

/// Runs a config, returning the record (partial on abort) and the error, if any.
fn execute(cfg: &RunConfig) -> Result<(TrajectoryRecord, Option<Error>), Error> {
    let init = cfg.initial_state()?;
    let span = (cfg.span.start, cfg.span.end);
    Ok(match integrate(&cfg.model, &cfg.field, &init, span, &cfg.solver) {
        Ok(t) => (t, None),
        Err(ab) => (ab.partial, Some(ab.error)),
    })
}

fn simulate(path: &Path, overrides: &Overrides) -> i32 {
    let cfg = match load(path, overrides) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let (traj, failure) = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.output.dir) {
        return io_failure(e);
    }
    let report = audit(&traj, &cfg.model, &cfg.field, &cfg.audit);
    let written = traj
        .write_files(&cfg.csv_path())
        .and_then(|_| write_json(&cfg.audit_path(), &report));
    if let Err(e) = written {
        return io_failure(e);
    }
    log::info!("wrote {} rows to {}", traj.len(), cfg.csv_path().display());
    print!("{}", report.summary_table());
    match failure {
        None => EXIT_OK,
        Some(e) => {
            eprintln!("error: {e}; partial trajectory written");
            exit_code(&e)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairGap {
    pub models: [ModelKind; 2],
    pub position_gap: f64,
    pub velocity_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    /// Largest `epsilon` of each run.
    pub epsilon0: BTreeMap<String, f64>,
    pub gaps: Vec<PairGap>,
    /// Runs that stopped early, with the reason.
    pub failures: BTreeMap<String, String>,
}

fn compare(path: &Path, names: &[String], overrides: &Overrides) -> i32 {
    let base = match load(path, overrides) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let mut kinds = Vec::new();
    for n in names {
        match ModelKind::from_name(n) {
            Some(k) if !kinds.contains(&k) => kinds.push(k),
            Some(_) => {}
            None => {
                eprintln!("error: unknown model `{n}`");
                return EXIT_CONFIG;
            }
        }
    }
    let mut configs = Vec::new();
    for k in &kinds {
        let mut cfg = base.clone();
        cfg.model.model = *k;
        cfg.output.name = format!("{}.{}", base.output.name, k.name());
        if !k.is_third_order() {
            cfg.initial.acceleration = None;
        }
        if let Err(e) = cfg.validate() {
            eprintln!("error: model {k}: {e}");
            return EXIT_CONFIG;
        }
        configs.push(cfg);
    }
    if let Err(e) = std::fs::create_dir_all(&base.output.dir) {
        return io_failure(e);
    }
    let results: Vec<_> = configs.par_iter().map(execute).collect();
    let mut summary = GapSummary {
        epsilon0: BTreeMap::new(),
        gaps: Vec::new(),
        failures: BTreeMap::new(),
    };
    let mut code = EXIT_OK;
    let mut runs = Vec::new();
    for (cfg, res) in configs.iter().zip(results) {
        let name = cfg.model.model.name().to_string();
        match res {
            Ok((traj, failure)) => {
                if let Err(e) = traj.write_files(&cfg.csv_path()) {
                    return io_failure(e);
                }
                if let Some(e) = failure {
                    summary.failures.insert(name.clone(), e.to_string());
                    code = code.max(exit_code(&e));
                }
                summary.epsilon0.insert(name, traj.epsilon0());
                runs.push((cfg.model.model, traj));
            }
            Err(e) => {
                summary.failures.insert(name, e.to_string());
                code = code.max(exit_code(&e));
            }
        }
    }
    for (i, (ka, ta)) in runs.iter().enumerate() {
        for (kb, tb) in &runs[i + 1..] {
            let (gx, gu) = sup_gap(ta, tb);
            summary.gaps.push(PairGap {
                models: [*ka, *kb],
                position_gap: gx,
                velocity_gap: gu,
            });
        }
    }
    for g in &summary.gaps {
        println!(
            "{} vs {}: position gap {:.6e}, velocity gap {:.6e}",
            g.models[0], g.models[1], g.position_gap, g.velocity_gap
        );
    }
    for (m, why) in &summary.failures {
        eprintln!("error: {m}: {why}");
    }
    if let Err(e) = write_json(&base.output.dir.join("gap_summary.json"), &summary) {
        return io_failure(e);
    }
    code
}

fn run_canonical(name: CanonicalName, seed: u64, out: Option<&Path>) -> i32 {
    let outcome = match canonical::run(name, seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    for c in &outcome.checks {
        println!("{c}");
    }
    if let Some(dir) = out {
        let path = dir.join(format!("{}.json", serde_json::to_value(name).unwrap().as_str().unwrap_or("canonical")));
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| write_json(&path, &outcome)) {
            return io_failure(e);
        }
    }
    if outcome.passed() {
        EXIT_OK
    } else {
        EXIT_ACCEPTANCE
    }
}

fn run_audit(path: &Path, config: Option<&Path>, out: Option<&Path>) -> i32 {
    let thresholds = match config.map(RunConfig::load) {
        None => AuditThresholds::default(),
        Some(Ok(cfg)) => cfg.audit,
        Some(Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let traj = match TrajectoryRecord::read_files(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = audit(&traj, &traj.meta.model, &traj.meta.field, &thresholds);
    let dest = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| path.with_extension("audit.json"));
    if let Err(e) = write_json(&dest, &report) {
        return io_failure(e);
    }
    print!("{}", report.summary_table());
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_ACCEPTANCE
    }
}

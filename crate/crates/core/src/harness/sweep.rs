use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SweepAxis};
use super::persist::{self, persist_run, persist_summary_only, write_json};
use super::seeds::{derive_seed, splitmix64};
use crate::diagnostics::{first_below_step, fit_power_law, settle_step, FitResult};
use crate::dynamics::{run_pair, FieldMode, InitialState, PairRun, RunConfig};
use crate::error::{Error, Result};

/// `C_n` level used for the summary's overlap times.
pub const C_THRESHOLD: f64 = 1e-3;

/// File names of a persisted run, relative to its directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunPaths {
    pub blocks: String,
    pub overlap: String,
    pub history: String,
}

impl Default for RunPaths {
    fn default() -> Self {
        RunPaths {
            blocks: persist::BLOCKS_FILE.into(),
            overlap: persist::OVERLAP_FILE.into(),
            history: persist::HISTORY_FILE.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub epsilon: f64,
    pub theta_over_pi: f64,
    pub axis: Option<SweepAxis>,
    pub axis_value: Option<f64>,
    pub replica: Option<usize>,
    /// False when an imposed outcome had probability zero.
    pub feasible: bool,
    pub error: Option<String>,
    pub t_c: Option<u64>,
    pub converged: bool,
    pub dropped_partial_block: bool,
    /// Lattice time `n/N` of the first `C_n < 1e-3`.
    pub first_c_below: Option<f64>,
    /// Lattice time from which `C_n < 1e-3` holds to the end of the run.
    pub c_settled: Option<f64>,
    pub n_motions: usize,
    pub paths: Option<RunPaths>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunSummary {
    fn empty(config: &RunConfig) -> Self {
        RunSummary {
            config: config.clone(),
            epsilon: config.epsilon(),
            theta_over_pi: config.theta / std::f64::consts::PI,
            axis: None,
            axis_value: None,
            replica: None,
            feasible: true,
            error: None,
            t_c: None,
            converged: false,
            dropped_partial_block: false,
            first_c_below: None,
            c_settled: None,
            n_motions: 0,
            paths: None,
            wall_time: Duration::ZERO,
        }
    }

    pub fn from_run(config: &RunConfig, run: &PairRun) -> Self {
        let n = config.n_vertices as f64;
        let c = &run.diagnostics.c_series;
        RunSummary {
            t_c: run.diagnostics.t_c,
            converged: run.diagnostics.converged,
            dropped_partial_block: run.diagnostics.blocks.dropped_partial,
            first_c_below: first_below_step(c, C_THRESHOLD).map(|k| k as f64 / n),
            c_settled: settle_step(c, C_THRESHOLD).map(|k| k as f64 / n),
            n_motions: run.records.len(),
            ..RunSummary::empty(config)
        }
    }
}

/// Runs one configuration, optionally persisting into `out_dir`.
///
/// An impossible outcome yields an infeasible summary rather than an error.
pub fn execute_run(config: &RunConfig, out_dir: Option<&Path>, plot_scripts: bool) -> Result<(RunSummary, Option<PairRun>)> {
    execute_annotated(config, |_| {}, out_dir, plot_scripts)
}

fn execute_annotated(
    config: &RunConfig,
    annotate: impl FnOnce(&mut RunSummary),
    out_dir: Option<&Path>,
    plot_scripts: bool,
) -> Result<(RunSummary, Option<PairRun>)> {
    let start = Instant::now();
    let (mut summary, run) = match run_pair(config) {
        Ok(run) => (RunSummary::from_run(config, &run), Some(run)),
        Err(e @ Error::ImpossibleOutcome { .. }) => {
            let mut summary = RunSummary::empty(config);
            summary.feasible = false;
            summary.error = Some(e.to_string());
            (summary, None)
        }
        Err(e) => return Err(e),
    };
    summary.wall_time = start.elapsed();
    annotate(&mut summary);
    if let Some(dir) = out_dir {
        match &run {
            Some(run) => persist_run(run, &mut summary, dir, plot_scripts)?,
            None => persist_summary_only(&summary, dir)?,
        }
    }
    Ok((summary, run))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub seeds_per_value: usize,
}

impl SweepSpec {
    pub fn from_experiment(cfg: &ExperimentConfig) -> Result<Self> {
        let axis = cfg
            .axis
            .ok_or_else(|| Error::config(None, Some("axis"), "a sweep needs an axis"))?;
        let spec = SweepSpec {
            base: cfg.run.clone(),
            axis,
            values: cfg.values.clone(),
            seeds_per_value: cfg.seeds_per_value,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config(None, Some("values"), "sweep needs at least one value"));
        }
        if self.seeds_per_value == 0 {
            return Err(Error::config(None, Some("seeds_per_value"), "must be at least 1"));
        }
        let two_n = 2 * self.base.n_vertices;
        for &v in &self.values {
            match self.axis {
                SweepAxis::Epsilon if !(0.0..=1.0).contains(&v) => {
                    return Err(Error::config(None, Some("values"), format!("epsilon {v} outside [0, 1]")));
                }
                SweepAxis::ParticleNumber if v.fract() != 0.0 || v < 1.0 || v >= two_n as f64 => {
                    return Err(Error::config(
                        None,
                        Some("values"),
                        format!("particle number {v} must be an integer in 1..={}", two_n - 1),
                    ));
                }
                _ => {}
            }
        }
        self.base.validate()
    }
}

/// Per-value statistics over converged runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueStats {
    pub value: f64,
    pub n_runs: usize,
    pub n_converged: usize,
    pub median_t_c: Option<f64>,
    pub median_c_settled: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub summaries: Vec<RunSummary>,
    pub stats: Vec<ValueStats>,
    pub fit: Option<FitResult>,
    pub fit_error: Option<String>,
    pub warnings: Vec<String>,
}

/// Where and how batches execute.
#[derive(Clone, Debug, Default)]
pub struct ExecOptions {
    pub out_dir: Option<PathBuf>,
    /// `None` uses the default pool size.
    pub threads: Option<usize>,
    pub plot_scripts: bool,
}

impl ExecOptions {
    pub fn from_experiment(cfg: &ExperimentConfig, out_dir: Option<PathBuf>) -> Self {
        ExecOptions {
            out_dir,
            threads: cfg.threads,
            plot_scripts: cfg.plot_scripts,
        }
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[k]
    } else {
        0.5 * (values[k - 1] + values[k])
    })
}

struct Job {
    config: RunConfig,
    label: String,
    axis: Option<SweepAxis>,
    value: Option<f64>,
    replica: usize,
}

fn execute_jobs(jobs: Vec<Job>, opts: &ExecOptions) -> Result<Vec<RunSummary>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let dir = opts.out_dir.as_ref().map(|d| d.join(&job.label));
                let annotate = |summary: &mut RunSummary| {
                    summary.axis = job.axis;
                    summary.axis_value = job.value;
                    summary.replica = Some(job.replica);
                };
                let (summary, _) = execute_annotated(&job.config, annotate, dir.as_deref(), opts.plot_scripts)?;
                Ok(summary)
            })
            .collect()
    })
}

fn value_label(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

fn stats(values: &[f64], summaries: &[RunSummary]) -> Vec<ValueStats> {
    values
        .iter()
        .map(|&v| {
            let runs: Vec<&RunSummary> = summaries.iter().filter(|s| s.axis_value == Some(v)).collect();
            let mut t: Vec<f64> = runs.iter().filter_map(|s| s.t_c).map(|t| t as f64).collect();
            let mut c: Vec<f64> = runs.iter().filter(|s| s.converged).filter_map(|s| s.c_settled).collect();
            ValueStats {
                value: v,
                n_runs: runs.len(),
                n_converged: t.len(),
                median_t_c: median(&mut t),
                median_c_settled: median(&mut c),
            }
        })
        .collect()
}

fn sweep_jobs(spec: &SweepSpec, configure: impl Fn(&mut RunConfig, f64, usize)) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &v in &spec.values {
        for r in 0..spec.seeds_per_value {
            let mut config = spec.base.clone();
            config.seed = derive_seed(spec.base.seed, v, r as u64);
            configure(&mut config, v, r);
            jobs.push(Job {
                config,
                label: format!("{}_{}_r{r}", spec.axis.name(), value_label(v)),
                axis: Some(spec.axis),
                value: Some(v),
                replica: r,
            });
        }
    }
    jobs
}

fn finish(spec: &SweepSpec, summaries: Vec<RunSummary>, warnings: Vec<String>, opts: &ExecOptions) -> Result<SweepResult> {
    let stats = stats(&spec.values, &summaries);
    let (fit, fit_error) = if spec.axis == SweepAxis::Epsilon {
        let points: Vec<(f64, f64)> = stats
            .iter()
            .filter_map(|s| s.median_t_c.map(|t| (s.value, t)))
            .collect();
        match fit_power_law(&points) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let result = SweepResult {
        axis: spec.axis,
        summaries,
        stats,
        fit,
        fit_error,
        warnings,
    };
    if let Some(dir) = &opts.out_dir {
        persist_sweep(&result, dir, opts.plot_scripts)?;
    }
    Ok(result)
}

/// `sweep.csv` (one row per run) and `sweep.json` (stats and fit).
pub fn persist_sweep(result: &SweepResult, dir: &Path, plot_scripts: bool) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut csv = String::from("axis_value,replica,seed,converged,t_c,first_c_below,c_settled,feasible\n");
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for s in &result.summaries {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            opt(s.axis_value),
            s.replica.unwrap_or(0),
            s.config.seed,
            s.converged,
            s.t_c.map(|t| t.to_string()).unwrap_or_default(),
            opt(s.first_c_below),
            opt(s.c_settled),
            s.feasible,
        ));
    }
    persist::write_text(&dir.join("sweep.csv"), &csv)?;
    write_json(
        &dir.join("sweep.json"),
        &serde_json::json!({
            "axis": result.axis,
            "stats": result.stats,
            "fit": result.fit,
            "fit_error": result.fit_error,
            "warnings": result.warnings,
        }),
    )?;
    if plot_scripts {
        let script = match result.axis {
            SweepAxis::Epsilon => persist::PLOT_EPSILON,
            SweepAxis::Theta => persist::PLOT_THETA,
            SweepAxis::ParticleNumber => persist::PLOT_PARTICLE,
        };
        persist::write_text(&dir.join(format!("plot_{}.gp", result.axis.name())), script)?;
    }
    Ok(())
}

fn require_axis(spec: &SweepSpec, axis: SweepAxis) -> Result<()> {
    spec.validate()?;
    if spec.axis != axis {
        return Err(Error::config(
            None,
            Some("axis"),
            format!("expected axis {}, got {}", axis.name(), spec.axis.name()),
        ));
    }
    Ok(())
}

/// `T_c` against `epsilon`, with a power-law fit through the per-value medians.
pub fn run_epsilon_sweep(spec: &SweepSpec, opts: &ExecOptions) -> Result<SweepResult> {
    require_axis(spec, SweepAxis::Epsilon)?;
    let jobs = sweep_jobs(spec, |c, v, _| c.x = 1.0 - v);
    let summaries = execute_jobs(jobs, opts)?;
    finish(spec, summaries, Vec::new(), opts)
}

/// `T_c` against `theta` (radians).
pub fn run_theta_sweep(spec: &SweepSpec, opts: &ExecOptions) -> Result<SweepResult> {
    require_axis(spec, SweepAxis::Theta)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let warnings = spec
        .values
        .iter()
        .filter(|&&t| (t.rem_euclid(half_pi)).abs() < 1e-12 || (t.rem_euclid(half_pi) - half_pi).abs() < 1e-12)
        .map(|t| format!("theta = {t} does not mix basis states; runs are expected not to converge"))
        .collect();
    let jobs = sweep_jobs(spec, |c, v, _| c.theta = v);
    let summaries = execute_jobs(jobs, opts)?;
    finish(spec, summaries, warnings, opts)
}

/// Two distinct random `m`-particle basis states, drawn from `seed`.
pub fn random_sector_pair(n_vertices: usize, m: usize, seed: u64) -> (InitialState, InitialState) {
    let n_slots = 2 * n_vertices;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut draw = || {
        let mut bits = vec!['0'; n_slots];
        for s in sample(&mut rng, n_slots, m) {
            bits[s] = '1';
        }
        bits.into_iter().collect::<String>()
    };
    let first = draw();
    let second = loop {
        let s = draw();
        if s != first {
            break s;
        }
    };
    (InitialState::Bits(first), InitialState::Bits(second))
}

/// `T_c` against particle number; each run draws its own pair of distinct
/// basis states in the sector.
pub fn run_particle_sweep(spec: &SweepSpec, opts: &ExecOptions) -> Result<SweepResult> {
    require_axis(spec, SweepAxis::ParticleNumber)?;
    let n = spec.base.n_vertices;
    let jobs = sweep_jobs(spec, |c, v, _| {
        let (a, b) = random_sector_pair(n, v as usize, c.seed);
        c.initial_state_1 = a;
        c.initial_state_2 = b;
    });
    let summaries = execute_jobs(jobs, opts)?;
    finish(spec, summaries, Vec::new(), opts)
}

pub fn run_sweep(spec: &SweepSpec, opts: &ExecOptions) -> Result<SweepResult> {
    match spec.axis {
        SweepAxis::Epsilon => run_epsilon_sweep(spec, opts),
        SweepAxis::Theta => run_theta_sweep(spec, opts),
        SweepAxis::ParticleNumber => run_particle_sweep(spec, opts),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeStats {
    pub mode: FieldMode,
    pub n_runs: usize,
    pub n_feasible: usize,
    pub n_converged: usize,
    pub median_t_c: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ControlsResult {
    pub summaries: Vec<RunSummary>,
    pub stats: Vec<ModeStats>,
}

/// Runs `base` under each field mode. Replica `r` uses the same seed for
/// every mode.
pub fn run_field_controls(
    base: &RunConfig,
    modes: &[FieldMode],
    replicas: usize,
    opts: &ExecOptions,
) -> Result<ControlsResult> {
    base.validate()?;
    if modes.is_empty() || replicas == 0 {
        return Err(Error::config(None, Some("control_modes"), "need at least one mode and one replica"));
    }
    if let Some(m) = modes.iter().find(|m| **m == FieldMode::FromFile) {
        return Err(Error::config(None, Some("control_modes"), format!("{m} is not a control drive")));
    }
    let mut jobs = Vec::new();
    for &mode in modes {
        for r in 0..replicas {
            let mut config = base.clone();
            config.field_mode = mode;
            config.seed = derive_seed(base.seed, 0.0, r as u64);
            jobs.push(Job {
                config,
                label: format!("{}_r{r}", mode.name()),
                axis: None,
                value: None,
                replica: r,
            });
        }
    }
    let summaries = execute_jobs(jobs, opts)?;
    let stats = modes
        .iter()
        .map(|&mode| {
            let runs: Vec<&RunSummary> = summaries.iter().filter(|s| s.config.field_mode == mode).collect();
            let mut t: Vec<f64> = runs.iter().filter_map(|s| s.t_c).map(|t| t as f64).collect();
            ModeStats {
                mode,
                n_runs: runs.len(),
                n_feasible: runs.iter().filter(|s| s.feasible).count(),
                n_converged: t.len(),
                median_t_c: median(&mut t),
            }
        })
        .collect();
    let result = ControlsResult { summaries, stats };
    if let Some(dir) = &opts.out_dir {
        write_json(&dir.join("controls.json"), &result.stats)?;
    }
    Ok(result)
}

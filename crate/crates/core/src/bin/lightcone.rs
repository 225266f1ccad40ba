use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lightcone_collapse::diagnostics::settle_step;
use lightcone_collapse::dynamics::{load_history, replay_history, InitialState};
use lightcone_collapse::harness::config::Setting;
use lightcone_collapse::harness::persist::{write_json, write_replay};
use lightcone_collapse::harness::{
    execute_run, run_field_controls, run_sweep, ExecOptions, ExperimentConfig, SweepSpec, C_THRESHOLD,
};
use lightcone_collapse::verify::{format_table, run_checks};
use lightcone_collapse::Error;

#[derive(Parser)]
#[command(name = "lightcone", version, about = "Collapse dynamics on a periodic lightcone lattice")]
struct Cli {
    /// Print only errors.
    #[arg(long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    /// Print configuration echoes and per-check tolerances.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` override, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// One paired run.
    Run(Common),
    /// Condition a state on a stored field history.
    Replay {
        #[command(flatten)]
        common: Common,
        /// History file written by `run`.
        #[arg(long)]
        history: PathBuf,
        /// Bit string, or `file:PATH` for an amplitude file.
        #[arg(long)]
        state: String,
        /// Optional reference state for `C_n`.
        #[arg(long)]
        reference: Option<String>,
    },
    /// A sweep over epsilon, theta or particle number.
    Sweep(Common),
    /// Runs under the external field drives.
    Controls(Common),
    /// Invariant checks.
    Verify,
}

struct Failure {
    code: u8,
    error: Error,
}

fn config_error(error: Error) -> Failure {
    Failure { code: 2, error }
}

fn runtime_error(error: Error) -> Failure {
    let code = if matches!(error, Error::Config { .. }) { 2 } else { 3 };
    Failure { code, error }
}

type Outcome = Result<ExitCode, Failure>;

fn load(common: &Common, base: Vec<Setting>) -> Result<ExperimentConfig, Failure> {
    let mut sets = common.sets.clone();
    if let Some(seed) = common.seed {
        sets.push(format!("seed={seed}"));
    }
    ExperimentConfig::load_over(base, common.config.as_deref(), &sets).map_err(config_error)
}

fn out_dir(common: &Common, default: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("lightcone-out").join(default))
}

fn echo(cli: &Cli, cfg: &ExperimentConfig) {
    if cli.verbose {
        println!("{}", serde_json::to_string_pretty(cfg).expect("config serialises"));
    }
}

fn fmt_opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_owned(), |v| v.to_string())
}

fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

fn cmd_run(cli: &Cli, common: &Common) -> Outcome {
    let cfg = load(common, Vec::new())?;
    echo(cli, &cfg);
    cfg.run.validate().map_err(config_error)?;
    let dir = out_dir(common, "run");
    let (summary, _) = execute_run(&cfg.run, Some(&dir), cfg.plot_scripts).map_err(runtime_error)?;
    if !cli.quiet {
        match &summary.error {
            Some(e) => println!("infeasible: {e}"),
            None => println!(
                "T_c = {}  converged = {}  C_n < {C_THRESHOLD:e} from t = {}",
                fmt_opt(summary.t_c),
                summary.converged,
                fmt_opt(summary.c_settled)
            ),
        }
        println!("wrote {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_replay(cli: &Cli, common: &Common, history: &Path, state: &str, reference: Option<&str>) -> Outcome {
    let (hist, meta) = load_history(history).map_err(runtime_error)?;
    let mut base = vec![Setting {
        line: None,
        key: "n_vertices".into(),
        value: meta.n_vertices.to_string(),
    }];
    for (key, value) in [("x", meta.x), ("theta", meta.theta)] {
        if let Some(v) = value {
            base.push(Setting {
                line: None,
                key: key.into(),
                value: format!("{v:?}"),
            });
        }
    }
    let cfg = load(common, base)?;
    echo(cli, &cfg);
    let model = cfg.run.model().map_err(config_error)?;
    if hist.geometry() != &model.geometry {
        return Err(runtime_error(Error::GeometryMismatch {
            expected: meta.n_vertices,
            found: cfg.run.n_vertices,
        }));
    }
    let n = cfg.run.n_vertices;
    let psi = InitialState::parse(state).load(n).map_err(runtime_error)?;
    let reference_arg = reference;
    let reference = reference
        .map(|r| InitialState::parse(r).load(n))
        .transpose()
        .map_err(runtime_error)?;
    let run = replay_history(&model, &hist, psi, reference).map_err(runtime_error)?;
    let dir = out_dir(common, "replay");
    let csv = write_replay(&run, &dir).map_err(runtime_error)?;
    let c_series: Option<Vec<f64>> = run.steps.iter().map(|s| s.overlap_deficit).collect();
    let settled = c_series
        .as_deref()
        .and_then(|c| settle_step(c, C_THRESHOLD))
        .map(|k| k as f64 / n as f64);
    write_json(
        &dir.join("replay_summary.json"),
        &serde_json::json!({
            "history_file": history,
            "n_vertices": n,
            "x": cfg.run.x,
            "theta": cfg.run.theta,
            "state": state,
            "reference": reference_arg,
            "n_motions": run.steps.len(),
            "final_c_n": c_series.as_ref().and_then(|c| c.last()),
            "c_settled": settled,
        }),
    )
    .map_err(runtime_error)?;
    if !cli.quiet {
        if let Some(c) = c_series.as_ref().and_then(|c| c.last()) {
            println!("final C_n = {c:e}  C_n < {C_THRESHOLD:e} from t = {}", fmt_opt(settled));
        }
        println!("wrote {}", csv.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(cli: &Cli, common: &Common) -> Outcome {
    let cfg = load(common, Vec::new())?;
    echo(cli, &cfg);
    let spec = SweepSpec::from_experiment(&cfg).map_err(config_error)?;
    let dir = out_dir(common, "sweep");
    let result = run_sweep(&spec, &ExecOptions::from_experiment(&cfg, Some(dir.clone()))).map_err(runtime_error)?;
    if !cli.quiet {
        for w in &result.warnings {
            eprintln!("warning: {w}");
        }
        println!("{:>12} {:>5} {:>10} {:>12}", spec.axis.name(), "conv", "median T_c", "median C_set");
        for s in &result.stats {
            println!(
                "{:>12} {:>2}/{:<2} {:>10} {:>12}",
                short(s.value),
                s.n_converged,
                s.n_runs,
                fmt_opt(s.median_t_c),
                fmt_opt(s.median_c_settled)
            );
        }
        match (&result.fit, &result.fit_error) {
            (Some(f), _) => println!(
                "fit: log T_c = {:.4} + {:.4} log epsilon  (residual {:.3e}, {} points)",
                f.intercept, f.slope, f.residual_norm, f.n_points
            ),
            (None, Some(e)) => println!("fit unavailable: {e}"),
            _ => {}
        }
        println!("wrote {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_controls(cli: &Cli, common: &Common) -> Outcome {
    let cfg = load(common, Vec::new())?;
    echo(cli, &cfg);
    let dir = out_dir(common, "controls");
    let result = run_field_controls(
        &cfg.run,
        &cfg.control_modes,
        cfg.seeds_per_value,
        &ExecOptions::from_experiment(&cfg, Some(dir.clone())),
    )
    .map_err(runtime_error)?;
    if !cli.quiet {
        println!("{:>16} {:>8} {:>9} {:>10}", "field_mode", "feasible", "converged", "median T_c");
        for s in &result.stats {
            println!(
                "{:>16} {:>8} {:>9} {:>10}",
                s.mode.name(),
                format!("{}/{}", s.n_feasible, s.n_runs),
                format!("{}/{}", s.n_converged, s.n_runs),
                fmt_opt(s.median_t_c)
            );
        }
        println!("wrote {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli) -> Outcome {
    let checks = run_checks().map_err(runtime_error)?;
    if !cli.quiet {
        print!("{}", format_table(&checks, cli.verbose));
    }
    Ok(if checks.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => cmd_run(&cli, c),
        Command::Replay {
            common,
            history,
            state,
            reference,
        } => cmd_replay(&cli, common, history, state, reference.as_deref()),
        Command::Sweep(c) => cmd_sweep(&cli, c),
        Command::Controls(c) => cmd_controls(&cli, c),
        Command::Verify => cmd_verify(&cli),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, error }) => {
            eprintln!("error: {error}");
            ExitCode::from(code)
        }
    }
}

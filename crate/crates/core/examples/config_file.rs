//! Loads a flat `key = value` file with command-line style overrides and runs it.
//!
//!     cargo run --release --example config_file [path] [key=value ...]

use std::path::PathBuf;

use lightcone_collapse::harness::{execute_run, ExperimentConfig};

fn main() -> lightcone_collapse::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/run.conf")));
    let overrides: Vec<String> = args.collect();
    let cfg = ExperimentConfig::load(Some(&path), &overrides)?;
    println!("{}", serde_json::to_string_pretty(&cfg.run).expect("config serialises"));
    let (summary, _) = execute_run(&cfg.run, None, false)?;
    println!("T_c = {:?}, converged = {}", summary.t_c, summary.converged);
    Ok(())
}

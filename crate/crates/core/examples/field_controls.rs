//! Drives both states with an external field instead of one sampled from
//! state 1: all ones, all zeros, or iid uniform outcomes.
//!
//!     cargo run --release --example field_controls [t_max] [replicas]

use lightcone_collapse::dynamics::{FieldMode, RunConfig};
use lightcone_collapse::harness::{run_field_controls, ExecOptions};

fn main() -> lightcone_collapse::Result<()> {
    let mut args = std::env::args().skip(1);
    let t_max = args.next().map_or(20000, |s| s.parse().expect("t_max"));
    let replicas = args.next().map_or(3, |s| s.parse().expect("replicas"));
    let base = RunConfig {
        t_max,
        ..RunConfig::default()
    };
    let modes = [
        FieldMode::SampledFrom1,
        FieldMode::AllOnes,
        FieldMode::AllZeros,
        FieldMode::IidUniform,
    ];
    let result = run_field_controls(&base, &modes, replicas, &ExecOptions::default())?;
    for s in &result.stats {
        println!(
            "{:<14} feasible {}/{}  converged {}/{}  median T_c {:?}",
            s.mode.name(),
            s.n_feasible,
            s.n_runs,
            s.n_converged,
            s.n_runs,
            s.median_t_c
        );
    }
    Ok(())
}

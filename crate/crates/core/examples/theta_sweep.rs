//! T_c against theta at X = 0.95, including the two non-mixing endpoints.
//!
//!     cargo run --release --example theta_sweep [seeds]

use lightcone_collapse::dynamics::RunConfig;
use lightcone_collapse::harness::{run_theta_sweep, ExecOptions, SweepAxis, SweepSpec};

fn main() -> lightcone_collapse::Result<()> {
    let seeds = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seeds"));
    let pi = std::f64::consts::PI;
    let spec = SweepSpec {
        base: RunConfig {
            t_max: 20000,
            ..RunConfig::default()
        },
        axis: SweepAxis::Theta,
        values: [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.5].iter().map(|f| f * pi).collect(),
        seeds_per_value: seeds,
    };
    let result = run_theta_sweep(&spec, &ExecOptions::default())?;
    for w in &result.warnings {
        println!("warning: {w}");
    }
    for s in &result.stats {
        println!(
            "theta/pi {:<5.3} converged {}/{}  median T_c {:?}",
            s.value / pi,
            s.n_converged,
            s.n_runs,
            s.median_t_c
        );
    }
    Ok(())
}

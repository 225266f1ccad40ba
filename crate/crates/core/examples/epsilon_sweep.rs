//! T_c against epsilon = 1 - X with a power-law fit on the per-epsilon medians.
//!
//!     cargo run --release --example epsilon_sweep [seeds] [t_max]
//!
//! The smallest epsilon needs t_max around 40000 to converge in most seeds.

use lightcone_collapse::dynamics::RunConfig;
use lightcone_collapse::harness::{run_epsilon_sweep, ExecOptions, SweepAxis, SweepSpec};

fn main() -> lightcone_collapse::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds = args.next().map_or(3, |s| s.parse().expect("seeds"));
    let t_max = args.next().map_or(40000, |s| s.parse().expect("t_max"));
    let spec = SweepSpec {
        base: RunConfig {
            t_max,
            ..RunConfig::default()
        },
        axis: SweepAxis::Epsilon,
        values: vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
        seeds_per_value: seeds,
    };
    let result = run_epsilon_sweep(&spec, &ExecOptions::default())?;
    for s in &result.stats {
        println!(
            "epsilon {:<5} converged {}/{}  median T_c {:?}",
            s.value, s.n_converged, s.n_runs, s.median_t_c
        );
    }
    match (&result.fit, &result.fit_error) {
        (Some(f), _) => println!("slope {:.3} over {} points", f.slope, f.n_points),
        (_, Some(e)) => println!("no fit: {e}"),
        _ => {}
    }
    Ok(())
}

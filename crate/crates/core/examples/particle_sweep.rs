//! T_c against particle number at X = 0.9, theta = pi/4, blocks of 8 rows.
//!
//!     cargo run --release --example particle_sweep [n_vertices] [seeds] [t_max]
//!
//! Defaults to N = 4. At N = 8 the half-filled sector has 12870 states and a
//! run of a few thousand rows takes tens of seconds.

use lightcone_collapse::dynamics::{InitialState, RunConfig};
use lightcone_collapse::harness::{run_particle_sweep, ExecOptions, SweepAxis, SweepSpec};

fn main() -> lightcone_collapse::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(4, |s| s.parse().expect("n_vertices"));
    let seeds = args.next().map_or(5, |s| s.parse().expect("seeds"));
    let t_max = args.next().map_or(10000, |s| s.parse().expect("t_max"));
    let spec = SweepSpec {
        base: RunConfig {
            n_vertices: n,
            x: 0.9,
            theta: std::f64::consts::FRAC_PI_4,
            block_m: 8,
            t_max,
            initial_state_1: InitialState::one_particle(n, 0),
            initial_state_2: InitialState::one_particle(n, n),
            ..RunConfig::default()
        },
        axis: SweepAxis::ParticleNumber,
        values: (1..2 * n).map(|m| m as f64).collect(),
        seeds_per_value: seeds,
    };
    let result = run_particle_sweep(&spec, &ExecOptions::default())?;
    for s in &result.stats {
        let log = s.median_t_c.map(f64::ln);
        println!(
            "m {:>2}  converged {}/{}  median T_c {:?}  log {:?}",
            s.value, s.n_converged, s.n_runs, s.median_t_c, log
        );
    }
    Ok(())
}

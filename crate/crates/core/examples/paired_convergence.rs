//! Two one-particle states on N = 8, X = 0.95, theta = 0.1 pi, conditioned on
//! one field sampled from the first. Prints the B_10 series and C_n.
//!
//!     cargo run --release --example paired_convergence [seed] [out_dir]

use std::path::PathBuf;

use lightcone_collapse::dynamics::{run_pair, RunConfig};
use lightcone_collapse::harness::execute_run;

fn main() -> lightcone_collapse::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(1, |s| s.parse().expect("seed"));
    let out: Option<PathBuf> = args.next().map(PathBuf::from);
    let config = RunConfig {
        seed,
        t_max: 20000,
        ..RunConfig::default()
    };

    let run = run_pair(&config)?;
    let d = &run.diagnostics;
    let stride = (d.blocks.blocks.len() / 40).max(1);
    println!("{:>7} {:>12}", "t", "B_10");
    for b in d.blocks.blocks.iter().step_by(stride) {
        println!("{:>7} {:>12.4e}", b.start, b.value);
    }
    println!("T_c = {:?}, converged = {}", d.t_c, d.converged);
    let n = config.n_vertices;
    for t in [10usize, 100, 1000, 5000, 10000, 20000] {
        if let Some(c) = d.c_series.get(t * n - 1) {
            println!("C at lattice time {t:>5}: {c:.3e}");
        }
    }

    if let Some(dir) = out {
        let (summary, _) = execute_run(&config, Some(&dir), true)?;
        println!("wrote {} (c_settled = {:?})", dir.display(), summary.c_settled);
    }
    Ok(())
}

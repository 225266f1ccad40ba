//! Ensemble form of convergence on N = 2: the operator-norm distance between
//! the averaged projectors of the two conditioned states.
//!
//!     cargo run --release --example density_matrix [samples]

use lightcone_collapse::diagnostics::ensemble_density_distances;
use lightcone_collapse::dynamics::{InitialState, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lightcone_collapse::Result<()> {
    let samples = std::env::args().nth(1).map_or(1000, |s| s.parse().expect("samples"));
    let config = RunConfig {
        n_vertices: 2,
        x: 0.7,
        theta: 0.2 * std::f64::consts::PI,
        initial_state_1: InitialState::one_particle(2, 0),
        initial_state_2: InitialState::one_particle(2, 2),
        ..RunConfig::default()
    };
    let checkpoints = [0, 2, 10, 25, 50, 100, 200];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = ensemble_density_distances(&config, &checkpoints, samples, &mut rng)?;
    for (n, d) in checkpoints.iter().zip(&d) {
        println!("n = {n:>3}  distance {d:.3e}");
    }

    let same = RunConfig {
        initial_state_2: config.initial_state_1.clone(),
        ..config
    };
    let d = ensemble_density_distances(&same, &[200], samples, &mut rng)?;
    println!("identical states at n = 200: {:.1e}", d[0]);
    Ok(())
}

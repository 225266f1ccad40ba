//! Writes a run's field history, reads it back and conditions other states on it.
//!
//!     cargo run --release --example replay

use lightcone_collapse::dynamics::{load_history, replay_history, InitialState, RunConfig};
use lightcone_collapse::harness::execute_run;
use lightcone_collapse::harness::persist::HISTORY_FILE;

fn main() -> lightcone_collapse::Result<()> {
    let dir = std::env::temp_dir().join("lightcone-replay-example");
    let config = RunConfig {
        t_max: 5000,
        seed: 4,
        ..RunConfig::default()
    };
    let (summary, _) = execute_run(&config, Some(&dir), false)?;
    println!("run: T_c = {:?}, {} motions", summary.t_c, summary.n_motions);

    let (history, meta) = load_history(&dir.join(HISTORY_FILE))?;
    println!("loaded {} records (N = {}, mode {})", history.len(), meta.n_vertices, meta.field_mode);
    let model = config.model()?;
    let n = config.n_vertices;

    // The state the field was sampled from, against itself: C stays at zero.
    let own = config.initial_state_1.load(n)?;
    let r = replay_history(&model, &history, own.clone(), Some(own))?;
    let worst = r.steps.iter().filter_map(|s| s.overlap_deficit).fold(0.0, f64::max);
    println!("self replay: max C = {worst:.1e}");

    // A third one-particle state, compared with state 1.
    let third = InitialState::one_particle(n, 5).load(n)?;
    let r = replay_history(&model, &history, third, Some(config.initial_state_1.load(n)?))?;
    for k in [n, 100 * n, 1000 * n, r.steps.len()] {
        let s = &r.steps[k - 1];
        println!("motion {:>6}: C = {:.3e}", s.step, s.overlap_deficit.unwrap());
    }
    Ok(())
}

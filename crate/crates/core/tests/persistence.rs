use std::fs;

use lightcone_collapse::dynamics::{load_history, replay_history, run_pair, FieldMode, InitialState, RunConfig};
use lightcone_collapse::harness::persist::{BLOCKS_FILE, HISTORY_FILE, OVERLAP_FILE, SUMMARY_FILE};
use lightcone_collapse::harness::{execute_run, run_particle_sweep, ExecOptions, RunSummary, SweepAxis, SweepSpec};
use lightcone_collapse::Error;

fn config(t_max: u64, block_m: u64) -> RunConfig {
    RunConfig {
        n_vertices: 4,
        t_max,
        block_m,
        seed: 21,
        initial_state_1: InitialState::one_particle(4, 0),
        initial_state_2: InitialState::one_particle(4, 4),
        ..RunConfig::default()
    }
}

#[test]
fn block_rows_follow_the_grid() {
    for (t_max, m) in [(100, 10), (105, 10), (37, 8), (8, 8)] {
        let dir = tempfile::tempdir().unwrap();
        execute_run(&config(t_max, m), Some(dir.path()), false).unwrap();
        let rows = fs::read_to_string(dir.path().join(BLOCKS_FILE)).unwrap().lines().count() - 1;
        assert_eq!(rows as u64, t_max / m, "t_max {t_max}, m {m}");
    }
}

#[test]
fn summary_echoes_every_config_field() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(50, 10);
    execute_run(&c, Some(dir.path()), false).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    let expected = serde_json::to_value(&c).unwrap();
    let echoed = &summary["config"];
    for (key, value) in expected.as_object().unwrap() {
        assert_eq!(&echoed[key], value, "{key}");
    }
    assert_eq!(summary["config"]["seed"], 21);
    assert!(summary.get("t_c").is_some());
    let back: RunSummary = serde_json::from_value(summary).unwrap();
    assert_eq!(back.config, c);
}

#[test]
fn history_round_trip_reproduces_overlap_series() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(300, 10);
    execute_run(&c, Some(dir.path()), false).unwrap();
    let (history, meta) = load_history(&dir.path().join(HISTORY_FILE)).unwrap();
    assert_eq!(meta.n_vertices, 4);
    assert_eq!(meta.seed, Some(21));

    let n = c.n_vertices;
    let run = replay_history(
        &c.model().unwrap(),
        &history,
        c.initial_state_2.load(n).unwrap(),
        Some(c.initial_state_1.load(n).unwrap()),
    )
    .unwrap();
    let csv = fs::read_to_string(dir.path().join(OVERLAP_FILE)).unwrap();
    let stored: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(stored.len(), run.steps.len());
    for (s, r) in stored.iter().zip(&run.steps) {
        assert!((s - r.overlap_deficit.unwrap()).abs() < 1e-12);
    }

    let driven = RunConfig {
        field_mode: FieldMode::FromFile,
        history_file: Some(dir.path().join(HISTORY_FILE)),
        ..c.clone()
    };
    let again = run_pair(&driven).unwrap();
    let direct = run_pair(&c).unwrap();
    assert_eq!(again.diagnostics.c_series, direct.diagnostics.c_series);
}

#[test]
fn io_errors_carry_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("not_a_dir");
    fs::write(&blocker, "x").unwrap();
    let err = execute_run(&config(20, 10), Some(&blocker.join("run")), false).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err:?}");
    assert!(err.to_string().contains("not_a_dir"), "{err}");
}

#[test]
fn one_particle_sweep_point_matches_a_direct_run() {
    let base = RunConfig {
        x: 0.9,
        theta: std::f64::consts::FRAC_PI_4,
        block_m: 8,
        ..config(400, 8)
    };
    let spec = SweepSpec {
        base,
        axis: SweepAxis::ParticleNumber,
        values: vec![1.0],
        seeds_per_value: 2,
    };
    let result = run_particle_sweep(&spec, &ExecOptions::default()).unwrap();
    for s in &result.summaries {
        let (direct, _) = execute_run(&s.config, None, false).unwrap();
        assert_eq!(direct.t_c, s.t_c);
        assert_eq!(direct.converged, s.converged);
        assert_eq!(direct.c_settled, s.c_settled);
    }
}

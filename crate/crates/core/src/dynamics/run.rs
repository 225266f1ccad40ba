use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::history::{load_history, FieldHistory};
use super::model::{drive_outcome, FieldMode, Model};
use crate::diagnostics::{block_sum, convergence_time, link_difference, overlap_deficit, BlockNorm, DiagSeries};
use crate::error::{Error, Result};
use crate::hilbert::{read_state, StateVector, MAX_VERTICES};
use crate::lattice::VertexId;

/// Where an initial state comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Basis state; character `s` is the field value on slot `s`.
    Bits(String),
    /// Amplitude file in the `lightcone-state` format.
    File(PathBuf),
}

impl InitialState {
    /// One particle on `slot`, vacuum elsewhere.
    pub fn one_particle(n_vertices: usize, slot: usize) -> Self {
        InitialState::Bits(
            (0..2 * n_vertices)
                .map(|s| if s == slot { '1' } else { '0' })
                .collect(),
        )
    }

    pub fn load(&self, n_vertices: usize) -> Result<StateVector> {
        match self {
            InitialState::Bits(bits) => {
                let len = bits.trim().len();
                if len % 2 == 0 && len != 2 * n_vertices {
                    return Err(Error::GeometryMismatch {
                        expected: n_vertices,
                        found: len / 2,
                    });
                }
                StateVector::from_bit_string(n_vertices, bits)
            }
            InitialState::File(path) => {
                let f = File::open(path).map_err(|e| Error::io(path, e))?;
                let state = read_state(BufReader::new(f), path)?;
                if state.n_vertices() != n_vertices {
                    return Err(Error::GeometryMismatch {
                        expected: n_vertices,
                        found: state.n_vertices(),
                    });
                }
                Ok(state)
            }
        }
    }

    /// Parses the textual form: a string of `0`/`1`, or `file:PATH`.
    pub fn parse(s: &str) -> Self {
        match s.strip_prefix("file:") {
            Some(path) => InitialState::File(PathBuf::from(path)),
            None => InitialState::Bits(s.to_owned()),
        }
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Bits(b) => f.write_str(b),
            InitialState::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// When the link marginals entering `B(l)` are read off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalTiming {
    /// After `U`, before the jump.
    #[default]
    PreJump,
    /// After the jump and renormalisation.
    PostJump,
}

impl MarginalTiming {
    pub fn name(self) -> &'static str {
        match self {
            MarginalTiming::PreJump => "pre_jump",
            MarginalTiming::PostJump => "post_jump",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [MarginalTiming::PreJump, MarginalTiming::PostJump]
            .into_iter()
            .find(|t| t.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_vertices: usize,
    pub x: f64,
    pub theta: f64,
    pub seed: u64,
    /// Horizon in lattice-time rows.
    pub t_max: u64,
    pub block_m: u64,
    pub delta: f64,
    pub initial_state_1: InitialState,
    pub initial_state_2: InitialState,
    pub field_mode: FieldMode,
    pub history_file: Option<PathBuf>,
    pub marginal_timing: MarginalTiming,
    pub block_norm: BlockNorm,
}

impl Default for RunConfig {
    /// N = 8, X = 0.95, theta = 0.1 pi, one particle on slot 0 vs slot N.
    fn default() -> Self {
        let n = 8;
        RunConfig {
            n_vertices: n,
            x: 0.95,
            theta: 0.1 * std::f64::consts::PI,
            seed: 1,
            t_max: 20000,
            block_m: 10,
            delta: 1e-4,
            initial_state_1: InitialState::one_particle(n, 0),
            initial_state_2: InitialState::one_particle(n, n),
            field_mode: FieldMode::SampledFrom1,
            history_file: None,
            marginal_timing: MarginalTiming::PreJump,
            block_norm: BlockNorm::AbsoluteLinks,
        }
    }
}

fn invalid(key: &str, msg: impl Into<String>) -> Error {
    Error::config(None, Some(key), msg)
}

impl RunConfig {
    pub fn epsilon(&self) -> f64 {
        1.0 - self.x
    }

    /// Checks the scalar fields. Initial states are checked when loaded.
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_VERTICES).contains(&self.n_vertices) {
            return Err(invalid(
                "n_vertices",
                format!("must be in 2..={MAX_VERTICES}, got {}", self.n_vertices),
            ));
        }
        if !(0.0..=1.0).contains(&self.x) {
            return Err(invalid("x", format!("must lie in [0, 1], got {}", self.x)));
        }
        if !self.theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        if self.block_m == 0 {
            return Err(invalid("block_m", "must be at least 1"));
        }
        if self.t_max < self.block_m {
            return Err(invalid(
                "t_max",
                format!("must be at least block_m = {}, got {}", self.block_m, self.t_max),
            ));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(invalid("delta", format!("must be positive, got {}", self.delta)));
        }
        if self.field_mode == FieldMode::FromFile && self.history_file.is_none() {
            return Err(invalid("history_file", "required when field_mode = from_file"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<Model> {
        Model::new(self.n_vertices, self.x, self.theta)
    }

    /// Loads both initial states and checks they share one particle-number sector.
    pub fn load_states(&self) -> Result<(StateVector, StateVector)> {
        let s1 = self.initial_state_1.load(self.n_vertices)?;
        let s2 = self.initial_state_2.load(self.n_vertices)?;
        let m1 = single_sector(&s1).ok_or_else(|| invalid("initial_state_1", "not a particle-number eigenstate"))?;
        let m2 = single_sector(&s2).ok_or_else(|| invalid("initial_state_2", "not a particle-number eigenstate"))?;
        if m1 != m2 {
            return Err(invalid(
                "initial_state_2",
                format!("particle number {m2} differs from initial_state_1's {m1}"),
            ));
        }
        Ok((s1, s2))
    }
}

fn single_sector(state: &StateVector) -> Option<usize> {
    let weights = state.particle_number_decomposition();
    let mut occupied = weights.iter().enumerate().filter(|(_, &w)| w > 1e-12);
    let (m, _) = occupied.next()?;
    occupied.next().is_none().then_some(m)
}

/// One elementary motion of a paired run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based motion count.
    pub step: usize,
    pub vertex: VertexId,
    pub outcome: crate::hilbert::Outcome,
    /// `|b|^2` on the vertex's slots `(a, b)` for state 1.
    pub marginals_1: [f64; 2],
    pub marginals_2: [f64; 2],
    /// `C_n` after this step.
    pub overlap_deficit: f64,
}

#[derive(Clone, Debug)]
pub struct PairRun {
    pub history: FieldHistory,
    pub records: Vec<StepRecord>,
    pub diagnostics: DiagSeries,
    pub final_state_1: StateVector,
    pub final_state_2: StateVector,
}

enum Driver<'a> {
    Sample { from_second: bool },
    Drive(FieldMode),
    Replay(&'a FieldHistory),
}

/// Evolves two states along one linear extension and one field history.
pub fn run_pair(config: &RunConfig) -> Result<PairRun> {
    config.validate()?;
    let model = config.model()?;
    let (s1, s2) = config.load_states()?;
    let stored;
    let driver = match config.field_mode {
        FieldMode::SampledFrom1 => Driver::Sample { from_second: false },
        FieldMode::SampledFrom2 => Driver::Sample { from_second: true },
        FieldMode::FromFile => {
            let path = config.history_file.as_ref().expect("validated");
            stored = load_history(path)?.0;
            if stored.geometry() != &model.geometry {
                return Err(Error::GeometryMismatch {
                    expected: config.n_vertices,
                    found: stored.geometry().n_vertices(),
                });
            }
            Driver::Replay(&stored)
        }
        mode => Driver::Drive(mode),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (history, records, s1, s2) = evolve(&model, s1, s2, driver, config, &mut rng)?;
    let links = records.iter().flat_map(|r| {
        [0, 1].map(|k| (r.vertex.row, link_difference(r.marginals_1[k], r.marginals_2[k])))
    });
    let blocks = block_sum(links, config.block_m, config.n_vertices, config.t_max, config.block_norm)?;
    let conv = convergence_time(&blocks.blocks, config.delta);
    let c_series = records.iter().map(|r| r.overlap_deficit).collect();
    Ok(PairRun {
        history,
        records,
        diagnostics: DiagSeries {
            blocks,
            c_series,
            t_c: conv.t_c,
            converged: conv.converged,
        },
        final_state_1: s1,
        final_state_2: s2,
    })
}

type Evolved = (FieldHistory, Vec<StepRecord>, StateVector, StateVector);

fn evolve(
    model: &Model,
    mut s1: StateVector,
    mut s2: StateVector,
    driver: Driver<'_>,
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Evolved> {
    let geometry = &model.geometry;
    let mut history = FieldHistory::new(*geometry);
    let mut records = Vec::with_capacity(config.n_vertices * config.t_max as usize);
    while history.front().completed_rows() < config.t_max {
        let step = records.len() + 1;
        let vertex = match &driver {
            Driver::Replay(h) => {
                h.records()
                    .get(step - 1)
                    .ok_or_else(|| {
                        Error::domain(format!(
                            "field history ends after {} motions, before lattice time {}",
                            h.len(),
                            config.t_max
                        ))
                    })?
                    .vertex
            }
            _ => geometry.pick_next(history.front(), rng)?,
        };
        let context = |e: Error| e.at(vertex, Some(step));
        let (outcome, mut m1, mut m2) = match &driver {
            Driver::Sample { from_second: false } => {
                let s = model.step_sample_at(&mut s1, vertex, rng).map_err(context)?;
                let m2 = model.step_replay(&mut s2, vertex, s.outcome).map_err(context)?;
                (s.outcome, s.marginals, m2)
            }
            Driver::Sample { from_second: true } => {
                let s = model.step_sample_at(&mut s2, vertex, rng).map_err(context)?;
                let m1 = model.step_replay(&mut s1, vertex, s.outcome).map_err(context)?;
                (s.outcome, m1, s.marginals)
            }
            Driver::Drive(mode) => {
                let outcome = drive_outcome(*mode, rng)?;
                let m1 = model.step_replay(&mut s1, vertex, outcome).map_err(context)?;
                let m2 = model.step_replay(&mut s2, vertex, outcome).map_err(context)?;
                (outcome, m1, m2)
            }
            Driver::Replay(h) => {
                let outcome = h.records()[step - 1].outcome;
                let m1 = model.step_replay(&mut s1, vertex, outcome).map_err(context)?;
                let m2 = model.step_replay(&mut s2, vertex, outcome).map_err(context)?;
                (outcome, m1, m2)
            }
        };
        if config.marginal_timing == MarginalTiming::PostJump {
            let (a, b) = geometry.slots_of(vertex);
            m1 = [s1.bit_marginal(a)?, s1.bit_marginal(b)?];
            m2 = [s2.bit_marginal(a)?, s2.bit_marginal(b)?];
        }
        history.push(vertex, outcome)?;
        records.push(StepRecord {
            step,
            vertex,
            outcome,
            marginals_1: m1,
            marginals_2: m2,
            overlap_deficit: overlap_deficit(&s1, &s2)?,
        });
    }
    Ok((history, records, s1, s2))
}

/// One motion of a replay against a stored history.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayStep {
    pub step: usize,
    pub vertex: VertexId,
    pub outcome: crate::hilbert::Outcome,
    pub marginals: [f64; 2],
    pub reference_marginals: Option<[f64; 2]>,
    /// `C_n` against the reference, when one is given.
    pub overlap_deficit: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ReplayRun {
    pub steps: Vec<ReplayStep>,
    pub final_state: StateVector,
}

/// Conditions `state` (and optionally a reference) on a stored history.
pub fn replay_history(
    model: &Model,
    history: &FieldHistory,
    mut state: StateVector,
    mut reference: Option<StateVector>,
) -> Result<ReplayRun> {
    if history.geometry() != &model.geometry {
        return Err(Error::GeometryMismatch {
            expected: model.geometry.n_vertices(),
            found: history.geometry().n_vertices(),
        });
    }
    let mut steps = Vec::with_capacity(history.len());
    for (k, r) in history.records().iter().enumerate() {
        let context = |e: Error| e.at(r.vertex, Some(k + 1));
        let marginals = model.step_replay(&mut state, r.vertex, r.outcome).map_err(context)?;
        let (reference_marginals, deficit) = match reference.as_mut() {
            Some(reference) => {
                let m = model.step_replay(reference, r.vertex, r.outcome).map_err(context)?;
                (Some(m), Some(overlap_deficit(&state, reference)?))
            }
            None => (None, None),
        };
        steps.push(ReplayStep {
            step: k + 1,
            vertex: r.vertex,
            outcome: r.outcome,
            marginals,
            reference_marginals,
            overlap_deficit: deficit,
        });
    }
    Ok(ReplayRun {
        steps,
        final_state: state,
    })
}

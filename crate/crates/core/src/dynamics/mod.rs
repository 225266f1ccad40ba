//! Stochastic evolution: per-vertex `U` then jump, paired replay, field drives.

mod history;
mod model;
mod run;

pub use history::{load_history, read_history, write_history, FieldHistory, HistoryMeta, HistoryRecord};
pub use model::{drive_outcome, sample_outcome, FieldMode, Model, SampledStep, StemProbability};
pub use run::{
    replay_history, run_pair, InitialState, MarginalTiming, PairRun, ReplayRun, ReplayStep, RunConfig, StepRecord,
};

//! State vectors over the `2^(2N)` field basis and the per-vertex operators.
//!
//! Basis index bit `s` holds the field value on slot `s` (little-endian by slot).

mod io;
mod ops;
mod sectors;
mod state;

pub use io::{read_state, write_state, STATE_ENDIANNESS};
pub use ops::{build_jump_family, build_r_matrix, JumpFamily, Outcome, RMatrix, TwoSiteOp};
pub use sectors::SectorSet;
pub use state::{StateVector, MAX_VERTICES};
pub(crate) use state::marginals_from_weights;

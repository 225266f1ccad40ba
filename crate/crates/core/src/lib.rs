pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod lattice;
pub mod verify;

pub use error::{Error, Result};

//! Text serialisation of state vectors.
//!
//! ```text
//! lightcone-state n_vertices=<N> endianness=little-slot
//! <re> <im>        # one line per basis index, 0 .. 4^N - 1
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so write/read is exact.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};

pub const STATE_ENDIANNESS: &str = "little-slot";
const MAGIC: &str = "lightcone-state";

pub fn write_state<W: Write>(state: &StateVector, mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "{MAGIC} n_vertices={} endianness={STATE_ENDIANNESS}",
        state.n_vertices()
    )?;
    for z in state.amplitudes() {
        writeln!(w, "{:?} {:?}", z.re, z.im)?;
    }
    Ok(())
}

pub fn read_state<R: BufRead>(r: R, path: &Path) -> Result<StateVector> {
    let bad = |message: String| Error::Format {
        kind: "state",
        path: path.to_path_buf(),
        message,
    };
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .map_err(|e| Error::io(path, e))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(MAGIC) {
        return Err(bad(format!("missing `{MAGIC}` header")));
    }
    let mut n_vertices = None;
    for field in fields {
        match field.split_once('=') {
            Some(("n_vertices", v)) => {
                n_vertices = Some(v.parse::<usize>().map_err(|e| bad(format!("n_vertices: {e}")))?)
            }
            Some(("endianness", STATE_ENDIANNESS)) => {}
            Some(("endianness", other)) => {
                return Err(bad(format!("unsupported endianness `{other}`")))
            }
            _ => return Err(bad(format!("unexpected header field `{field}`"))),
        }
    }
    let n_vertices = n_vertices.ok_or_else(|| bad("header lacks n_vertices".into()))?;
    let mut amps = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut next = || -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| bad(format!("line {}: expected `re im`", k + 2)))?
                .parse()
                .map_err(|e| bad(format!("line {}: {e}", k + 2)))
        };
        let re = next()?;
        let im = next()?;
        amps.push(Complex64::new(re, im));
    }
    let state = StateVector::from_amplitudes(n_vertices, amps).map_err(|e| bad(e.to_string()))?;
    Ok(state)
}

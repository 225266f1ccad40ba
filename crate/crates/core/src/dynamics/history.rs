//! Realised field histories and their file format.
//!
//! ```text
//! # lightcone-history
//! # n_vertices=8 seed=42 field_mode=sampled_from_1 x=0.95 theta=0.3141592653589793
//! # step row col alpha_a alpha_b
//! 1 1 3 0 1
//! 2 1 0 1 0
//! ...
//! ```
//!
//! Steps are 1-based. The vertex order in the file is authoritative; reading
//! and re-writing a file reproduces it byte for byte.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::hilbert::Outcome;
use crate::lattice::{LatticeGeometry, SurfaceFront, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HistoryRecord {
    pub vertex: VertexId,
    pub outcome: Outcome,
}

/// An ordered field configuration `{alpha_v1, ..., alpha_vn}` on a stem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldHistory {
    geometry: LatticeGeometry,
    records: Vec<HistoryRecord>,
    front: SurfaceFront,
}

impl FieldHistory {
    pub fn new(geometry: LatticeGeometry) -> Self {
        FieldHistory {
            geometry,
            records: Vec::new(),
            front: SurfaceFront::zero(&geometry),
        }
    }

    /// Builds a history, checking that the vertex order is a natural labelling.
    pub fn from_records(geometry: LatticeGeometry, records: impl IntoIterator<Item = HistoryRecord>) -> Result<Self> {
        let mut h = FieldHistory::new(geometry);
        for r in records {
            h.push(r.vertex, r.outcome)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, vertex: VertexId, outcome: Outcome) -> Result<()> {
        self.geometry.advance_in_place(&mut self.front, vertex)?;
        self.records.push(HistoryRecord { vertex, outcome });
        Ok(())
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn records(&self) -> &[HistoryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.records.iter().map(|r| r.vertex).collect()
    }

    /// Surface reached after the whole history.
    pub fn front(&self) -> &SurfaceFront {
        &self.front
    }

    /// Same vertices with every outcome bit flipped.
    pub fn bit_flipped(&self) -> FieldHistory {
        FieldHistory {
            geometry: self.geometry,
            records: self
                .records
                .iter()
                .map(|r| HistoryRecord {
                    vertex: r.vertex,
                    outcome: r.outcome.flipped(),
                })
                .collect(),
            front: self.front.clone(),
        }
    }

    /// First `n` records.
    pub fn prefix(&self, n: usize) -> Result<FieldHistory> {
        FieldHistory::from_records(self.geometry, self.records[..n.min(self.len())].iter().copied())
    }
}

/// Header data carried alongside a history on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryMeta {
    pub n_vertices: usize,
    pub seed: Option<u64>,
    pub field_mode: String,
    pub x: Option<f64>,
    pub theta: Option<f64>,
}

const MAGIC: &str = "# lightcone-history";
const COLUMNS: &str = "# step row col alpha_a alpha_b";

pub fn write_history<W: Write>(history: &FieldHistory, meta: &HistoryMeta, mut w: W) -> std::io::Result<()> {
    let mut header = format!("# n_vertices={}", meta.n_vertices);
    if let Some(seed) = meta.seed {
        let _ = write!(header, " seed={seed}");
    }
    let _ = write!(header, " field_mode={}", meta.field_mode);
    if let Some(x) = meta.x {
        let _ = write!(header, " x={x:?}");
    }
    if let Some(theta) = meta.theta {
        let _ = write!(header, " theta={theta:?}");
    }
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{header}")?;
    writeln!(w, "{COLUMNS}")?;
    for (i, r) in history.records.iter().enumerate() {
        writeln!(
            w,
            "{} {} {} {} {}",
            i + 1,
            r.vertex.row,
            r.vertex.col,
            r.outcome.a as u8,
            r.outcome.b as u8
        )?;
    }
    Ok(())
}

pub fn read_history<R: BufRead>(r: R, path: &Path) -> Result<(FieldHistory, HistoryMeta)> {
    let bad = |line: usize, message: String| Error::Format {
        kind: "field-history",
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut meta: Option<HistoryMeta> = None;
    let mut history: Option<FieldHistory> = None;
    for (k, line) in r.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line == MAGIC || line == COLUMNS {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let m = parse_meta(rest).map_err(|e| bad(lineno, e))?;
            let geometry = LatticeGeometry::new(m.n_vertices).map_err(|e| bad(lineno, e.to_string()))?;
            history = Some(FieldHistory::new(geometry));
            meta = Some(m);
            continue;
        }
        let h = history
            .as_mut()
            .ok_or_else(|| bad(lineno, "record before the n_vertices header".into()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(bad(lineno, format!("expected 5 columns, found {}", fields.len())));
        }
        let num = |i: usize| -> Result<u64> {
            fields[i]
                .parse::<u64>()
                .map_err(|e| bad(lineno, format!("column {}: {e}", i + 1)))
        };
        let step = num(0)?;
        if step as usize != h.len() + 1 {
            return Err(bad(lineno, format!("step {step} out of sequence")));
        }
        let vertex = VertexId::new(num(2)? as usize, num(1)?);
        let outcome = Outcome::from_bits(num(3)? as u8, num(4)? as u8).map_err(|e| bad(lineno, e.to_string()))?;
        h.push(vertex, outcome).map_err(|e| bad(lineno, e.to_string()))?;
    }
    match (history, meta) {
        (Some(h), Some(m)) => Ok((h, m)),
        _ => Err(bad(0, "missing `# n_vertices=...` header".into())),
    }
}

pub fn load_history(path: &Path) -> Result<(FieldHistory, HistoryMeta)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_history(std::io::BufReader::new(file), path)
}

fn parse_meta(rest: &str) -> std::result::Result<HistoryMeta, String> {
    let mut meta = HistoryMeta {
        n_vertices: 0,
        seed: None,
        field_mode: String::new(),
        x: None,
        theta: None,
    };
    let mut have_n = false;
    for field in rest.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| format!("header field `{field}` is not key=value"))?;
        let err = |e: &dyn std::fmt::Display| format!("{k}: {e}");
        match k {
            "n_vertices" => {
                meta.n_vertices = v.parse().map_err(|e| err(&e))?;
                have_n = true;
            }
            "seed" => meta.seed = Some(v.parse().map_err(|e| err(&e))?),
            "field_mode" => meta.field_mode = v.to_owned(),
            "x" => meta.x = Some(v.parse().map_err(|e| err(&e))?),
            "theta" => meta.theta = Some(v.parse().map_err(|e| err(&e))?),
            _ => return Err(format!("unknown header key `{k}`")),
        }
    }
    if !have_n {
        return Err("header lacks n_vertices".into());
    }
    Ok(meta)
}

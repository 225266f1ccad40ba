//! Convergence measures for a pair of states conditioned on one field history.

mod ensemble;
mod fit;
mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::StateVector;

pub use ensemble::{ensemble_density_distance, ensemble_density_distances};
pub use fit::{fit_power_law, FitResult};
pub use spectral::{largest_abs_eigenvalue, HermitianMatrix, EIGEN_TOLERANCE};

/// `B(l) = |b_1|^2 - |b_2|^2` for one link.
pub fn link_difference(marginal_1: f64, marginal_2: f64) -> f64 {
    marginal_1 - marginal_2
}

/// How link differences are combined inside a block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockNorm {
    /// Sum of `|B(l)|`; cannot cancel between links.
    #[default]
    AbsoluteLinks,
    /// Sum of the signed `B(l)`.
    Signed,
}

impl BlockNorm {
    pub fn name(self) -> &'static str {
        match self {
            BlockNorm::AbsoluteLinks => "absolute_links",
            BlockNorm::Signed => "signed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [BlockNorm::AbsoluteLinks, BlockNorm::Signed]
            .into_iter()
            .find(|n| n.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    /// First lattice time in the block.
    pub start: u64,
    pub value: f64,
}

/// `B_m(t)` on the disjoint grid `t = 1, 1 + m, 1 + 2m, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSeries {
    pub m: u64,
    pub blocks: Vec<Block>,
    /// Set when the horizon is not a multiple of `m` and the last rows were dropped.
    pub dropped_partial: bool,
}

/// Sums link differences `(row, B(l))` over blocks of `m` whole rows.
///
/// Only rows `1 ..= floor(t_max / m) * m` are used. Each kept block must hold
/// exactly `2 N m` links.
pub fn block_sum(
    links: impl IntoIterator<Item = (u64, f64)>,
    m: u64,
    n_vertices: usize,
    t_max: u64,
    norm: BlockNorm,
) -> Result<BlockSeries> {
    if m == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let n_blocks = (t_max / m) as usize;
    let mut sums = vec![0.0; n_blocks];
    let mut counts = vec![0u64; n_blocks];
    for (row, b) in links {
        if row == 0 {
            return Err(Error::domain("link difference recorded on row 0"));
        }
        let k = ((row - 1) / m) as usize;
        if k >= n_blocks {
            continue;
        }
        sums[k] += match norm {
            BlockNorm::AbsoluteLinks => b.abs(),
            BlockNorm::Signed => b,
        };
        counts[k] += 1;
    }
    let expected = 2 * n_vertices as u64 * m;
    if let Some(k) = counts.iter().position(|&c| c != expected) {
        return Err(Error::domain(format!(
            "block starting at t = {} holds {} links, expected {expected}",
            1 + k as u64 * m,
            counts[k]
        )));
    }
    Ok(BlockSeries {
        m,
        blocks: sums
            .into_iter()
            .enumerate()
            .map(|(k, value)| Block {
                start: 1 + k as u64 * m,
                value,
            })
            .collect(),
        dropped_partial: !t_max.is_multiple_of(m),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergence {
    pub t_c: Option<u64>,
    pub converged: bool,
}

/// Smallest block start `t0` such that every later block has `|B_m(t)| <= delta`.
///
/// Not converged when the final block exceeds `delta` (or there are no blocks).
pub fn convergence_time(blocks: &[Block], delta: f64) -> Convergence {
    let not_converged = Convergence {
        t_c: None,
        converged: false,
    };
    let Some(last) = blocks.last() else {
        return not_converged;
    };
    if last.value.abs() > delta {
        return not_converged;
    }
    let t_c = blocks
        .iter()
        .rev()
        .find(|b| b.value.abs() > delta)
        .map_or(blocks[0].start, |b| b.start);
    Convergence {
        t_c: Some(t_c),
        converged: true,
    }
}

/// `C_n = 1 - |<psi_1 | psi_2>|^2`, clamped to `[0, 1]`.
pub fn overlap_deficit(state_1: &StateVector, state_2: &StateVector) -> Result<f64> {
    let overlap = state_1.inner(state_2)?;
    Ok((1.0 - overlap.norm_sqr()).clamp(0.0, 1.0))
}

/// Smallest elementary-motion count `n` (1-based) from which every `C_k`,
/// `k >= n`, is below `threshold`.
pub fn settle_step(c_series: &[f64], threshold: f64) -> Option<usize> {
    match c_series.iter().rposition(|&c| c >= threshold) {
        None if c_series.is_empty() => None,
        None => Some(1),
        Some(k) if k + 1 == c_series.len() => None,
        Some(k) => Some(k + 2),
    }
}

/// First elementary-motion count `n` (1-based) with `C_n < threshold`.
pub fn first_below_step(c_series: &[f64], threshold: f64) -> Option<usize> {
    c_series.iter().position(|&c| c < threshold).map(|k| k + 1)
}

/// Recorded convergence measures of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagSeries {
    pub blocks: BlockSeries,
    /// `C_n` for `n = 1, 2, ...` elementary motions.
    pub c_series: Vec<f64>,
    pub t_c: Option<u64>,
    pub converged: bool,
}

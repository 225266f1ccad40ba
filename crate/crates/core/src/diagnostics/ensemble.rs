use rand::Rng;

use super::spectral::{largest_abs_eigenvalue, HermitianMatrix, EIGEN_TOLERANCE};
use crate::dynamics::RunConfig;
use crate::error::{Error, Result};
use crate::lattice::SurfaceFront;

/// Widest lattice for which the dense `4^N x 4^N` ensembles are formed.
pub const MAX_ENSEMBLE_VERTICES: usize = 3;

/// Operator-norm distance between the sampled ensembles of states 1 and 2
/// after `checkpoint` motions. See [`ensemble_density_distances`].
pub fn ensemble_density_distance<R: Rng + ?Sized>(
    config: &RunConfig,
    checkpoint: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    Ok(ensemble_density_distances(config, &[checkpoint], n_samples, rng)?[0])
}

/// Samples `n_samples` histories from state 1, replays each onto state 2 and
/// returns, per checkpoint, the largest `|eigenvalue|` of
/// `(1/K) sum_k (|psi^1_n><psi^1_n| - |psi^2_n><psi^2_n|)`.
///
/// All samples share one linear extension, drawn first from `rng`.
pub fn ensemble_density_distances<R: Rng + ?Sized>(
    config: &RunConfig,
    checkpoints: &[usize],
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    config.validate()?;
    if config.n_vertices > MAX_ENSEMBLE_VERTICES {
        return Err(Error::domain(format!(
            "ensemble distances need N <= {MAX_ENSEMBLE_VERTICES}, got {}",
            config.n_vertices
        )));
    }
    if n_samples == 0 {
        return Err(Error::domain("ensemble needs at least one sample"));
    }
    let model = config.model()?;
    let (start_1, start_2) = config.load_states()?;
    let horizon = checkpoints.iter().copied().max().unwrap_or(0);

    let mut front = SurfaceFront::zero(&model.geometry);
    let mut order = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let v = model.geometry.pick_next(&front, rng)?;
        model.geometry.advance_in_place(&mut front, v)?;
        order.push(v);
    }

    let dim = start_1.dim();
    let mut diffs = vec![HermitianMatrix::zeros(dim); checkpoints.len()];
    let weight = 1.0 / n_samples as f64;
    for _ in 0..n_samples {
        let mut s1 = start_1.clone();
        let mut s2 = start_2.clone();
        for n in 0..=horizon {
            if n > 0 {
                let v = order[n - 1];
                let step = model.step_sample_at(&mut s1, v, rng)?;
                model.step_replay(&mut s2, v, step.outcome).map_err(|e| e.at(v, Some(n)))?;
            }
            for (k, _) in checkpoints.iter().enumerate().filter(|(_, &c)| c == n) {
                diffs[k].add_projector(s1.amplitudes(), weight);
                diffs[k].add_projector(s2.amplitudes(), -weight);
            }
        }
    }
    Ok(diffs
        .iter()
        .map(|d| largest_abs_eigenvalue(d, EIGEN_TOLERANCE))
        .collect())
}

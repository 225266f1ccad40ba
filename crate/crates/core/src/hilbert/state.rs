use num_complex::Complex64;
use rand::Rng;

use super::ops::{JumpFamily, Outcome, TwoSiteOp};
use super::sectors::{for_each_group, for_each_index, SectorSet};
use crate::error::{Error, Result};

/// Widest lattice a dense register is allowed for (`2^24` amplitudes).
pub const MAX_VERTICES: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense amplitude vector over the field basis of one spacelike surface.
///
/// The register is indexed by slot, so an elementary motion reuses the two
/// slots of the vertex it crosses.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_vertices: usize,
    amps: Vec<Complex64>,
    sectors: SectorSet,
}

fn check_width(n_vertices: usize) -> Result<()> {
    if !(1..=MAX_VERTICES).contains(&n_vertices) {
        return Err(Error::domain(format!(
            "register width must be 1..={MAX_VERTICES} vertices, got {n_vertices}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// Field eigenstate with basis index `index`.
    pub fn basis(n_vertices: usize, index: usize) -> Result<Self> {
        check_width(n_vertices)?;
        let dim = 1usize << (2 * n_vertices);
        if index >= dim {
            return Err(Error::domain(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_vertices,
            amps,
            sectors: SectorSet::single(index.count_ones() as usize),
        })
    }

    /// Field eigenstate from a bit string whose `s`-th character is the field on slot `s`.
    pub fn from_bit_string(n_vertices: usize, bits: &str) -> Result<Self> {
        let index = parse_bit_string(n_vertices, bits)?;
        Self::basis(n_vertices, index)
    }

    /// Wraps `amps` as they are; they must have unit norm within `1e-10`.
    pub fn from_amplitudes(n_vertices: usize, amps: Vec<Complex64>) -> Result<Self> {
        let state = Self::unchecked(n_vertices, amps)?;
        let norm_sqr: f64 = state.amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!(
                "state vector is not normalised (norm^2 = {norm_sqr})"
            )));
        }
        Ok(state)
    }

    /// Normalises `amps`; fails on a zero or non-finite vector.
    pub fn normalized(n_vertices: usize, amps: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::unchecked(n_vertices, amps)?;
        let norm = state.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::domain("state vector has zero or non-finite norm"));
        }
        state.amps.iter_mut().for_each(|z| *z /= norm);
        Ok(state)
    }

    fn unchecked(n_vertices: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_width(n_vertices)?;
        let dim = 1usize << (2 * n_vertices);
        if amps.len() != dim {
            return Err(Error::domain(format!(
                "expected {dim} amplitudes for {n_vertices} vertices, got {}",
                amps.len()
            )));
        }
        let mut sectors = SectorSet::empty();
        for (i, z) in amps.iter().enumerate() {
            if *z != ZERO {
                sectors.insert(i.count_ones() as usize);
            }
        }
        Ok(StateVector {
            n_vertices,
            amps,
            sectors,
        })
    }

    /// Random normalised state with support on every basis vector.
    pub fn random<R: Rng + ?Sized>(n_vertices: usize, rng: &mut R) -> Result<Self> {
        check_width(n_vertices)?;
        let dim = 1usize << (2 * n_vertices);
        let amps = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Self::normalized(n_vertices, amps)
    }

    /// Random normalised superposition inside the `m`-particle sector.
    pub fn random_in_sector<R: Rng + ?Sized>(n_vertices: usize, m: usize, rng: &mut R) -> Result<Self> {
        check_width(n_vertices)?;
        if m > 2 * n_vertices {
            return Err(Error::domain(format!("sector {m} exceeds {} slots", 2 * n_vertices)));
        }
        let dim = 1usize << (2 * n_vertices);
        let mut amps = vec![ZERO; dim];
        for_each_index(2 * n_vertices, SectorSet::single(m), |i| {
            amps[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        });
        Self::normalized(n_vertices, amps)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_slots(&self) -> usize {
        2 * self.n_vertices
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Particle-number sectors the kernels treat as possibly nonzero.
    pub fn sectors(&self) -> SectorSet {
        self.sectors
    }

    /// Makes every kernel sweep the full basis. Numerical results are unchanged.
    pub fn force_dense(&mut self) {
        self.sectors = SectorSet::full(self.n_slots());
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = 0.0;
        for_each_index(self.n_slots(), self.sectors, |i| acc += self.amps[i].norm_sqr());
        acc
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|z| *z *= c);
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let n = self.n_slots();
        if a == b || a >= n || b >= n {
            return Err(Error::domain(format!(
                "slot pair ({a}, {b}) invalid for a {n}-slot register"
            )));
        }
        Ok(())
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.n_slots() {
            return Err(Error::domain(format!(
                "slot {slot} out of range for a {}-slot register",
                self.n_slots()
            )));
        }
        Ok(())
    }

    /// Applies `op` on the `(a, b)` tensor factors; no renormalisation.
    pub fn apply_two_qubit(&mut self, a: usize, b: usize, op: &TwoSiteOp) -> Result<()> {
        self.check_pair(a, b)?;
        self.apply_weighted(a, b, op);
        Ok(())
    }

    /// Applies `op` and returns the local weights `||P_beta psi'||^2` of the
    /// result in local order `00, 01, 10, 11`.
    pub(crate) fn apply_weighted(&mut self, a: usize, b: usize, op: &TwoSiteOp) -> [f64; 4] {
        if !op.is_number_conserving() {
            self.force_dense();
        }
        let (ma, mb) = (1usize << a, 1usize << b);
        let amps = &mut self.amps;
        let mut w = [0.0; 4];
        for_each_group(2 * self.n_vertices, a, b, self.sectors, |base| {
            let idx = [base, base | mb, base | ma, base | ma | mb];
            let out = op.apply([amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]]);
            for k in 0..4 {
                amps[idx[k]] = out[k];
                w[k] += out[k].norm_sqr();
            }
        });
        w
    }

    /// Local weights `||P_beta psi||^2` for the pair `(a, b)`.
    pub(crate) fn local_weights(&self, a: usize, b: usize) -> [f64; 4] {
        let (ma, mb) = (1usize << a, 1usize << b);
        let mut w = [0.0; 4];
        for_each_group(self.n_slots(), a, b, self.sectors, |base| {
            w[0] += self.amps[base].norm_sqr();
            w[1] += self.amps[base | mb].norm_sqr();
            w[2] += self.amps[base | ma].norm_sqr();
            w[3] += self.amps[base | ma | mb].norm_sqr();
        });
        w
    }

    /// Field-1 weights `[|b_a|^2, |b_b|^2]` on the two slots of a vertex.
    pub fn pair_marginals(&self, a: usize, b: usize) -> Result<[f64; 2]> {
        self.check_pair(a, b)?;
        Ok(marginals_from_weights(self.local_weights(a, b)))
    }

    /// Multiplies the `(a, b)` factor by the diagonal `d` (local order) and by `scale`.
    pub(crate) fn apply_local_diagonal(&mut self, a: usize, b: usize, d: [f64; 4], scale: f64) {
        let (ma, mb) = (1usize << a, 1usize << b);
        let f = d.map(|x| x * scale);
        let amps = &mut self.amps;
        for_each_group(2 * self.n_vertices, a, b, self.sectors, |base| {
            amps[base] *= f[0];
            amps[base | mb] *= f[1];
            amps[base | ma] *= f[2];
            amps[base | ma | mb] *= f[3];
        });
    }

    /// `p(alpha) = ||J(alpha) psi||^2` for the four outcomes in order `00, 01, 10, 11`.
    pub fn outcome_probabilities(&self, a: usize, b: usize, jumps: &JumpFamily) -> Result<[f64; 4]> {
        self.check_pair(a, b)?;
        Ok(jumps.outcome_probabilities_from_weights(self.local_weights(a, b)))
    }

    /// Replaces the state by `J(alpha) psi / ||J(alpha) psi||`.
    pub fn apply_jump(&mut self, a: usize, b: usize, outcome: Outcome, jumps: &JumpFamily) -> Result<()> {
        self.check_pair(a, b)?;
        let w = self.local_weights(a, b);
        self.collapse(a, b, outcome, jumps, w).map(|_| ())
    }

    /// Jump with precomputed local weights; returns the outcome probability.
    pub(crate) fn collapse(
        &mut self,
        a: usize,
        b: usize,
        outcome: Outcome,
        jumps: &JumpFamily,
        w: [f64; 4],
    ) -> Result<f64> {
        let p = jumps.outcome_probabilities_from_weights(w)[outcome.index()];
        if p.is_nan() || p <= 0.0 {
            return Err(Error::ImpossibleOutcome {
                vertex: None,
                outcome,
                step: None,
            });
        }
        let total: f64 = w.iter().sum();
        self.apply_local_diagonal(a, b, jumps.vertex_diagonal(outcome), 1.0 / p.sqrt());
        Ok(p / total)
    }

    /// `J(alpha) psi` without renormalisation.
    pub fn apply_jump_unnormalized(&mut self, a: usize, b: usize, outcome: Outcome, jumps: &JumpFamily) -> Result<()> {
        self.check_pair(a, b)?;
        self.apply_local_diagonal(a, b, jumps.vertex_diagonal(outcome), 1.0);
        Ok(())
    }

    /// Weight `|b|^2` of field value 1 on `slot`.
    pub fn bit_marginal(&self, slot: usize) -> Result<f64> {
        self.check_slot(slot)?;
        let mask = 1usize << slot;
        let mut acc = 0.0;
        for_each_index(self.n_slots(), self.sectors, |i| {
            if i & mask != 0 {
                acc += self.amps[i].norm_sqr();
            }
        });
        Ok(acc)
    }

    /// Probability that the field on `slot` will be 1 after a hit:
    /// `(|a|^2 X^2 + |b|^2) / (1 + X^2)`.
    pub fn prob_one_on_link(&self, slot: usize, jumps: &JumpFamily) -> Result<f64> {
        let one = self.bit_marginal(slot)?;
        let x2 = jumps.x() * jumps.x();
        Ok(((1.0 - one) * x2 + one) / (1.0 + x2))
    }

    /// Weight of each particle-number sector, indexed by `m` in `0..=2N`.
    pub fn particle_number_decomposition(&self) -> Vec<f64> {
        let mut weights = vec![0.0; self.n_slots() + 1];
        for_each_index(self.n_slots(), self.sectors, |i| {
            weights[i.count_ones() as usize] += self.amps[i].norm_sqr();
        });
        weights
    }

    /// `<self | other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_vertices != other.n_vertices {
            return Err(Error::GeometryMismatch {
                expected: self.n_vertices,
                found: other.n_vertices,
            });
        }
        let mut acc = ZERO;
        let common = self.sectors.intersection(other.sectors);
        for_each_index(self.n_slots(), common, |i| acc += self.amps[i].conj() * other.amps[i]);
        Ok(acc)
    }

    /// Conjugates by the global bit flip: every field value `0 <-> 1`.
    pub fn bit_flipped(&self) -> StateVector {
        let mask = self.dim() - 1;
        let amps = (0..self.dim()).map(|i| self.amps[i ^ mask]).collect();
        StateVector {
            n_vertices: self.n_vertices,
            amps,
            sectors: self.sectors.mirrored(self.n_slots()),
        }
    }
}

/// `[|b_a|^2, |b_b|^2]` from local weights, normalised by their total.
pub(crate) fn marginals_from_weights(w: [f64; 4]) -> [f64; 2] {
    let total: f64 = w.iter().sum();
    [(w[2] + w[3]) / total, (w[1] + w[3]) / total]
}

/// Parses a field bit string (character `s` = slot `s`) into a basis index.
pub(crate) fn parse_bit_string(n_vertices: usize, bits: &str) -> Result<usize> {
    let bits = bits.trim();
    if bits.len() != 2 * n_vertices {
        return Err(Error::domain(format!(
            "bit string `{bits}` has length {}, expected {}",
            bits.len(),
            2 * n_vertices
        )));
    }
    bits.chars().enumerate().try_fold(0usize, |acc, (s, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << s)),
        _ => Err(Error::domain(format!("bit string `{bits}` contains `{c}`"))),
    })
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::history::FieldHistory;
use crate::error::{Error, Result};
use crate::hilbert::{marginals_from_weights, JumpFamily, Outcome, RMatrix, StateVector};
use crate::lattice::{LatticeGeometry, SurfaceFront, VertexId};

/// Lattice plus the uniform R-matrix and hit operators.
#[derive(Clone, Copy, Debug)]
pub struct Model {
    pub geometry: LatticeGeometry,
    pub rmatrix: RMatrix,
    pub jumps: JumpFamily,
}

/// Result of one sampled elementary motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledStep {
    pub vertex: VertexId,
    pub outcome: Outcome,
    /// Post-U, pre-jump `|b|^2` on the vertex's slots `(a, b)`.
    pub marginals: [f64; 2],
    /// Conditional probability of `outcome` given the state before the step.
    pub probability: f64,
}

/// How the field is produced in a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    #[serde(rename = "sampled_from_1")]
    SampledFrom1,
    #[serde(rename = "sampled_from_2")]
    SampledFrom2,
    AllOnes,
    AllZeros,
    IidUniform,
    FromFile,
}

impl FieldMode {
    pub const ALL: [FieldMode; 6] = [
        FieldMode::SampledFrom1,
        FieldMode::SampledFrom2,
        FieldMode::AllOnes,
        FieldMode::AllZeros,
        FieldMode::IidUniform,
        FieldMode::FromFile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldMode::SampledFrom1 => "sampled_from_1",
            FieldMode::SampledFrom2 => "sampled_from_2",
            FieldMode::AllOnes => "all_ones",
            FieldMode::AllZeros => "all_zeros",
            FieldMode::IidUniform => "iid_uniform",
            FieldMode::FromFile => "from_file",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        FieldMode::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn is_sampled(self) -> bool {
        matches!(self, FieldMode::SampledFrom1 | FieldMode::SampledFrom2)
    }
}

impl std::fmt::Display for FieldMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome for the externally driven field modes.
///
/// `all_ones` and `all_zeros` consume no randomness; `iid_uniform` consumes
/// one uniform draw `u` and reads the two fair bits off `floor(4u)`.
pub fn drive_outcome<R: Rng + ?Sized>(mode: FieldMode, rng: &mut R) -> Result<Outcome> {
    match mode {
        FieldMode::AllOnes => Ok(Outcome::new(true, true)),
        FieldMode::AllZeros => Ok(Outcome::new(false, false)),
        FieldMode::IidUniform => {
            let u: f64 = rng.gen();
            Ok(Outcome::from_index(((u * 4.0) as usize).min(3)))
        }
        other => Err(Error::domain(format!("field mode {other} is not an external drive"))),
    }
}

/// Picks an outcome by comparing `u` with the cumulative probabilities in
/// order `00, 01, 10, 11`.
pub fn sample_outcome(probs: [f64; 4], u: f64) -> Outcome {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if target < acc {
            return Outcome::from_index(k);
        }
    }
    Outcome::from_index(last)
}

/// Probability of a field history, kept as a logarithm so long histories do
/// not underflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StemProbability {
    pub ln: f64,
}

impl StemProbability {
    pub fn value(self) -> f64 {
        self.ln.exp()
    }
}

impl Model {
    pub fn new(n_vertices: usize, x: f64, theta: f64) -> Result<Self> {
        Ok(Model {
            geometry: LatticeGeometry::new(n_vertices)?,
            rmatrix: RMatrix::new(theta)?,
            jumps: JumpFamily::new(x)?,
        })
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_vertices() != self.geometry.n_vertices() {
            return Err(Error::GeometryMismatch {
                expected: self.geometry.n_vertices(),
                found: state.n_vertices(),
            });
        }
        Ok(())
    }

    /// One elementary motion with the outcome drawn from `state` itself.
    ///
    /// Draw order: one uniform for the vertex, one for the outcome.
    pub fn step_sample<R: Rng + ?Sized>(
        &self,
        state: &mut StateVector,
        front: &mut SurfaceFront,
        rng: &mut R,
    ) -> Result<SampledStep> {
        let vertex = self.geometry.pick_next(front, rng)?;
        let step = self.step_sample_at(state, vertex, rng)?;
        self.geometry.advance_in_place(front, vertex)?;
        Ok(step)
    }

    /// Samples an outcome at a given vertex; one uniform draw.
    pub fn step_sample_at<R: Rng + ?Sized>(
        &self,
        state: &mut StateVector,
        vertex: VertexId,
        rng: &mut R,
    ) -> Result<SampledStep> {
        self.check_state(state)?;
        self.check_vertex(vertex)?;
        let (a, b) = self.geometry.slots_of(vertex);
        let w = state.apply_weighted(a, b, self.rmatrix.op());
        let probs = self.jumps.outcome_probabilities_from_weights(w);
        let outcome = sample_outcome(probs, rng.gen());
        let probability = state
            .collapse(a, b, outcome, &self.jumps, w)
            .map_err(|e| e.at(vertex, None))?;
        Ok(SampledStep {
            vertex,
            outcome,
            marginals: marginals_from_weights(w),
            probability,
        })
    }

    fn check_vertex(&self, vertex: VertexId) -> Result<()> {
        if vertex.col >= self.geometry.n_vertices() || vertex.row == 0 {
            return Err(Error::domain(format!("vertex {vertex} is off the lattice")));
        }
        Ok(())
    }

    /// One elementary motion with an imposed outcome. Returns the post-U,
    /// pre-jump marginals on the vertex's slots.
    pub fn step_replay(&self, state: &mut StateVector, vertex: VertexId, outcome: Outcome) -> Result<[f64; 2]> {
        self.check_state(state)?;
        self.check_vertex(vertex)?;
        let (a, b) = self.geometry.slots_of(vertex);
        let w = state.apply_weighted(a, b, self.rmatrix.op());
        state
            .collapse(a, b, outcome, &self.jumps, w)
            .map_err(|e| e.at(vertex, None))?;
        Ok(marginals_from_weights(w))
    }

    /// `|| J(alpha_n) U(v_n) ... J(alpha_1) U(v_1) psi_0 ||^2`, accumulated on
    /// the unnormalised vector. The vector is rescaled (and the scale logged)
    /// only when its norm drops below `1e-100`.
    pub fn stem_probability(&self, initial: &StateVector, history: &FieldHistory) -> Result<StemProbability> {
        self.check_state(initial)?;
        if history.geometry() != &self.geometry {
            return Err(Error::GeometryMismatch {
                expected: self.geometry.n_vertices(),
                found: history.geometry().n_vertices(),
            });
        }
        let mut psi = initial.clone();
        let mut ln_scale = 0.0;
        for r in history.records() {
            let (a, b) = self.geometry.slots_of(r.vertex);
            psi.apply_two_qubit(a, b, self.rmatrix.op())?;
            psi.apply_jump_unnormalized(a, b, r.outcome, &self.jumps)?;
            let n2 = psi.norm_sqr();
            if n2 == 0.0 {
                return Ok(StemProbability { ln: f64::NEG_INFINITY });
            }
            if n2 < 1e-100 {
                psi.scale(num_complex::Complex64::new(1.0 / n2.sqrt(), 0.0));
                ln_scale += n2.ln();
            }
        }
        Ok(StemProbability {
            ln: ln_scale + psi.norm_sqr().ln(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::history::HistoryRecord;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projective_swap_is_deterministic() {
        let model = Model::new(3, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = StateVector::from_bit_string(3, "100100").unwrap();
        let mut front = SurfaceFront::zero(&model.geometry);
        for _ in 0..60 {
            let (a, b) = {
                let before = state.clone();
                let step = model.step_sample(&mut state, &mut front, &mut rng).unwrap();
                let (a, b) = model.geometry.slots_of(step.vertex);
                let ba = before.bit_marginal(a).unwrap() == 1.0;
                let bb = before.bit_marginal(b).unwrap() == 1.0;
                // Outcome equals the swapped input bits.
                assert_eq!(step.outcome, Outcome::new(bb, ba));
                assert_eq!(step.probability, 1.0);
                (a, b)
            };
            assert!(state.bit_marginal(a).unwrap() == 0.0 || state.bit_marginal(a).unwrap() == 1.0);
            assert!(state.bit_marginal(b).unwrap() == 0.0 || state.bit_marginal(b).unwrap() == 1.0);
        }
    }

    #[test]
    fn no_hit_gives_uniform_outcomes() {
        let model = Model::new(2, 1.0, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0usize; 4];
        for _ in 0..4000 {
            let mut state = StateVector::from_bit_string(2, "1000").unwrap();
            let mut front = SurfaceFront::zero(&model.geometry);
            let step = model.step_sample(&mut state, &mut front, &mut rng).unwrap();
            assert!((step.probability - 0.25).abs() < 1e-15);
            counts[step.outcome.index()] += 1;
        }
        for c in counts {
            // 3 sigma of Binomial(4000, 1/4) is about 82.
            assert!((900..=1100).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let model = Model::new(3, 0.8, 0.2).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut state = StateVector::from_bit_string(3, "110000").unwrap();
            let mut front = SurfaceFront::zero(&model.geometry);
            (0..200)
                .map(|_| model.step_sample(&mut state, &mut front, &mut rng).unwrap())
                .map(|s| (s.vertex, s.outcome))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn replaying_own_history_reproduces_trajectory() {
        let model = Model::new(3, 0.7, 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let start = StateVector::from_bit_string(3, "010000").unwrap();
        let mut sampled = start.clone();
        let mut replayed = start.clone();
        let mut front = SurfaceFront::zero(&model.geometry);
        for _ in 0..100 {
            let s = model.step_sample(&mut sampled, &mut front, &mut rng).unwrap();
            let m = model.step_replay(&mut replayed, s.vertex, s.outcome).unwrap();
            assert_eq!(m, s.marginals);
            assert_eq!(sampled.amplitudes(), replayed.amplitudes());
        }
    }

    #[test]
    fn projective_replay_forces_second_state() {
        // X = 0: after state 1 is an eigenstate, a same-sector state 2 is
        // projected onto it as soon as the outcomes single it out.
        let model = Model::new(2, 0.0, 0.25 * std::f64::consts::PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s1 = StateVector::from_bit_string(2, "1000").unwrap();
        let mut s2 = StateVector::from_bit_string(2, "0010").unwrap();
        let mut front = SurfaceFront::zero(&model.geometry);
        let mut last_deficit = 1.0;
        for _ in 0..40 {
            let step = model.step_sample(&mut s1, &mut front, &mut rng).unwrap();
            match model.step_replay(&mut s2, step.vertex, step.outcome) {
                Ok(_) => {}
                Err(Error::ImpossibleOutcome { .. }) => return,
                Err(e) => panic!("{e}"),
            }
            last_deficit = 1.0 - s1.inner(&s2).unwrap().norm_sqr();
            if last_deficit < 1e-12 {
                return;
            }
        }
        panic!("state 2 never forced onto state 1 (deficit {last_deficit})");
    }

    #[test]
    fn impossible_replay() {
        let model = Model::new(2, 0.0, 0.3).unwrap();
        let mut vac = StateVector::basis(2, 0).unwrap();
        let err = model
            .step_replay(&mut vac, VertexId::new(0, 1), Outcome::new(true, true))
            .unwrap_err();
        assert!(matches!(err, Error::ImpossibleOutcome { vertex: Some(_), .. }));
    }

    #[test]
    fn drive_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            assert_eq!(drive_outcome(FieldMode::AllOnes, &mut rng).unwrap(), Outcome::new(true, true));
            assert_eq!(drive_outcome(FieldMode::AllZeros, &mut rng).unwrap(), Outcome::new(false, false));
        }
        let (mut a, mut b) = (0, 0);
        for _ in 0..10_000 {
            let o = drive_outcome(FieldMode::IidUniform, &mut rng).unwrap();
            a += o.a as usize;
            b += o.b as usize;
        }
        for count in [a, b] {
            assert!((4800..=5200).contains(&count), "{a} {b}");
        }
        assert!(drive_outcome(FieldMode::SampledFrom1, &mut rng).is_err());
    }

    #[test]
    fn sampling_rule() {
        let p = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(sample_outcome(p, 0.05).index(), 0);
        assert_eq!(sample_outcome(p, 0.1).index(), 1);
        assert_eq!(sample_outcome(p, 0.59).index(), 2);
        assert_eq!(sample_outcome(p, 0.999).index(), 3);
        assert_eq!(sample_outcome([0.5, 0.5, 0.0, 0.0], 0.999_999_999).index(), 1);
    }

    #[test]
    fn empty_history_has_probability_one() {
        let model = Model::new(2, 0.5, 0.3).unwrap();
        let psi = StateVector::from_bit_string(2, "1100").unwrap();
        let p = model.stem_probability(&psi, &FieldHistory::new(model.geometry)).unwrap();
        assert_eq!(p.value(), 1.0);
    }

    #[test]
    fn long_histories_do_not_underflow() {
        let model = Model::new(2, 0.5, 0.3).unwrap();
        let psi = StateVector::from_bit_string(2, "1000").unwrap();
        let mut h = FieldHistory::new(model.geometry);
        let mut front = SurfaceFront::zero(&model.geometry);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut chain = 0.0;
        let mut s = psi.clone();
        for _ in 0..2000 {
            let step = model.step_sample(&mut s, &mut front, &mut rng).unwrap();
            chain += step.probability.ln();
            h.push(step.vertex, step.outcome).unwrap();
        }
        let p = model.stem_probability(&psi, &h).unwrap();
        assert!(p.ln < -700.0 && p.ln.is_finite());
        assert!(((p.ln - chain) / chain).abs() < 1e-10);
        let records: Vec<HistoryRecord> = h.records().to_vec();
        assert_eq!(records.len(), 2000);
    }
}

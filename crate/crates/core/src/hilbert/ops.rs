use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Particle number of each local basis state `00, 01, 10, 11`.
const LOCAL_POPCOUNT: [u32; 4] = [0, 1, 1, 2];

/// A 4x4 operator on the qubits of one vertex.
///
/// Local basis index is `2 * bit_a + bit_b`, i.e. the order `00, 01, 10, 11`
/// over `(bit at slot a, bit at slot b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSiteOp(pub [[Complex64; 4]; 4]);

impl TwoSiteOp {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        TwoSiteOp(m)
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(d[i], 0.0);
        }
        TwoSiteOp(m)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.0[j][i].conj();
            }
        }
        TwoSiteOp(m)
    }

    pub fn matmul(&self, rhs: &TwoSiteOp) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        TwoSiteOp(m)
    }

    pub fn apply(&self, v: [Complex64; 4]) -> [Complex64; 4] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2] + m[0][3] * v[3],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2] + m[1][3] * v[3],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2] + m[2][3] * v[3],
            m[3][0] * v[0] + m[3][1] * v[1] + m[3][2] * v[2] + m[3][3] * v[3],
        ]
    }

    /// Largest entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        let id = TwoSiteOp::identity();
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((p.0[i][j] - id.0[i][j]).norm());
            }
        }
        worst
    }

    /// True if no entry couples local states of different particle number.
    pub fn is_number_conserving(&self) -> bool {
        (0..4).all(|i| {
            (0..4).all(|j| LOCAL_POPCOUNT[i] == LOCAL_POPCOUNT[j] || self.0[i][j] == ZERO)
        })
    }
}

/// The uniform per-vertex unitary: identity on `00` and `11`, and on the
/// `01, 10` block
///
/// ```text
/// [ i sin(theta)   cos(theta)  ]
/// [ cos(theta)     i sin(theta)]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RMatrix {
    theta: f64,
    op: TwoSiteOp,
}

impl RMatrix {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::domain(format!("theta must be finite, got {theta}")));
        }
        let (s, c) = theta.sin_cos();
        let is = Complex64::new(0.0, s);
        let c = Complex64::new(c, 0.0);
        let op = TwoSiteOp([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, is, c, ZERO],
            [ZERO, c, is, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]);
        Ok(RMatrix { theta, op })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn op(&self) -> &TwoSiteOp {
        &self.op
    }
}

pub fn build_r_matrix(theta: f64) -> Result<RMatrix> {
    RMatrix::new(theta)
}

/// The two-element POVM `J_0 = diag(1, X) / sqrt(1 + X^2)`,
/// `J_1 = diag(X, 1) / sqrt(1 + X^2)` applied on every outgoing link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpFamily {
    x: f64,
    /// `j[outcome][field]`: diagonal entry of `J_outcome` on field value `field`.
    j: [[f64; 2]; 2],
}

impl JumpFamily {
    pub fn new(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("hit parameter X must lie in [0, 1], got {x}")));
        }
        let norm = (1.0 + x * x).sqrt();
        let (hi, lo) = (1.0 / norm, x / norm);
        Ok(JumpFamily {
            x,
            j: [[hi, lo], [lo, hi]],
        })
    }

    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(1.0 - epsilon)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn epsilon(&self) -> f64 {
        1.0 - self.x
    }

    /// Diagonal entry of `J_outcome` on a link carrying `field`.
    pub fn entry(&self, outcome: bool, field: bool) -> f64 {
        self.j[outcome as usize][field as usize]
    }

    /// `J_0` or `J_1` as a diagonal pair over field values `(0, 1)`.
    pub fn single(&self, outcome: bool) -> [f64; 2] {
        self.j[outcome as usize]
    }

    /// Diagonal of `J(alpha) = J_{alpha_a} (x) J_{alpha_b}` in local order `00, 01, 10, 11`.
    pub fn vertex_diagonal(&self, outcome: Outcome) -> [f64; 4] {
        let ja = self.j[outcome.a as usize];
        let jb = self.j[outcome.b as usize];
        [ja[0] * jb[0], ja[0] * jb[1], ja[1] * jb[0], ja[1] * jb[1]]
    }

    /// Outcome probabilities from the local weights `w[beta] = ||P_beta psi||^2`.
    pub fn outcome_probabilities_from_weights(&self, w: [f64; 4]) -> [f64; 4] {
        let mut p = [0.0; 4];
        for (k, pk) in p.iter_mut().enumerate() {
            let d = self.vertex_diagonal(Outcome::from_index(k));
            *pk = (0..4).map(|beta| d[beta] * d[beta] * w[beta]).sum();
        }
        p
    }

    /// Largest entrywise deviation of `J_0^2 + J_1^2` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        (0..2)
            .map(|f| (self.j[0][f].powi(2) + self.j[1][f].powi(2) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn build_jump_family(x: f64) -> Result<JumpFamily> {
    JumpFamily::new(x)
}

/// Field values realised on the two outgoing links of a vertex, in the
/// order `(slot a, slot b)` of [`crate::lattice::LatticeGeometry::slots_of`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub a: bool,
    pub b: bool,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::new(false, false),
        Outcome::new(false, true),
        Outcome::new(true, false),
        Outcome::new(true, true),
    ];

    pub const fn new(a: bool, b: bool) -> Self {
        Outcome { a, b }
    }

    pub fn from_bits(a: u8, b: u8) -> Result<Self> {
        if a > 1 || b > 1 {
            return Err(Error::domain(format!("outcome bits must be 0 or 1, got ({a}, {b})")));
        }
        Ok(Outcome::new(a == 1, b == 1))
    }

    /// Local basis index `2 * a + b`.
    pub fn index(self) -> usize {
        ((self.a as usize) << 1) | self.b as usize
    }

    pub fn from_index(i: usize) -> Self {
        Outcome::new(i & 2 != 0, i & 1 != 0)
    }

    pub fn flipped(self) -> Self {
        Outcome::new(!self.a, !self.b)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a as u8, self.b as u8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn r_matrix_limits() {
        let swap = RMatrix::new(0.0).unwrap();
        assert!(close(swap.op().0[1][1], ZERO));
        assert!(close(swap.op().0[1][2], ONE));
        assert!(close(swap.op().0[2][1], ONE));
        let phase = RMatrix::new(PI / 2.0).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert!(close(phase.op().0[1][1], i));
        assert!(close(phase.op().0[2][2], i));
        assert!(phase.op().0[1][2].norm() < 1e-15);
        assert!(RMatrix::new(f64::NAN).is_err());
    }

    #[test]
    fn r_matrix_is_unitary_and_conserving() {
        for k in 0..50 {
            let r = RMatrix::new(-3.0 + 0.13 * k as f64).unwrap();
            assert!(r.op().unitarity_defect() < 1e-12);
            assert!(r.op().is_number_conserving());
        }
    }

    #[test]
    fn jump_limits() {
        let proj = JumpFamily::new(0.0).unwrap();
        assert_eq!(proj.single(false), [1.0, 0.0]);
        assert_eq!(proj.single(true), [0.0, 1.0]);
        let none = JumpFamily::new(1.0).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((none.single(false)[0] - h).abs() < 1e-16);
        assert_eq!(none.single(false), none.single(true));
        assert!(JumpFamily::new(-0.1).is_err());
        assert!(JumpFamily::new(1.5).is_err());
    }

    #[test]
    fn jump_completeness() {
        for k in 0..=100 {
            let j = JumpFamily::new(k as f64 / 100.0).unwrap();
            assert!(j.completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn outcome_indexing() {
        for (i, o) in Outcome::ALL.iter().enumerate() {
            assert_eq!(o.index(), i);
            assert_eq!(Outcome::from_index(i), *o);
        }
        assert_eq!(Outcome::from_bits(1, 0).unwrap().index(), 2);
        assert!(Outcome::from_bits(2, 0).is_err());
        assert_eq!(Outcome::new(true, false).flipped(), Outcome::new(false, true));
    }
}

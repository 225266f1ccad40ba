use num_complex::Complex64;

/// Convergence tolerance for [`largest_abs_eigenvalue`].
pub const EIGEN_TOLERANCE: f64 = 1e-8;

const MAX_ITERATIONS: usize = 100_000;

/// Dense square complex matrix, row-major. Callers keep it Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    /// `self += weight * |v><v|`.
    pub fn add_projector(&mut self, v: &[Complex64], weight: f64) {
        debug_assert_eq!(v.len(), self.n);
        for (i, vi) in v.iter().enumerate() {
            if *vi == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = &mut self.data[i * self.n..(i + 1) * self.n];
            let wi = vi * weight;
            for (x, vj) in row.iter_mut().zip(v) {
                *x += wi * vj.conj();
            }
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.data.iter_mut().for_each(|z| *z *= s);
        self
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest `|lambda|` of a Hermitian matrix by power iteration from the
/// normalised all-ones vector.
///
/// The estimate is `||A v||` for the current unit iterate `v`. Iteration stops
/// once the residual `||A^2 v - ||A v||^2 v||` is below `tol * ||A v||^2`, which
/// puts an eigenvalue of `A^2` within that distance of the estimate squared.
/// Working with `A^2` makes `+lambda / -lambda` pairs harmless.
pub fn largest_abs_eigenvalue(matrix: &HermitianMatrix, tol: f64) -> f64 {
    let n = matrix.dim();
    if n == 0 {
        return 0.0;
    }
    let mut v = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut w = matrix.mul_vec(&v);
    let mut estimate = norm(&w);
    for _ in 0..MAX_ITERATIONS {
        if estimate == 0.0 {
            return 0.0;
        }
        let z = matrix.mul_vec(&w);
        let rayleigh = estimate * estimate;
        let residual = norm(&z.iter().zip(&v).map(|(zi, vi)| zi - vi * rayleigh).collect::<Vec<_>>());
        if residual <= tol * rayleigh {
            return estimate;
        }
        v = w.into_iter().map(|x| x / estimate).collect();
        w = z.into_iter().map(|x| x / estimate).collect();
        estimate = norm(&w);
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_orthogonal_projectors() {
        let mut a = HermitianMatrix::zeros(4);
        let e0 = [1.0, 0.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0));
        let e1 = [0.0, 1.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0));
        a.add_projector(&e0, 1.0);
        a.add_projector(&e1, -1.0);
        assert!((largest_abs_eigenvalue(&a, EIGEN_TOLERANCE) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(largest_abs_eigenvalue(&HermitianMatrix::zeros(5), EIGEN_TOLERANCE), 0.0);
    }

    #[test]
    fn negative_dominant_eigenvalue() {
        let mut a = HermitianMatrix::zeros(2);
        a.set(0, 0, Complex64::new(-3.0, 0.0));
        a.set(1, 1, Complex64::new(1.0, 0.0));
        assert!((largest_abs_eigenvalue(&a, 1e-12) - 3.0).abs() < 1e-9);
    }
}

//! Small dense complex matrices and a cyclic Jacobi eigensolver for the
//! Hermitian case. Dimensions here never exceed 4.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Row-major construction.
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_real_rows(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let s = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &CMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise-max distance from the adjoint.
    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Convergence threshold on the off-diagonal Frobenius norm.
pub const JACOBI_TOLERANCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
///
/// Each pivot `(p, q)` is first made real by a diagonal phase change on row
/// and column `q`, then annihilated by a real Givens rotation. The caller
/// is responsible for Hermiticity.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.dim;
    let mut a = m.clone();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOLERANCE * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                for k in 0..n {
                    a[(k, q)] *= phase.conj();
                }
                for k in 0..n {
                    a[(q, k)] *= phase;
                }
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = kp * c - kq * s;
                    a[(k, q)] = kp * s + kq * c;
                }
                for k in 0..n {
                    let (pk, qk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = pk * c - qk * s;
                    a[(q, k)] = pk * s + qk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let m =
            CMatrix::from_real_rows(3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(hermitian_eigenvalues(&m), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let sy = CMatrix::from_rows(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
            .unwrap();
        let e = hermitian_eigenvalues(&sy);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_2x2_closed_form() {
        // [[a, z], [z*, d]] has eigenvalues (a+d)/2 ± sqrt(((a−d)/2)² + |z|²)
        let (a, d, z) = (0.3, -1.2, c(0.4, -0.7));
        let m = CMatrix::from_rows(2, vec![c(a, 0.0), z, z.conj(), c(d, 0.0)]).unwrap();
        let mid = (a + d) / 2.0;
        let rad = (((a - d) / 2.0).powi(2) + z.norm_sqr()).sqrt();
        let e = hermitian_eigenvalues(&m);
        assert!((e[0] - (mid - rad)).abs() < 1e-14);
        assert!((e[1] - (mid + rad)).abs() < 1e-14);
    }

    #[test]
    fn kron_dimensions_and_trace() {
        let a = CMatrix::from_real_rows(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = CMatrix::identity(2).scale(2.0);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 4);
        // tr(A ⊗ B) = tr A · tr B
        assert_eq!(k.trace(), a.trace() * b.trace());
        assert_eq!(k[(2, 2)], c(8.0, 0.0));
        assert_eq!(k[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(CMatrix::from_real_rows(2, &[1.0, 2.0, 3.0]).is_err());
    }
}

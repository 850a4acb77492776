//! Closed-form singlet predictions and the CHSH operator algebra.
//!
//! Spin operators live in the `x`-`z` plane: `Ŝ_a = ½(cos θ_a σ_z + sin θ_a σ_x)`.
//! Two-particle operators are Kronecker products with particle 1 as the
//! left factor.

mod matrix;

pub use matrix::{hermitian_eigenvalues, CMatrix, JACOBI_TOLERANCE};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::PairSource;
use crate::spin::{wrap_delta, Axis, AxisQuad, Outcome, SignChoice, V_MAX};

/// Hermiticity tolerance for [`HermitianOperator`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// `P_ψ(A1, B2)` for the singlet with particle 1 along `a`, particle 2 along `b`.
///
/// Opposite signs: `½cos²(Δθ/2)`. Equal signs: `½sin²(Δθ/2)`.
pub fn singlet_joint_probability(first: Outcome, a: Axis, second: Outcome, b: Axis) -> f64 {
    let half = 0.5 * wrap_delta(a, b);
    if first == second {
        0.5 * half.sin().powi(2)
    } else {
        0.5 * half.cos().powi(2)
    }
}

/// `E(a, b) = −¼ cos(θ_b − θ_a)`.
pub fn singlet_expectation(a: Axis, b: Axis) -> f64 {
    -V_MAX * V_MAX * wrap_delta(a, b).cos()
}

/// Outcome-pair sampler for the singlet state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SingletLaw;

impl SingletLaw {
    pub fn joint_probability(&self, first: Outcome, a: Axis, second: Outcome, b: Axis) -> f64 {
        singlet_joint_probability(first, a, second, b)
    }

    pub fn expectation(&self, a: Axis, b: Axis) -> f64 {
        singlet_expectation(a, b)
    }
}

impl PairSource for SingletLaw {
    fn trial<R: Rng + ?Sized>(&self, rng: &mut R, a: Axis, b: Axis) -> (Outcome, Outcome) {
        let first = if rng.random::<f64>() < 0.5 {
            Outcome::Up
        } else {
            Outcome::Down
        };
        // P(B2 = −A1 | A1) = cos²(Δθ/2)
        let anti = (0.5 * wrap_delta(a, b)).cos().powi(2);
        let second = if rng.random::<f64>() < anti {
            -first
        } else {
            first
        };
        (first, second)
    }
}

/// A complex Hermitian matrix (dimension 2 or 4 in practice).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn try_new(matrix: CMatrix) -> Result<Self> {
        let residual = matrix.hermiticity_residual();
        if residual > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { residual });
        }
        Ok(HermitianOperator { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Spectral norm, the largest eigenvalue modulus.
    pub fn norm(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }
}

/// Spectral norm of a Hermitian matrix; rejects non-Hermitian input.
pub fn operator_norm(matrix: &CMatrix) -> Result<f64> {
    Ok(HermitianOperator::try_new(matrix.clone())?.norm())
}

/// `Ŝ_a = ½(cos θ_a σ_z + sin θ_a σ_x)`, eigenvalues `±1/2`.
pub fn spin_operator(a: Axis) -> HermitianOperator {
    let (s, c) = a.theta().sin_cos();
    let m = CMatrix::from_real_rows(2, &[c, s, s, -c])
        .expect("2x2")
        .scale(V_MAX);
    HermitianOperator { matrix: m }
}

/// `Ŝ1a⊗Ŝ2b ∓ Ŝ1a⊗Ŝ2b′ + Ŝ1a′⊗Ŝ2b ± Ŝ1a′⊗Ŝ2b′`.
pub fn chsh_operator(axes: &AxisQuad, sign: SignChoice) -> HermitianOperator {
    let [sa, sa2, sb, sb2] =
        [axes.a, axes.a_prime, axes.b, axes.b_prime].map(|x| spin_operator(x).matrix);
    let mut m = sa.kron(&sb);
    m = &m + &sa.kron(&sb2).scale(sign.first());
    m = &m + &sa2.kron(&sb);
    m = &m + &sa2.kron(&sb2).scale(sign.second());
    HermitianOperator { matrix: m }
}

/// Largest entrywise deviation of `(CHSH)²` from
/// `4V_max⁴·I ± [Ŝ1a, Ŝ1a′]⊗[Ŝ2b, Ŝ2b′]` over both sign choices.
///
/// The commutator term enters with `+` for [`SignChoice::Minus`] and `−` for
/// [`SignChoice::Plus`].
pub fn verify_operator_identity(axes: &AxisQuad) -> f64 {
    let [sa, sa2, sb, sb2] =
        [axes.a, axes.a_prime, axes.b, axes.b_prime].map(|x| spin_operator(x).matrix);
    let comm = sa.commutator(&sa2).kron(&sb.commutator(&sb2));
    let constant = CMatrix::identity(4).scale(4.0 * V_MAX.powi(4));
    SignChoice::BOTH
        .into_iter()
        .map(|sign| {
            let op = chsh_operator(axes, sign).matrix;
            let squared = &op * &op;
            let expected = &constant + &comm.scale(-sign.first());
            (&squared - &expected).max_abs()
        })
        .fold(0.0, f64::max)
}

/// Expectation `⟨ψ|H|ψ⟩` of a two-particle operator in the singlet state,
/// with the singlet written in the `z` basis as `(|+−⟩ − |−+⟩)/√2`.
pub fn singlet_operator_expectation(op: &HermitianOperator) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, r, -r, 0.0].map(|x| Complex64::new(x, 0.0));
    let m = op.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i].conj() * m[(i, j)] * psi[j];
        }
    }
    acc.re
}

//! Factorizable hidden-variable models and the bounds they obey.
//!
//! A model supplies a sampler for the hidden variable `λ` and per-particle
//! response probabilities `p(A1, λ)`, `p(B2, λ)`. The joint probability of a
//! trial is their product, which is all the CHSH bound needs.

mod wigner;

pub use wigner::{
    quantum_wigner_violation, wigner_inequality_check, wigner_measure, MeasureEstimate,
    MeasureMode, SubsetSpec, WignerCheck,
};

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{self, PairSource, StreamKey};
use crate::spin::{
    wrap_delta, Axis, AxisQuad, ExpectationEstimate, MeanEstimate, Outcome, SignChoice, BELL_BOUND,
    V_MAX,
};

pub use crate::spin::chsh_value;

/// Tolerance for checks evaluated in closed form.
pub const ANALYTIC_TOLERANCE: f64 = 1e-12;

/// Width of Monte Carlo tolerance bands, in standard errors.
pub const MC_SIGMAS: f64 = 5.0;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// The hidden-variable model contract.
pub trait HiddenVariableModel: Sync {
    type Lambda: Copy + Send + Sync;

    fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Lambda;

    /// `p(A1, λ)` for particle 1 measured along `a`.
    fn response1(&self, outcome: Outcome, a: Axis, lambda: &Self::Lambda) -> f64;

    /// `p(B2, λ)` for particle 2 measured along `b`.
    fn response2(&self, outcome: Outcome, b: Axis, lambda: &Self::Lambda) -> f64;

    /// Closed-form `E(a, b)`, when the model has one.
    fn analytic_expectation(&self, _a: Axis, _b: Axis) -> Option<f64> {
        None
    }

    /// Closed-form measure of a subset of `Λ`, when the model has one.
    fn analytic_measure(&self, _spec: &SubsetSpec) -> Option<f64> {
        None
    }

    /// `Ā1(λ) = Σ A1·p(A1, λ)`.
    fn mean_response1(&self, a: Axis, lambda: &Self::Lambda) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&o| o.value() * self.response1(o, a, lambda))
            .sum()
    }

    fn mean_response2(&self, b: Axis, lambda: &Self::Lambda) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&o| o.value() * self.response2(o, b, lambda))
            .sum()
    }
}

/// Sampling `λ`, then each outcome independently from its response.
impl<M: HiddenVariableModel> PairSource for M {
    fn trial<R: Rng + ?Sized>(&self, rng: &mut R, a: Axis, b: Axis) -> (Outcome, Outcome) {
        let lambda = self.sample_lambda(rng);
        let p1 = self.response1(Outcome::Up, a, &lambda);
        let p2 = self.response2(Outcome::Up, b, &lambda);
        let first = if rng.random::<f64>() < p1 {
            Outcome::Up
        } else {
            Outcome::Down
        };
        let second = if rng.random::<f64>() < p2 {
            Outcome::Up
        } else {
            Outcome::Down
        };
        (first, second)
    }
}

/// Monte Carlo estimate of `E_ρ(a, b)` over `n > 0` trials.
pub fn model_expectation<M: HiddenVariableModel>(
    model: &M,
    a: Axis,
    b: Axis,
    n: u64,
    key: StreamKey,
) -> ExpectationEstimate {
    model.expectation(key, a, b, n)
}

/// Deterministic model on the circle: `λ` uniform on `[0, 2π)`, particle 1
/// answers `sign(cos(λ − θ_a))/2`, particle 2 the opposite sign.
///
/// `sign(0)` is taken as `+`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeterministicSignModel;

impl DeterministicSignModel {
    /// Particle-1 outcome along `a` for hidden angle `lambda`.
    pub fn outcome1(a: Axis, lambda: f64) -> Outcome {
        Outcome::from_sign_of((lambda - a.theta()).cos())
    }
}

impl HiddenVariableModel for DeterministicSignModel {
    type Lambda = f64;

    fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        TAU * rng.random::<f64>()
    }

    fn response1(&self, outcome: Outcome, a: Axis, lambda: &f64) -> f64 {
        if Self::outcome1(a, *lambda) == outcome {
            1.0
        } else {
            0.0
        }
    }

    fn response2(&self, outcome: Outcome, b: Axis, lambda: &f64) -> f64 {
        if Self::outcome1(b, *lambda) == -outcome {
            1.0
        } else {
            0.0
        }
    }

    fn analytic_expectation(&self, a: Axis, b: Axis) -> Option<f64> {
        Some(sign_model_expectation_analytic(a, b))
    }

    fn analytic_measure(&self, spec: &SubsetSpec) -> Option<f64> {
        Some(sign_model_measure(spec))
    }
}

/// `E(a, b) = −V_max²(1 − 2|Δθ|/π)` for [`DeterministicSignModel`].
pub fn sign_model_expectation_analytic(a: Axis, b: Axis) -> f64 {
    -V_MAX * V_MAX * (1.0 - 2.0 * wrap_delta(a, b).abs() / PI)
}

/// Exact relative length of an intersection of half-circles.
///
/// The arc endpoints split the circle into segments on which membership is
/// constant; membership is decided at each segment midpoint.
fn sign_model_measure(spec: &SubsetSpec) -> f64 {
    let mut cuts: Vec<f64> = spec
        .clauses()
        .iter()
        .flat_map(|&(axis, _)| {
            [
                axis.rotated(PI / 2.0).theta(),
                axis.rotated(-PI / 2.0).theta(),
            ]
        })
        .collect();
    cuts.push(0.0);
    cuts.push(TAU);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let inside = |lambda: f64| {
        spec.clauses()
            .iter()
            .all(|&(axis, sign)| DeterministicSignModel::outcome1(axis, lambda) == sign)
    };
    let covered: f64 = cuts
        .windows(2)
        .filter(|w| inside(0.5 * (w[0] + w[1])))
        .map(|w| w[1] - w[0])
        .sum();
    covered / TAU
}

/// Stochastic model with the same response on every `λ` for both particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantResponseModel {
    pub p_up: f64,
}

impl ConstantResponseModel {
    pub fn fair() -> Self {
        ConstantResponseModel { p_up: 0.5 }
    }
}

impl HiddenVariableModel for ConstantResponseModel {
    type Lambda = ();

    fn sample_lambda<R: Rng + ?Sized>(&self, _rng: &mut R) {}

    fn response1(&self, outcome: Outcome, _a: Axis, _lambda: &()) -> f64 {
        match outcome {
            Outcome::Up => self.p_up,
            Outcome::Down => 1.0 - self.p_up,
        }
    }

    fn response2(&self, outcome: Outcome, b: Axis, lambda: &()) -> f64 {
        self.response1(outcome, b, lambda)
    }

    fn analytic_expectation(&self, _a: Axis, _b: Axis) -> Option<f64> {
        let m = V_MAX * (2.0 * self.p_up - 1.0);
        Some(m * m)
    }
}

/// Stochastic model on the circle with smooth responses:
/// `p(A1 = +½, λ) = (1 + cos(λ − θ_a))/2`, `p(B2 = +½, λ) = (1 − cos(λ − θ_b))/2`.
///
/// Its correlation is `E(a, b) = −⅛ cos(θ_b − θ_a)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CosineResponseModel;

impl HiddenVariableModel for CosineResponseModel {
    type Lambda = f64;

    fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        TAU * rng.random::<f64>()
    }

    fn response1(&self, outcome: Outcome, a: Axis, lambda: &f64) -> f64 {
        0.5 * (1.0 + outcome.sign() * (lambda - a.theta()).cos())
    }

    fn response2(&self, outcome: Outcome, b: Axis, lambda: &f64) -> f64 {
        0.5 * (1.0 - outcome.sign() * (lambda - b.theta()).cos())
    }

    fn analytic_expectation(&self, a: Axis, b: Axis) -> Option<f64> {
        Some(-0.125 * wrap_delta(a, b).cos())
    }
}

/// Checks that responses are probabilities summing to one, on `samples`
/// draws of `λ` and every axis in `axes`.
pub fn check_contract<M: HiddenVariableModel>(
    model: &M,
    axes: &[Axis],
    samples: u64,
    key: StreamKey,
) -> Result<()> {
    let failures = rng::batched(key, samples, |rng, len| {
        for _ in 0..len {
            let lambda = model.sample_lambda(rng);
            for &axis in axes {
                for (particle, p_up, p_down) in [
                    (
                        1,
                        model.response1(Outcome::Up, axis, &lambda),
                        model.response1(Outcome::Down, axis, &lambda),
                    ),
                    (
                        2,
                        model.response2(Outcome::Up, axis, &lambda),
                        model.response2(Outcome::Down, axis, &lambda),
                    ),
                ] {
                    let in_range = (0.0..=1.0).contains(&p_up) && (0.0..=1.0).contains(&p_down);
                    if !in_range || (p_up + p_down - 1.0).abs() > NORMALIZATION_TOLERANCE {
                        return Some(format!(
                            "particle {particle} at θ={:.6}: p(+)={p_up}, p(−)={p_down}",
                            axis.theta()
                        ));
                    }
                }
            }
        }
        None
    });
    match failures.into_iter().flatten().next() {
        Some(msg) => Err(Error::ContractViolation(msg)),
        None => Ok(()),
    }
}

/// How correlations are obtained for a bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectationMode {
    /// Closed form, compared at [`ANALYTIC_TOLERANCE`].
    Analytic,
    /// `trials` per axis pair, compared at [`MC_SIGMAS`] standard errors.
    MonteCarlo { trials: u64, key: StreamKey },
}

/// Outcome of a CHSH sweep over an axis grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellCheck {
    /// Largest CHSH value seen.
    pub max_value: f64,
    /// Axes and sign at `max_value`.
    pub argmax: (AxisQuad, SignChoice),
    /// Smallest `bound + tolerance − value` over the sweep; negative means a violation.
    pub worst_margin: f64,
    pub checked: usize,
    pub holds: bool,
}

/// Sweeps every `(a, a′, b, b′)` from `grid` and both sign choices, checking
/// `CHSH ≤ 2V_max² + tolerance`.
pub fn check_bell_theorem<M: HiddenVariableModel>(
    model: &M,
    grid: &[Axis],
    mode: ExpectationMode,
) -> Result<BellCheck> {
    assert!(!grid.is_empty(), "axis grid must not be empty");
    let n = grid.len();
    // table[i][j] = (E(grid[i], grid[j]), std error)
    let table: Vec<Vec<(f64, f64)>> = match mode {
        ExpectationMode::Analytic => {
            let mut rows = Vec::with_capacity(n);
            for &a in grid {
                let mut row = Vec::with_capacity(n);
                for &b in grid {
                    let e = model.analytic_expectation(a, b).ok_or_else(|| {
                        Error::Config("model has no closed-form expectation".into())
                    })?;
                    row.push((e, 0.0));
                }
                rows.push(row);
            }
            rows
        }
        ExpectationMode::MonteCarlo { trials, key } => {
            check_contract(model, grid, 1024, key.child(u64::MAX))?;
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let k = key.child((i * n + j) as u64);
                            let est = model_expectation(model, grid[i], grid[j], trials, k);
                            (est.value, est.std_error.unwrap_or(0.0))
                        })
                        .collect()
                })
                .collect()
        }
    };
    let mut best: Option<BellCheck> = None;
    let mut worst_margin = f64::INFINITY;
    let mut checked = 0;
    for ia in 0..n {
        for ia2 in 0..n {
            for ib in 0..n {
                for ib2 in 0..n {
                    let cells = [
                        table[ia][ib],
                        table[ia][ib2],
                        table[ia2][ib],
                        table[ia2][ib2],
                    ];
                    let se = cells.iter().map(|c| c.1 * c.1).sum::<f64>().sqrt();
                    let tol = match mode {
                        ExpectationMode::Analytic => ANALYTIC_TOLERANCE,
                        ExpectationMode::MonteCarlo { .. } => MC_SIGMAS * se,
                    };
                    for sign in SignChoice::BOTH {
                        let v = chsh_value(cells[0].0, cells[1].0, cells[2].0, cells[3].0, sign);
                        checked += 1;
                        worst_margin = worst_margin.min(BELL_BOUND + tol - v);
                        if best.is_none_or(|b| v > b.max_value) {
                            let quad = AxisQuad {
                                a: grid[ia],
                                a_prime: grid[ia2],
                                b: grid[ib],
                                b_prime: grid[ib2],
                            };
                            best = Some(BellCheck {
                                max_value: v,
                                argmax: (quad, sign),
                                worst_margin: 0.0,
                                checked: 0,
                                holds: true,
                            });
                        }
                    }
                }
            }
        }
    }
    let best = best.expect("non-empty grid");
    Ok(BellCheck {
        worst_margin,
        checked,
        holds: worst_margin >= 0.0,
        ..best
    })
}

/// A joint distribution `F(A1, A1′, B2, B2′)` over the sixteen outcome
/// assignments. Cell index bits, most significant first: `A1, A1′, B2, B2′`,
/// with a set bit meaning `−½`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    cells: [f64; 16],
}

impl JointDistribution {
    pub fn try_new(cells: [f64; 16]) -> Result<Self> {
        if let Some((i, &c)) = cells
            .iter()
            .enumerate()
            .find(|(_, &c)| c.is_nan() || c < 0.0)
        {
            return Err(Error::InvalidDistribution(format!("cell {i} is {c}")));
        }
        let total: f64 = cells.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("cells sum to {total}")));
        }
        Ok(JointDistribution { cells })
    }

    /// Point mass on one deterministic assignment.
    pub fn vertex(index: usize) -> Self {
        let mut cells = [0.0; 16];
        cells[index] = 1.0;
        JointDistribution { cells }
    }

    pub fn uniform() -> Self {
        JointDistribution {
            cells: [1.0 / 16.0; 16],
        }
    }

    pub fn cells(&self) -> &[f64; 16] {
        &self.cells
    }

    /// The four outcomes of cell `index` as `[A1, A1′, B2, B2′]`.
    pub fn assignment(index: usize) -> [Outcome; 4] {
        [3, 2, 1, 0].map(|bit| {
            if index >> bit & 1 == 0 {
                Outcome::Up
            } else {
                Outcome::Down
            }
        })
    }

    /// Marginal correlations `[E(a,b), E(a,b′), E(a′,b), E(a′,b′)]`.
    pub fn expectations(&self) -> [f64; 4] {
        let mut e = [0.0; 4];
        for (i, &f) in self.cells.iter().enumerate() {
            let [a, a2, b, b2] = Self::assignment(i).map(Outcome::value);
            e[0] += a * b * f;
            e[1] += a * b2 * f;
            e[2] += a2 * b * f;
            e[3] += a2 * b2 * f;
        }
        e
    }
}

/// CHSH combination of the marginal correlations of a joint distribution.
pub fn joint_distribution_chsh(dist: &JointDistribution, sign: SignChoice) -> f64 {
    let [e0, e1, e2, e3] = dist.expectations();
    chsh_value(e0, e1, e2, e3, sign)
}

/// Monte Carlo estimate of
/// `E_λ[p(A1=+½,λ)(1 − p(A2=−½,λ)) + p(A1=−½,λ)(1 − p(A2=+½,λ))]`
/// with both particles measured along `a`. Zero exactly when the model can
/// reproduce perfect same-axis anticorrelation.
pub fn stochastic_defect<M: HiddenVariableModel>(
    model: &M,
    a: Axis,
    n: u64,
    key: StreamKey,
) -> MeanEstimate {
    rng::mean_of(key, n, |rng| {
        let lambda = model.sample_lambda(rng);
        let up1 = model.response1(Outcome::Up, a, &lambda);
        let down1 = model.response1(Outcome::Down, a, &lambda);
        let up2 = model.response2(Outcome::Up, a, &lambda);
        let down2 = model.response2(Outcome::Down, a, &lambda);
        up1 * (1.0 - down2) + down1 * (1.0 - up2)
    })
    .estimate()
    .expect("n > 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::quantum::singlet_expectation;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn ax(t: f64) -> Axis {
        Axis::from_radians(t)
    }

    fn key(seed: u64) -> StreamKey {
        StreamKey::new(seed)
    }

    struct Broken;

    impl HiddenVariableModel for Broken {
        type Lambda = ();
        fn sample_lambda<R: Rng + ?Sized>(&self, _rng: &mut R) {}
        fn response1(&self, _o: Outcome, _a: Axis, _l: &()) -> f64 {
            0.7
        }
        fn response2(&self, _o: Outcome, _b: Axis, _l: &()) -> f64 {
            0.5
        }
    }

    #[test]
    fn sign_model_equal_axes_exact() {
        let est = model_expectation(&DeterministicSignModel, ax(0.3), ax(0.3), 100_000, key(1));
        assert_eq!(est.value, -0.25);
        assert_eq!(est.std_error, Some(0.0));
    }

    #[test]
    fn sign_model_mc_matches_analytic() {
        for (delta, target) in [(FRAC_PI_2, 0.0), (FRAC_PI_4, -0.125)] {
            let est = model_expectation(
                &DeterministicSignModel,
                Axis::Z,
                ax(delta),
                1_000_000,
                key(2),
            );
            assert!(est.within(target, MC_SIGMAS), "{est:?} vs {target}");
        }
    }

    #[test]
    fn sign_model_analytic_examples() {
        assert_eq!(sign_model_expectation_analytic(Axis::Z, Axis::Z), -0.25);
        assert_eq!(sign_model_expectation_analytic(Axis::Z, ax(PI)), 0.25);
        assert_eq!(sign_model_expectation_analytic(Axis::Z, ax(FRAC_PI_2)), 0.0);
    }

    #[test]
    fn sign_model_analytic_matches_quadrature() {
        // frozen from oracle::sign_model_expectation_quadrature
        for (delta, frozen) in [
            (FRAC_PI_2, 0.0),
            (FRAC_PI_4, -0.125),
            (2.0, -0.25 * (1.0 - 4.0 / PI)),
        ] {
            let q = oracle::sign_model_expectation_quadrature(delta, 1 << 20);
            assert!((q - frozen).abs() < 1e-5);
            assert!((sign_model_expectation_analytic(Axis::Z, ax(delta)) - frozen).abs() < 1e-15);
        }
    }

    #[test]
    fn chsh_value_examples() {
        assert_eq!(
            chsh_value(-0.25, -0.25, -0.25, -0.25, SignChoice::Minus),
            0.5
        );
        let quad = AxisQuad::tsirelson_optimal();
        let singlet = quad.pairs().map(|(a, b)| singlet_expectation(a, b));
        let v = chsh_value(
            singlet[0],
            singlet[1],
            singlet[2],
            singlet[3],
            SignChoice::Minus,
        );
        assert!((v - SQRT_2 / 2.0).abs() < 1e-15);
        let sign = quad
            .pairs()
            .map(|(a, b)| sign_model_expectation_analytic(a, b));
        let v = chsh_value(sign[0], sign[1], sign[2], sign[3], SignChoice::Minus);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bell_theorem_sign_model_mc() {
        let grid: Vec<Axis> = (0..8).map(|k| ax(k as f64 * PI / 4.0)).collect();
        let check = check_bell_theorem(
            &DeterministicSignModel,
            &grid,
            ExpectationMode::MonteCarlo {
                trials: 100_000,
                key: key(3),
            },
        )
        .unwrap();
        assert!(check.holds, "{check:?}");
        assert_eq!(check.checked, 2 * 8usize.pow(4));
    }

    #[test]
    fn bell_theorem_degenerate_grid() {
        let grid = [ax(0.4)];
        let check = check_bell_theorem(
            &DeterministicSignModel,
            &grid,
            ExpectationMode::MonteCarlo {
                trials: 10_000,
                key: key(4),
            },
        )
        .unwrap();
        assert!(check.max_value <= 0.5);
        assert!(check.holds);
    }

    #[test]
    fn bell_theorem_constant_model() {
        let grid: Vec<Axis> = (0..4).map(|k| ax(k as f64)).collect();
        let check = check_bell_theorem(
            &ConstantResponseModel::fair(),
            &grid,
            ExpectationMode::Analytic,
        )
        .unwrap();
        assert_eq!(check.max_value, 0.0);
        let check = check_bell_theorem(
            &CosineResponseModel,
            &grid,
            ExpectationMode::MonteCarlo {
                trials: 50_000,
                key: key(5),
            },
        )
        .unwrap();
        assert!(check.holds);
    }

    #[test]
    fn contract_violation_reported() {
        let err = check_bell_theorem(
            &Broken,
            &[Axis::Z],
            ExpectationMode::MonteCarlo {
                trials: 10,
                key: key(6),
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
        assert!(check_contract(&DeterministicSignModel, &[Axis::Z, ax(1.0)], 1000, key(7)).is_ok());
        assert!(check_contract(&CosineResponseModel, &[Axis::Z, ax(1.0)], 1000, key(7)).is_ok());
    }

    #[test]
    fn cosine_model_expectation() {
        let est = model_expectation(&CosineResponseModel, Axis::Z, ax(0.5), 1_000_000, key(8));
        assert!(est.within(-0.125 * 0.5f64.cos(), MC_SIGMAS));
    }

    #[test]
    fn joint_distribution_examples() {
        // A1=+, A1′=+, B2=−, B2′=−
        let point = JointDistribution::vertex(0b0011);
        assert_eq!(point.expectations(), [-0.25, -0.25, -0.25, -0.25]);
        for sign in SignChoice::BOTH {
            assert!(joint_distribution_chsh(&point, sign) <= 0.5);
            assert_eq!(
                joint_distribution_chsh(&JointDistribution::uniform(), sign),
                0.0
            );
        }
    }

    #[test]
    fn all_vertices_saturate_at_most_the_bound() {
        let mut max: f64 = 0.0;
        for i in 0..16 {
            for sign in SignChoice::BOTH {
                let v = joint_distribution_chsh(&JointDistribution::vertex(i), sign);
                assert!(v <= 0.5);
                max = max.max(v);
            }
        }
        assert_eq!(max, 0.5);
    }

    #[test]
    fn invalid_joint_distributions_rejected() {
        let mut cells = [0.0; 16];
        cells[0] = 0.9;
        assert!(JointDistribution::try_new(cells).is_err());
        cells[1] = 0.2;
        cells[2] = -0.1;
        assert!(JointDistribution::try_new(cells).is_err());
        cells[2] = f64::NAN;
        assert!(JointDistribution::try_new(cells).is_err());
    }

    #[test]
    fn stochastic_defect_examples() {
        let d = stochastic_defect(&DeterministicSignModel, ax(0.9), 100_000, key(9));
        assert_eq!(d.mean, 0.0);
        let d = stochastic_defect(&ConstantResponseModel::fair(), ax(0.9), 1000, key(9));
        assert_eq!(d.mean, 0.5);
        // smooth responses: (1 − cos²)/2 averages to 1/4
        let d = stochastic_defect(&CosineResponseModel, ax(0.9), 1_000_000, key(10));
        assert!((d.mean - 0.25).abs() < MC_SIGMAS * d.std_error.unwrap());
    }
}

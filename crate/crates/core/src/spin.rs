//! Geometry, outcome and counting primitives shared by every model.
//!
//! Axes are coplanar: a single angle measured from a fixed `z` reference in
//! the `x`-`z` plane. Outcomes are spin-1/2 projections `±1/2`, kept as an
//! enum so counting stays exact; products become floating point only when
//! counts are aggregated into an [`ExpectationEstimate`].

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Largest outcome magnitude for a spin-1/2 projection.
pub const V_MAX: f64 = 0.5;

/// Bound on the CHSH combination for factorizable models, `2 V_max²`.
pub const BELL_BOUND: f64 = 2.0 * V_MAX * V_MAX;

/// Quantum bound on the CHSH combination, `2√2 V_max²`.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2 * V_MAX * V_MAX;

/// A coplanar measurement direction.
///
/// The stored angle is the canonical representative in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Axis {
    theta: f64,
}

impl Axis {
    /// The `z` reference direction.
    pub const Z: Axis = Axis { theta: 0.0 };

    /// Builds an axis from an angle in radians.
    ///
    /// Panics if `theta` is not finite; use [`Axis::try_from_radians`] for
    /// untrusted input.
    pub fn from_radians(theta: f64) -> Self {
        Self::try_from_radians(theta).expect("axis angle must be finite")
    }

    pub fn try_from_radians(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFiniteAngle(theta));
        }
        let mut canonical = theta.rem_euclid(TAU);
        // rem_euclid rounds tiny negative angles up to exactly 2π
        if canonical >= TAU {
            canonical = 0.0;
        }
        Ok(Axis { theta: canonical })
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    /// The axis rotated by `delta` radians.
    pub fn rotated(self, delta: f64) -> Self {
        Self::from_radians(self.theta + delta)
    }

    /// The antipodal direction.
    pub fn opposite(self) -> Self {
        self.rotated(PI)
    }

    /// Unit vector `(sin θ, 0, cos θ)`.
    pub fn unit_vector(self) -> Vec3 {
        Vec3::new(self.theta.sin(), 0.0, self.theta.cos())
    }
}

impl TryFrom<f64> for Axis {
    type Error = Error;

    fn try_from(theta: f64) -> Result<Self> {
        Axis::try_from_radians(theta)
    }
}

impl From<Axis> for f64 {
    fn from(axis: Axis) -> f64 {
        axis.theta
    }
}

/// `θ_b − θ_a` wrapped to `(−π, π]`.
pub fn wrap_delta(a: Axis, b: Axis) -> f64 {
    let mut d = b.theta - a.theta;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

/// A spin-projection outcome, exactly `+1/2` or `−1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Up,
    #[serde(rename = "-")]
    Down,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Up, Outcome::Down];

    pub fn value(self) -> f64 {
        match self {
            Outcome::Up => V_MAX,
            Outcome::Down => -V_MAX,
        }
    }

    /// `+1` or `−1`.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Up => 1.0,
            Outcome::Down => -1.0,
        }
    }

    /// Outcome whose sign matches `x`; zero maps to [`Outcome::Up`].
    pub fn from_sign_of(x: f64) -> Self {
        if x >= 0.0 {
            Outcome::Up
        } else {
            Outcome::Down
        }
    }
}

impl Neg for Outcome {
    type Output = Outcome;

    fn neg(self) -> Outcome {
        match self {
            Outcome::Up => Outcome::Down,
            Outcome::Down => Outcome::Up,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Up => f.write_str("+1/2"),
            Outcome::Down => f.write_str("-1/2"),
        }
    }
}

/// Trial counts for the four outcome pairs `(A1, B2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl PairCounts {
    pub fn new(n_pp: u64, n_pm: u64, n_mp: u64, n_mm: u64) -> Self {
        PairCounts {
            n_pp,
            n_pm,
            n_mp,
            n_mm,
        }
    }

    pub fn record(&mut self, first: Outcome, second: Outcome) {
        *self.get_mut(first, second) += 1;
    }

    pub fn get(&self, first: Outcome, second: Outcome) -> u64 {
        match (first, second) {
            (Outcome::Up, Outcome::Up) => self.n_pp,
            (Outcome::Up, Outcome::Down) => self.n_pm,
            (Outcome::Down, Outcome::Up) => self.n_mp,
            (Outcome::Down, Outcome::Down) => self.n_mm,
        }
    }

    fn get_mut(&mut self, first: Outcome, second: Outcome) -> &mut u64 {
        match (first, second) {
            (Outcome::Up, Outcome::Up) => &mut self.n_pp,
            (Outcome::Up, Outcome::Down) => &mut self.n_pm,
            (Outcome::Down, Outcome::Up) => &mut self.n_mp,
            (Outcome::Down, Outcome::Down) => &mut self.n_mm,
        }
    }

    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    /// Trials with equal outcomes on both sides.
    pub fn same(&self) -> u64 {
        self.n_pp + self.n_mm
    }

    /// Observed frequency `F(A1, B2)`; `None` when there are no trials.
    pub fn frequency(&self, first: Outcome, second: Outcome) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.get(first, second) as f64 / total as f64)
    }

    /// Count of `first` as particle-1 outcome, summed over particle 2.
    pub fn marginal_first(&self, first: Outcome) -> u64 {
        self.get(first, Outcome::Up) + self.get(first, Outcome::Down)
    }

    pub fn marginal_second(&self, second: Outcome) -> u64 {
        self.get(Outcome::Up, second) + self.get(Outcome::Down, second)
    }

    /// Counts with every outcome label flipped on both particles.
    pub fn flipped(&self) -> Self {
        PairCounts::new(self.n_mm, self.n_mp, self.n_pm, self.n_pp)
    }

    /// Iterates `(A1, B2, count)` in the order `++, +-, -+, --`.
    pub fn cells(&self) -> impl Iterator<Item = (Outcome, Outcome, u64)> + '_ {
        Outcome::BOTH.into_iter().flat_map(move |first| {
            Outcome::BOTH
                .into_iter()
                .map(move |second| (first, second, self.get(first, second)))
        })
    }
}

impl Add for PairCounts {
    type Output = PairCounts;

    fn add(self, rhs: PairCounts) -> PairCounts {
        PairCounts::new(
            self.n_pp + rhs.n_pp,
            self.n_pm + rhs.n_pm,
            self.n_mp + rhs.n_mp,
            self.n_mm + rhs.n_mm,
        )
    }
}

impl AddAssign for PairCounts {
    fn add_assign(&mut self, rhs: PairCounts) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for PairCounts {
    fn sum<I: Iterator<Item = PairCounts>>(iter: I) -> PairCounts {
        iter.fold(PairCounts::default(), Add::add)
    }
}

/// An estimated correlation `E(a, b)` with its standard error.
///
/// `std_error` is `None` when it cannot be estimated (a single trial).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    pub value: f64,
    pub std_error: Option<f64>,
    pub n: u64,
}

impl ExpectationEstimate {
    /// Whether `target` lies within `k` standard errors of the estimate.
    ///
    /// A zero standard error demands exact agreement.
    pub fn within(&self, target: f64, k: f64) -> bool {
        let se = self.std_error.unwrap_or(f64::INFINITY);
        (self.value - target).abs() <= k * se
    }
}

/// `E(a, b) = Σ A1·B2·F(A1, B2)` from observed counts.
///
/// The standard error is the sample standard deviation of the per-trial
/// product `A1·B2 = ±1/4` divided by `√n`.
pub fn empirical_expectation(counts: &PairCounts) -> Result<ExpectationEstimate> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::EmptyCounts);
    }
    let same = counts.same() as i128;
    let diff = 2 * same - n as i128;
    let nf = n as f64;
    let value = diff as f64 / (4.0 * nf);
    let std_error = (n > 1).then(|| {
        let var = (V_MAX.powi(4) - value * value).max(0.0) / (nf - 1.0);
        var.sqrt()
    });
    Ok(ExpectationEstimate {
        value,
        std_error,
        n,
    })
}

/// Sample mean of a real statistic with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: Option<f64>,
    pub n: u64,
}

/// Running sums for a [`MeanEstimate`]; merged in a fixed order by callers
/// that need bit-identical results.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, other: MeanAccumulator) -> MeanAccumulator {
        MeanAccumulator {
            n: self.n + other.n,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn estimate(&self) -> Option<MeanEstimate> {
        if self.n == 0 {
            return None;
        }
        let nf = self.n as f64;
        let mean = self.sum / nf;
        let std_error = (self.n > 1).then(|| {
            let ss = (self.sum_sq - nf * mean * mean).max(0.0);
            (ss / (nf - 1.0) / nf).sqrt()
        });
        Some(MeanEstimate {
            mean,
            std_error,
            n: self.n,
        })
    }
}

/// Which of the two CHSH combinations to form.
///
/// `Minus` is `|E(a,b) − E(a,b′)| + |E(a′,b) + E(a′,b′)|`, `Plus` the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignChoice {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl SignChoice {
    pub const BOTH: [SignChoice; 2] = [SignChoice::Minus, SignChoice::Plus];

    /// Sign applied to the `(a, b′)` term; the `(a′, b′)` term takes the opposite.
    pub fn first(self) -> f64 {
        match self {
            SignChoice::Minus => -1.0,
            SignChoice::Plus => 1.0,
        }
    }

    pub fn second(self) -> f64 {
        -self.first()
    }
}

impl fmt::Display for SignChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignChoice::Minus => f.write_str("-"),
            SignChoice::Plus => f.write_str("+"),
        }
    }
}

impl std::str::FromStr for SignChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-" | "minus" => Ok(SignChoice::Minus),
            "+" | "plus" => Ok(SignChoice::Plus),
            other => Err(Error::Config(format!("unknown sign choice {other:?}"))),
        }
    }
}

/// Two axes per party: `a, a′` for particle 1 and `b, b′` for particle 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisQuad {
    pub a: Axis,
    pub a_prime: Axis,
    pub b: Axis,
    pub b_prime: Axis,
}

impl AxisQuad {
    pub fn from_radians(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        AxisQuad {
            a: Axis::from_radians(a),
            a_prime: Axis::from_radians(a_prime),
            b: Axis::from_radians(b),
            b_prime: Axis::from_radians(b_prime),
        }
    }

    /// `θ_a = 0, θ_a′ = π/2, θ_b = π/4, θ_b′ = 3π/4`, where the singlet
    /// reaches the Tsirelson bound.
    pub fn tsirelson_optimal() -> Self {
        Self::from_radians(0.0, PI / 2.0, PI / 4.0, 3.0 * PI / 4.0)
    }

    /// The four measured pairs in the order `(a,b), (a,b′), (a′,b), (a′,b′)`.
    pub fn pairs(&self) -> [(Axis, Axis); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }

    pub fn rotated(&self, delta: f64) -> Self {
        AxisQuad {
            a: self.a.rotated(delta),
            a_prime: self.a_prime.rotated(delta),
            b: self.b.rotated(delta),
            b_prime: self.b_prime.rotated(delta),
        }
    }
}

/// Labels for the pairs returned by [`AxisQuad::pairs`].
pub const PAIR_LABELS: [&str; 4] = ["ab", "ab'", "a'b", "a'b'"];

/// `|E(a,b) ∓ E(a,b′)| + |E(a′,b) ± E(a′,b′)|`.
pub fn chsh_value(
    e_ab: f64,
    e_ab_prime: f64,
    e_a_prime_b: f64,
    e_a_prime_b_prime: f64,
    sign: SignChoice,
) -> f64 {
    (e_ab + sign.first() * e_ab_prime).abs()
        + (e_a_prime_b + sign.second() * e_a_prime_b_prime).abs()
}

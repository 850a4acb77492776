//! Fields on spheres with embedded particles.
//!
//! A spin is a unit sphere carrying a scalar field on one hemisphere, the
//! field value being the projection of the point on the hemisphere axis, and
//! a point particle sitting somewhere inside the field. A measurement along
//! `b` rotates the field toward `±b`; the probability of each outcome is the
//! squared average of the rotated field over the hemisphere half-way between
//! the initial field axis and `±b`.
//!
//! Sign convention: the hemisphere `Σ_{−u}` is centred on the direction at
//! angle `θ_u − π`. Half-angle formulas depend on which representative of
//! `−u` is used; with this one the decomposition
//! `F_{Σ+a} ~ cos((θ_u−θ_a)/2) F_{Σ+u} + sin((θ_u−θ_a)/2) F_{Σ−u}` preserves
//! every measurement average exactly.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_hemisphere, sample_sphere, Vec3};
use crate::oracle::gauss_legendre;
use crate::rng::PairSource;
use crate::spin::{wrap_delta, Axis, Outcome};

/// Tolerance for [`predictions_equal`].
pub const PREDICTION_TOLERANCE: f64 = 1e-10;

/// `Σ_{±a}`; the boundary circle `r·a = 0` belongs to `Σ_{+a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hemisphere {
    pub axis: Axis,
    pub sign: Outcome,
}

impl Hemisphere {
    pub fn new(axis: Axis, sign: Outcome) -> Self {
        Hemisphere { axis, sign }
    }

    pub fn plus(axis: Axis) -> Self {
        Self::new(axis, Outcome::Up)
    }

    pub fn minus(axis: Axis) -> Self {
        Self::new(axis, Outcome::Down)
    }

    /// Angle of the hemisphere's centre direction: `θ` or `θ − π`.
    pub fn signed_angle(&self) -> f64 {
        match self.sign {
            Outcome::Up => self.axis.theta(),
            Outcome::Down => self.axis.theta() - PI,
        }
    }

    pub fn centre(&self) -> Vec3 {
        self.axis.unit_vector() * self.sign.sign()
    }

    pub fn contains(&self, r: Vec3) -> bool {
        Outcome::from_sign_of(r.dot(self.axis.unit_vector())) == self.sign
    }

    pub fn opposite(&self) -> Self {
        Self::new(self.axis, -self.sign)
    }
}

/// `F_{Σ±a}(r) = r·a/π` on the hemisphere, `0` elsewhere (`R = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HemiField {
    pub support: Hemisphere,
}

impl HemiField {
    pub fn new(support: Hemisphere) -> Self {
        HemiField { support }
    }
}

pub fn field_value(field: &HemiField, r: Vec3) -> f64 {
    if field.support.contains(r) {
        r.dot(field.support.axis.unit_vector()) / PI
    } else {
        0.0
    }
}

/// `∫_{Σ_h} (r·f)/π dΩ = cos(θ_f − θ_h)`: the average of the full field
/// `F_{Σ+f} + F_{Σ−f}` over the hemisphere `h`.
pub fn hemi_average(field_axis: Axis, hemisphere: Hemisphere) -> f64 {
    (field_axis.theta() - hemisphere.signed_angle()).cos()
}

/// The same average by tensor quadrature over `Σ_h`, evaluating the two
/// hemifields pointwise.
pub fn hemi_average_quadrature(field_axis: Axis, hemisphere: Hemisphere, nodes: usize) -> f64 {
    let full = FieldSuperposition::new()
        .with(1.0, HemiField::new(Hemisphere::plus(field_axis)))
        .with(1.0, HemiField::new(Hemisphere::minus(field_axis)));
    let h = hemisphere.centre();
    // coplanar frame: h, its in-plane normal, and y
    let t = Vec3::new(h.z, 0.0, -h.x);
    let y = Vec3::new(0.0, 1.0, 0.0);
    let azimuths = 2 * nodes;
    let dphi = TAU / azimuths as f64;
    let mut total = 0.0;
    for (x, w) in gauss_legendre(nodes) {
        let u = 0.5 * (x + 1.0);
        let s = (1.0 - u * u).sqrt();
        for j in 0..azimuths {
            let phi = dphi * j as f64;
            let r = h * u + (t * phi.cos() + y * phi.sin()) * s;
            total += 0.5 * w * dphi * full.evaluate(r);
        }
    }
    total
}

/// Direction half-way between two signed angles.
fn half_rotated(from: f64, to: f64) -> Hemisphere {
    Hemisphere::plus(Axis::from_radians(0.5 * (from + to)))
}

/// Averages of the field rotated toward `±b` over the half-rotated
/// hemispheres `Σ_{[h+b]}` and `Σ_{[h−b]}`: `(cos((θ_b−θ_h)/2), −sin((θ_b−θ_h)/2))`.
pub fn measurement_amplitudes(initial: Hemisphere, b: Axis) -> (f64, f64) {
    let h = initial.signed_angle();
    let plus = Hemisphere::plus(b);
    let minus = Hemisphere::minus(b);
    (
        hemi_average(b, half_rotated(h, plus.signed_angle())),
        hemi_average(b, half_rotated(h, minus.signed_angle())),
    )
}

/// `(P(B = +½), P(B = −½))` for a sphere whose field is on `initial`:
/// `cos²((θ_b−θ_h)/2)` and `sin²((θ_b−θ_h)/2)`.
pub fn measure_prob_single(initial: Hemisphere, b: Axis) -> (f64, f64) {
    let delta = wrap_delta(initial.axis, b);
    if delta == 0.0 || delta == PI {
        let aligned = (delta == 0.0) == (initial.sign == Outcome::Up);
        return if aligned { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let (up, down) = measurement_amplitudes(initial, b);
    let (up, down) = (up * up, down * down);
    let norm = up + down;
    (up / norm, down / norm)
}

/// A linear combination of hemifields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldSuperposition {
    terms: Vec<(f64, HemiField)>,
}

impl FieldSuperposition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(field: HemiField) -> Self {
        Self::new().with(1.0, field)
    }

    pub fn with(mut self, coefficient: f64, field: HemiField) -> Self {
        self.terms.push((coefficient, field));
        self
    }

    pub fn terms(&self) -> &[(f64, HemiField)] {
        &self.terms
    }

    pub fn evaluate(&self, r: Vec3) -> f64 {
        self.terms.iter().map(|(c, f)| c * field_value(f, r)).sum()
    }

    /// Measurement averages along `b`, linear in the terms.
    pub fn amplitudes(&self, b: Axis) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(up, down), (c, f)| {
            let (u, d) = measurement_amplitudes(f.support, b);
            (up + c * u, down + c * d)
        })
    }

    /// Rewrites every term on the pair `Σ_{±u}` and merges the result.
    pub fn decompose_onto(&self, u: Axis) -> FieldSuperposition {
        let (mut plus, mut minus) = (0.0, 0.0);
        for (c, f) in &self.terms {
            let (cp, cm) = decompose_hemisphere(f.support, u);
            plus += c * cp;
            minus += c * cm;
        }
        FieldSuperposition::new()
            .with(plus, HemiField::new(Hemisphere::plus(u)))
            .with(minus, HemiField::new(Hemisphere::minus(u)))
    }
}

fn decompose_hemisphere(h: Hemisphere, u: Axis) -> (f64, f64) {
    let half = 0.5 * (u.theta() - h.signed_angle());
    (half.cos(), half.sin())
}

/// Coefficients `(cos((θ_u−θ_a)/2), sin((θ_u−θ_a)/2))` with
/// `F_{Σ+a} ~ c₊ F_{Σ+u} + c₋ F_{Σ−u}`.
pub fn equivalence_decompose(a: Axis, u: Axis) -> (f64, f64) {
    decompose_hemisphere(Hemisphere::plus(a), u)
}

/// Whether two field configurations give the same measurement averages along
/// every axis of `grid`, up to an overall sign (which no probability sees).
pub fn predictions_equal(
    lhs: &FieldSuperposition,
    rhs: &FieldSuperposition,
    grid: &[Axis],
) -> bool {
    let close = |flip: f64| {
        grid.iter().all(|&b| {
            let (lu, ld) = lhs.amplitudes(b);
            let (ru, rd) = rhs.amplitudes(b);
            (lu - flip * ru).abs() <= PREDICTION_TOLERANCE
                && (ld - flip * rd).abs() <= PREDICTION_TOLERANCE
        })
    };
    close(1.0) || close(-1.0)
}

/// The field `cos φ F_{Σ+u} + sin φ F_{Σ−u}` equivalent to `F_{Σ+a}`, with
/// its particle distribution: the particle sits in `Σ_{±u}` with the squared
/// weight of that term, uniformly within it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsField {
    pub a: Axis,
    pub u: Axis,
}

impl RhsField {
    pub fn new(a: Axis, u: Axis) -> Self {
        RhsField { a, u }
    }

    pub fn superposition(&self) -> FieldSuperposition {
        FieldSuperposition::single(HemiField::new(Hemisphere::plus(self.a))).decompose_onto(self.u)
    }

    pub fn sample_particle<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        let p_plus = rhs_particle_prob(self.u, self.a, Outcome::Up);
        let side = if rng.random::<f64>() < p_plus {
            Outcome::Up
        } else {
            Outcome::Down
        };
        sample_hemisphere(rng, Hemisphere::new(self.u, side).centre())
    }

    /// `p_{F_rhs}(U, r)`: 1 when the particle sits in `Σ_{U·u}`, else 0.
    pub fn pointwise_prob(&self, outcome: Outcome, r: Vec3) -> f64 {
        if Hemisphere::new(self.u, outcome).contains(r) {
            1.0
        } else {
            0.0
        }
    }

    /// One measurement along `b`: the particle position before the
    /// measurement and the outcome. Along `u` the particle decides; along
    /// any other axis the outcome follows the field alone.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R, b: Axis) -> (Vec3, Outcome) {
        let r = self.sample_particle(rng);
        if wrap_delta(self.u, b) == 0.0 {
            let outcome = if self.pointwise_prob(Outcome::Up, r) == 1.0 {
                Outcome::Up
            } else {
                Outcome::Down
            };
            return (r, outcome);
        }
        let (p_up, _) = measure_prob_single(Hemisphere::plus(self.a), b);
        let outcome = if rng.random::<f64>() < p_up {
            Outcome::Up
        } else {
            Outcome::Down
        };
        (r, outcome)
    }
}

/// `P_{F_rhs}(U = ±½)`: `cos²((θ_u−θ_a)/2)` for `+`, `sin²((θ_u−θ_a)/2)` for `−`.
pub fn rhs_particle_prob(u: Axis, a: Axis, sign: Outcome) -> f64 {
    let (cp, cm) = equivalence_decompose(a, u);
    match sign {
        Outcome::Up => cp * cp,
        Outcome::Down => cm * cm,
    }
}

/// A single sphere followed through successive measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleSphere {
    pub field: Hemisphere,
    pub particle: Vec3,
}

impl SingleSphere {
    /// Field on `field`, particle uniform inside it.
    pub fn prepare<R: Rng + ?Sized>(rng: &mut R, field: Hemisphere) -> Self {
        SingleSphere {
            field,
            particle: sample_hemisphere(rng, field.centre()),
        }
    }

    /// Measures along `b`. When `b` is the field axis the particle's
    /// hemisphere is the outcome; otherwise the outcome is drawn from the
    /// rotated-field probabilities. Either way the field ends on `Σ_{±b}` and
    /// the particle is redrawn uniformly inside it.
    pub fn measure<R: Rng + ?Sized>(&mut self, rng: &mut R, b: Axis) -> Outcome {
        let delta = wrap_delta(self.field.axis, b);
        let outcome = if delta == 0.0 || delta == PI {
            Outcome::from_sign_of(self.particle.dot(b.unit_vector()))
        } else {
            let (p_up, _) = measure_prob_single(self.field, b);
            if rng.random::<f64>() < p_up {
                Outcome::Up
            } else {
                Outcome::Down
            }
        };
        self.field = Hemisphere::new(b, outcome);
        self.particle = sample_hemisphere(rng, self.field.centre());
        outcome
    }
}

/// `F_ℵ(a) = F¹_{Σ+a}F²_{Σ−a} − F¹_{Σ−a}F²_{Σ+a}`, labelled by `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPartyField {
    pub label_axis: Axis,
}

impl TwoPartyField {
    pub fn new(label_axis: Axis) -> Self {
        TwoPartyField { label_axis }
    }

    /// Pointwise value on the two spheres.
    pub fn value(&self, r1: Vec3, r2: Vec3) -> f64 {
        let plus = HemiField::new(Hemisphere::plus(self.label_axis));
        let minus = HemiField::new(Hemisphere::minus(self.label_axis));
        field_value(&plus, r1) * field_value(&minus, r2)
            - field_value(&minus, r1) * field_value(&plus, r2)
    }
}

/// Normalization of the two-outcome probabilities.
const TWO_PARTY_NORM: f64 = 2.0;

/// `P_ℵ(C1, B2)` for particle 1 measured along `c` and particle 2 along `b`:
/// `½|⟨F¹_{[a+C·c]}⟩⟨F²_{[−a+B·b]}⟩ − ⟨F¹_{[−a+C·c]}⟩⟨F²_{[a+B·b]}⟩|²`,
/// each factor the average of the field rotated toward the outcome direction
/// over the half-rotated hemisphere.
pub fn two_party_prob(
    field: &TwoPartyField,
    c: Axis,
    b: Axis,
    first: Outcome,
    second: Outcome,
) -> f64 {
    let plus_a = Hemisphere::plus(field.label_axis).signed_angle();
    let minus_a = Hemisphere::minus(field.label_axis).signed_angle();
    let toward = |from: f64, target: Hemisphere| {
        hemi_average(target.axis, half_rotated(from, target.signed_angle())) * target.sign.sign()
    };
    let hc = Hemisphere::new(c, first);
    let hb = Hemisphere::new(b, second);
    let amp = toward(plus_a, hc) * toward(minus_a, hb) - toward(minus_a, hc) * toward(plus_a, hb);
    amp * amp / TWO_PARTY_NORM
}

/// `P(B2 | A1)` when `field` is written in the representative labelled by
/// the first measurement axis `a`: the first measurement does not perturb
/// sphere 1, so sphere 2 is known to sit in `Σ_{−A1·a}` and the answer is a
/// single-sphere probability. Returns `(P(B2=+½|A1), P(B2=−½|A1))`.
pub fn conditional_inference(
    field: &TwoPartyField,
    a: Axis,
    first: Outcome,
    b: Axis,
) -> Result<(f64, f64)> {
    if wrap_delta(field.label_axis, a) != 0.0 {
        return Err(Error::InferenceUndefined);
    }
    Ok(measure_prob_single(Hemisphere::new(a, -first), b))
}

/// The two-sphere experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FieldModel;

impl FieldModel {
    /// One trial: the field is taken in the representative labelled by the
    /// first axis, `r1` uniform with `r2 = −r1`, particle 1's hemisphere is
    /// its outcome and particle 2's outcome is drawn from the conditional
    /// single-sphere law.
    pub fn epr_trial<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        first_axis: Axis,
        second_axis: Axis,
    ) -> (Outcome, Outcome) {
        let field = TwoPartyField::new(first_axis);
        let r1 = sample_sphere(rng);
        let r2 = -r1;
        let first = if Hemisphere::plus(first_axis).contains(r1) {
            Outcome::Up
        } else {
            Outcome::Down
        };
        debug_assert!(r2.dot(first_axis.unit_vector()) * first.sign() <= 0.0);
        let (p_up, _) = conditional_inference(&field, first_axis, first, second_axis)
            .expect("label matches first axis");
        let second = if rng.random::<f64>() < p_up {
            Outcome::Up
        } else {
            Outcome::Down
        };
        (first, second)
    }
}

impl PairSource for FieldModel {
    fn trial<R: Rng + ?Sized>(&self, rng: &mut R, a: Axis, b: Axis) -> (Outcome, Outcome) {
        self.epr_trial(rng, a, b)
    }
}

/// `E(c, b)` from [`two_party_prob`].
pub fn model2_expectation_analytic(c: Axis, b: Axis) -> f64 {
    let field = TwoPartyField::new(c);
    Outcome::BOTH
        .iter()
        .flat_map(|&x| Outcome::BOTH.map(move |y| (x, y)))
        .map(|(x, y)| x.value() * y.value() * two_party_prob(&field, c, b, x, y))
        .sum()
}

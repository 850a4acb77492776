//! Classical angular momenta with ensemble-dependent measurement statistics.
//!
//! A fragmentation produces `J1` uniform on the unit sphere and `J2 = −J1`.
//! A detector along `b` acting on a particle whose angular momentum is known
//! to lie in the hemisphere `J·a > 0` (the ensemble `ρ_{a+}`) answers `+½`
//! with probability `(1 + cos(θ_b − θ_a))/2`, so the outcome mean equals the
//! mean projection `⟨J_b⟩ = ½cos(θ_b − θ_a)` over that ensemble. When the
//! detector axis is the ensemble axis the outcome is the hemisphere itself.
//!
//! Measuring one particle fixes its ensemble to the hemisphere of its
//! outcome; conservation then places the partner in the opposite hemisphere
//! along the same axis, and the partner is measured against that ensemble.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_hemisphere, sample_sphere, Vec3};
use crate::rng::PairSource;
use crate::spin::{wrap_delta, Axis, Outcome, V_MAX};

/// A unit angular momentum (`J = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularMomentum(Vec3);

impl AngularMomentum {
    pub fn direction(self) -> Vec3 {
        self.0
    }

    /// Projection `J·a` on a coplanar axis.
    pub fn projection(self, a: Axis) -> f64 {
        self.0.dot(a.unit_vector())
    }
}

/// The distribution a particle's angular momentum is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnsembleLabel {
    /// Uniform on the whole sphere (the pair distribution before any measurement).
    Uniform,
    /// Uniform on `{J : sign·J·axis > 0}`, written `ρ_{axis±}`.
    Hemisphere { axis: Axis, sign: Outcome },
}

impl EnsembleLabel {
    pub fn hemisphere(axis: Axis, sign: Outcome) -> Self {
        EnsembleLabel::Hemisphere { axis, sign }
    }
}

/// `J1` and `J2 = −J1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairConfiguration {
    pub j1: AngularMomentum,
    pub j2: AngularMomentum,
}

pub fn sample_pair<R: Rng + ?Sized>(rng: &mut R) -> PairConfiguration {
    let j = sample_sphere(rng);
    PairConfiguration {
        j1: AngularMomentum(j),
        j2: AngularMomentum(-j),
    }
}

/// `(P(R_b = +½), P(R_b = −½))` for a particle in a hemisphere ensemble.
pub fn single_measure_prob(ensemble: EnsembleLabel, b: Axis) -> Result<(f64, f64)> {
    match ensemble {
        EnsembleLabel::Uniform => Err(Error::UniformEnsemble),
        EnsembleLabel::Hemisphere { axis, sign } => {
            let delta = wrap_delta(axis, b);
            if delta == 0.0 {
                return Ok(if sign == Outcome::Up {
                    (1.0, 0.0)
                } else {
                    (0.0, 1.0)
                });
            }
            let p_up = 0.5 * (1.0 + sign.sign() * delta.cos());
            Ok((p_up, 1.0 - p_up))
        }
    }
}

/// One measurement along `b`: the outcome, and the ensemble the particle is
/// left in (`ρ_{b±}` according to the outcome).
pub fn measure_single<R: Rng + ?Sized>(
    rng: &mut R,
    ensemble: EnsembleLabel,
    b: Axis,
) -> Result<(Outcome, EnsembleLabel)> {
    let (p_up, _) = single_measure_prob(ensemble, b)?;
    let outcome = if rng.random::<f64>() < p_up {
        Outcome::Up
    } else {
        Outcome::Down
    };
    Ok((outcome, EnsembleLabel::hemisphere(b, outcome)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Particle {
    #[default]
    First,
    Second,
}

/// The two-particle experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnsembleModel {
    /// Which particle's measurement selects the ensembles.
    pub measured_first: Particle,
}

impl EnsembleModel {
    pub fn new(measured_first: Particle) -> Self {
        EnsembleModel { measured_first }
    }

    /// One EPR trial: particle 1 along `a`, particle 2 along `b`.
    pub fn epr_trial<R: Rng + ?Sized>(&self, rng: &mut R, a: Axis, b: Axis) -> (Outcome, Outcome) {
        let pair = sample_pair(rng);
        match self.measured_first {
            Particle::First => {
                let r1 = Outcome::from_sign_of(pair.j1.projection(a));
                let partner = EnsembleLabel::hemisphere(a, -r1);
                let (r2, _) = measure_single(rng, partner, b).expect("hemisphere ensemble");
                (r1, r2)
            }
            Particle::Second => {
                let r2 = Outcome::from_sign_of(pair.j2.projection(b));
                let partner = EnsembleLabel::hemisphere(b, -r2);
                let (r1, _) = measure_single(rng, partner, a).expect("hemisphere ensemble");
                (r1, r2)
            }
        }
    }
}

impl PairSource for EnsembleModel {
    fn trial<R: Rng + ?Sized>(&self, rng: &mut R, a: Axis, b: Axis) -> (Outcome, Outcome) {
        self.epr_trial(rng, a, b)
    }
}

/// `E(a, b)` composed from `P(R1a = k)·P(R2b = k′ | R1a = k)`.
pub fn model1_expectation_analytic(a: Axis, b: Axis) -> f64 {
    Outcome::BOTH
        .iter()
        .map(|&k| {
            let partner = EnsembleLabel::hemisphere(a, -k);
            let (up, down) = single_measure_prob(partner, b).expect("hemisphere ensemble");
            let conditional_mean = V_MAX * up - V_MAX * down;
            k.value() * 0.5 * conditional_mean
        })
        .sum()
}

/// Mean outcome along `b` inside `ρ_{a+}` if outcomes were fixed pointwise
/// by `R_b = sign(J_b)/2`, estimated over `n` draws. Such a rule reproduces
/// certainty at `b = a` but gives `½ − |Δθ|/π` rather than `½cos(Δθ)`.
pub fn pointwise_rule_mean<R: Rng + ?Sized>(rng: &mut R, a: Axis, b: Axis, n: u64) -> (f64, f64) {
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let j = AngularMomentum(sample_hemisphere(rng, a.unit_vector()));
        let r = Outcome::from_sign_of(j.projection(b)).value();
        sum += r;
        sum_sq += r * r;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let se = ((sum_sq / nf - mean * mean).max(0.0) / (nf - 1.0)).sqrt();
    (mean, se)
}

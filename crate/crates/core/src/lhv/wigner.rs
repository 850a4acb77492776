//! Set measures on the hidden-variable space and Wigner's inequality.
//!
//! For a deterministic model every axis `a` splits `Λ` into `Λ_{+a}` and
//! `Λ_{−a}` according to particle 1's outcome; labels are always relative to
//! particle 1, so `λ ∈ Λ_{+b}` means particle 2 would answer `−½` along `b`.

use serde::Serialize;

use super::{HiddenVariableModel, ANALYTIC_TOLERANCE, MC_SIGMAS};
use crate::error::{Error, Result};
use crate::rng::{self, StreamKey};
use crate::spin::{wrap_delta, Axis, MeanAccumulator, Outcome};

/// An intersection `Λ_{±a} ∩ Λ_{±a′} ∩ …`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SubsetSpec {
    clauses: Vec<(Axis, Outcome)>,
}

impl SubsetSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the clause `λ ∈ Λ_{sign·axis}`.
    pub fn with(mut self, axis: Axis, sign: Outcome) -> Self {
        self.clauses.push((axis, sign));
        self
    }

    pub fn clauses(&self) -> &[(Axis, Outcome)] {
        &self.clauses
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureMode {
    Analytic,
    MonteCarlo { samples: u64, key: StreamKey },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// Zero in analytic mode.
    pub std_error: f64,
}

fn indicator<M: HiddenVariableModel>(
    model: &M,
    spec: &SubsetSpec,
    lambda: &M::Lambda,
) -> Result<bool> {
    let mut inside = true;
    for &(axis, sign) in spec.clauses() {
        let p = model.response1(sign, axis, lambda);
        if p == 1.0 {
            continue;
        }
        if p != 0.0 {
            return Err(Error::MeasureUndefined);
        }
        inside = false;
    }
    Ok(inside)
}

/// Measure `M` of the subset described by `spec`.
pub fn wigner_measure<M: HiddenVariableModel>(
    model: &M,
    spec: &SubsetSpec,
    mode: MeasureMode,
) -> Result<MeasureEstimate> {
    let [m] = measures(model, std::array::from_ref(spec), mode)?;
    Ok(m)
}

/// Several measures estimated on the same `λ` draws.
fn measures<M: HiddenVariableModel, const K: usize>(
    model: &M,
    specs: &[SubsetSpec; K],
    mode: MeasureMode,
) -> Result<[MeasureEstimate; K]> {
    match mode {
        MeasureMode::Analytic => {
            let mut out = [MeasureEstimate {
                value: 0.0,
                std_error: 0.0,
            }; K];
            for (slot, spec) in out.iter_mut().zip(specs) {
                slot.value = model
                    .analytic_measure(spec)
                    .ok_or(Error::AnalyticUnsupported)?;
            }
            Ok(out)
        }
        MeasureMode::MonteCarlo { samples, key } => {
            let accs = sample_indicators(model, specs, samples, key, |_| 0.0)?;
            Ok(accs.0.map(|acc| {
                let est = acc.estimate().expect("samples > 0");
                MeasureEstimate {
                    value: est.mean,
                    std_error: est.std_error.unwrap_or(0.0),
                }
            }))
        }
    }
}

type Indicators<const K: usize> = ([MeanAccumulator; K], MeanAccumulator);

/// Accumulates the indicator of each spec, plus one derived statistic of
/// the indicator vector.
fn sample_indicators<M, const K: usize, F>(
    model: &M,
    specs: &[SubsetSpec; K],
    samples: u64,
    key: StreamKey,
    derived: F,
) -> Result<Indicators<K>>
where
    M: HiddenVariableModel,
    F: Fn(&[f64; K]) -> f64 + Sync,
{
    assert!(samples > 0, "need at least one sample");
    let batches = rng::batched(key, samples, |rng, len| -> Result<Indicators<K>> {
        let mut accs = [MeanAccumulator::default(); K];
        let mut extra = MeanAccumulator::default();
        for _ in 0..len {
            let lambda = model.sample_lambda(rng);
            let mut x = [0.0; K];
            for (xi, spec) in x.iter_mut().zip(specs) {
                *xi = if indicator(model, spec, &lambda)? {
                    1.0
                } else {
                    0.0
                };
            }
            for (acc, xi) in accs.iter_mut().zip(x) {
                acc.push(xi);
            }
            extra.push(derived(&x));
        }
        Ok((accs, extra))
    });
    let mut total = ([MeanAccumulator::default(); K], MeanAccumulator::default());
    for batch in batches {
        let (accs, extra) = batch?;
        for (t, a) in total.0.iter_mut().zip(accs) {
            *t = t.merge(a);
        }
        total.1 = total.1.merge(extra);
    }
    Ok(total)
}

/// Two sides of a set-measure or probability inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; in Monte Carlo mode the mean of the per-draw difference.
    pub difference: f64,
    /// Allowed shortfall of `lhs − rhs` before the check fails.
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks `M(Λ+a′ ∩ Λ+b) ≥ M(Λ+a ∩ Λ+b) − M(Λ+a ∩ Λ−a′)`.
///
/// In Monte Carlo mode all three measures come from the same draws and the
/// tolerance is [`MC_SIGMAS`] standard errors of the per-draw difference.
pub fn wigner_inequality_check<M: HiddenVariableModel>(
    model: &M,
    a: Axis,
    a_prime: Axis,
    b: Axis,
    mode: MeasureMode,
) -> Result<WignerCheck> {
    let specs = [
        SubsetSpec::new()
            .with(a_prime, Outcome::Up)
            .with(b, Outcome::Up),
        SubsetSpec::new().with(a, Outcome::Up).with(b, Outcome::Up),
        SubsetSpec::new()
            .with(a, Outcome::Up)
            .with(a_prime, Outcome::Down),
    ];
    let (lhs, rhs, tolerance) = match mode {
        MeasureMode::Analytic => {
            let [m0, m1, m2] = measures(model, &specs, mode)?;
            (m0.value, m1.value - m2.value, ANALYTIC_TOLERANCE)
        }
        MeasureMode::MonteCarlo { samples, key } => {
            let ([m0, m1, m2], diff) =
                sample_indicators(model, &specs, samples, key, |x| x[0] - x[1] + x[2])?;
            let mean = |acc: MeanAccumulator| acc.estimate().expect("samples > 0").mean;
            let diff = diff.estimate().expect("samples > 0");
            let tolerance = MC_SIGMAS * diff.std_error.unwrap_or(0.0);
            return Ok(WignerCheck {
                lhs: mean(m0),
                rhs: mean(m1) - mean(m2),
                difference: diff.mean,
                tolerance,
                holds: diff.mean >= -tolerance,
            });
        }
    };
    Ok(WignerCheck {
        lhs,
        rhs,
        difference: lhs - rhs,
        tolerance,
        holds: lhs - rhs >= -tolerance,
    })
}

/// The singlet's version of the same inequality,
/// `cos²((θ_b−θ_a′)/2) ≥ cos²((θ_b−θ_a)/2) − sin²((θ_a−θ_a′)/2)`.
///
/// `holds` is false exactly when the quantum probabilities violate it.
pub fn quantum_wigner_violation(a: Axis, a_prime: Axis, b: Axis) -> WignerCheck {
    let lhs = (0.5 * wrap_delta(a_prime, b)).cos().powi(2);
    let rhs = (0.5 * wrap_delta(a, b)).cos().powi(2) - (0.5 * wrap_delta(a_prime, a)).sin().powi(2);
    WignerCheck {
        lhs,
        rhs,
        difference: lhs - rhs,
        tolerance: 0.0,
        holds: lhs >= rhs,
    }
}

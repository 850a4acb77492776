use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lhv::{sign_model_expectation_analytic, DeterministicSignModel};
use crate::model1::EnsembleModel;
use crate::model2::FieldModel;
use crate::quantum::{singlet_expectation, SingletLaw};
use crate::rng::{PairSource, StreamKey};
use crate::spin::{Axis, AxisQuad, PairCounts, SignChoice};

/// Registered models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Quantum,
    SignLhv,
    Model1,
    Model2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Quantum,
        ModelKind::SignLhv,
        ModelKind::Model1,
        ModelKind::Model2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Quantum => "quantum",
            ModelKind::SignLhv => "sign-lhv",
            ModelKind::Model1 => "model1",
            ModelKind::Model2 => "model2",
        }
    }

    /// Monte Carlo counts for `n` trials along `(a, b)`.
    pub fn counts(self, key: StreamKey, a: Axis, b: Axis, n: u64) -> PairCounts {
        match self {
            ModelKind::Quantum => SingletLaw.counts(key, a, b, n),
            ModelKind::SignLhv => DeterministicSignModel.counts(key, a, b, n),
            ModelKind::Model1 => EnsembleModel::default().counts(key, a, b, n),
            ModelKind::Model2 => FieldModel.counts(key, a, b, n),
        }
    }

    /// Closed-form `E(a, b)` where the scan uses one.
    pub fn analytic_expectation(self, a: Axis, b: Axis) -> Option<f64> {
        match self {
            ModelKind::Quantum => Some(singlet_expectation(a, b)),
            ModelKind::SignLhv => Some(sign_model_expectation_analytic(a, b)),
            ModelKind::Model1 | ModelKind::Model2 => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown model {s:?} (expected quantum, sign-lhv, model1 or model2)"
                ))
            })
    }
}

/// Inputs of a `simulate` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// `(θ_a, θ_a′, θ_b, θ_b′)` in radians.
    pub axes: Vec<[f64; 4]>,
    pub trials: u64,
    pub seed: u64,
    pub sign_choice: SignChoice,
    /// Prefix for `<output>.csv`, `<output>_summary.csv` and `<output>.json`.
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let q = AxisQuad::tsirelson_optimal();
        ExperimentConfig {
            model: ModelKind::Quantum,
            axes: vec![[
                q.a.theta(),
                q.a_prime.theta(),
                q.b.theta(),
                q.b_prime.theta(),
            ]],
            trials: 1_000_000,
            seed: 0,
            sign_choice: SignChoice::Minus,
            output: PathBuf::from("bellfoundry_run"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.axes.is_empty() {
            return Err(Error::Config(
                "at least one axis quadruple is required".into(),
            ));
        }
        self.quads().map(|_| ())
    }

    pub fn quads(&self) -> Result<Vec<AxisQuad>> {
        self.axes
            .iter()
            .map(|&[a, a_prime, b, b_prime]| {
                Ok(AxisQuad {
                    a: Axis::try_from_radians(a)?,
                    a_prime: Axis::try_from_radians(a_prime)?,
                    b: Axis::try_from_radians(b)?,
                    b_prime: Axis::try_from_radians(b_prime)?,
                })
            })
            .collect()
    }
}

/// Parses `0.5`, `pi`, `-pi/4`, `3pi/4`, `3*pi/4` or `π/2`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse angle {s:?}"));
    let text = s.trim().to_ascii_lowercase().replace('π', "pi");
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (text.as_str(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let angle = value / den;
    if angle.is_finite() {
        Ok(angle)
    } else {
        Err(bad())
    }
}

/// Parses `a,a′,b,b′`.
pub fn parse_quad(s: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Config(format!(
            "expected four comma-separated angles, got {s:?}"
        )));
    }
    let mut out = [0.0; 4];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_angle(part)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), FRAC_PI_2);
        assert_eq!(parse_angle(" -pi/4 ").unwrap(), -FRAC_PI_4);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("π/2").unwrap(), FRAC_PI_2);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("1/0").is_err());
        assert_eq!(
            parse_quad("0,pi/2,pi/4,3pi/4").unwrap(),
            [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4]
        );
        assert!(parse_quad("0,1,2").is_err());
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"model":"model2","axes":[[0,1.5707963267948966,0.7853981633974483,2.356194490192345]],
            "trials":1000,"seed":7,"sign_choice":"-","output":"out/run"}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.model, ModelKind::Model2);
        assert_eq!(cfg.sign_choice, SignChoice::Minus);
        cfg.validate().unwrap();
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn invalid_configs() {
        assert!(ExperimentConfig::from_json(r#"{"model":"bohm"}"#).is_err());
        let cfg = ExperimentConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            axes: vec![[0.0, f64::NAN, 0.0, 0.0]],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::NonFiniteAngle(_))));
        assert_eq!("model1".parse::<ModelKind>().unwrap(), ModelKind::Model1);
        assert!("model3".parse::<ModelKind>().is_err());
    }
}

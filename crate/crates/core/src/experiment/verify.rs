use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lhv::{
    check_bell_theorem, joint_distribution_chsh, quantum_wigner_violation, stochastic_defect,
    wigner_inequality_check, ConstantResponseModel, CosineResponseModel, DeterministicSignModel,
    ExpectationMode, JointDistribution, MeasureMode, ANALYTIC_TOLERANCE, MC_SIGMAS,
};
use crate::oracle;
use crate::quantum::{chsh_operator, singlet_expectation, verify_operator_identity};
use crate::rng::StreamKey;
use crate::spin::{chsh_value, Axis, AxisQuad, SignChoice, BELL_BOUND, TSIRELSON_BOUND};

use super::scan::scan_grid;

/// Tolerance on the grid maximum of the CHSH operator norm.
pub const TSIRELSON_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Chsh,
    Wigner,
    Tsirelson,
    Identity,
    StochasticDefect,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Chsh,
        Suite::Wigner,
        Suite::Tsirelson,
        Suite::Identity,
        Suite::StochasticDefect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Chsh => "chsh",
            Suite::Wigner => "wigner",
            Suite::Tsirelson => "tsirelson",
            Suite::Identity => "identity",
            Suite::StochasticDefect => "stochastic-defect",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// One line of the verification table. `margin ≥ 0` when the check passes
/// on its own terms; `pass` is authoritative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    fn upper(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: bound,
            margin: bound - value,
            pass: value <= bound,
        }
    }

    fn near(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        let margin = tolerance - (value - target).abs();
        Check {
            name: name.into(),
            value,
            target,
            margin,
            pass: margin >= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn random_axes(key: StreamKey, n: usize, per: usize) -> Vec<Vec<Axis>> {
    let mut rng = key.stream(0);
    (0..n)
        .map(|_| {
            (0..per)
                .map(|_| Axis::from_radians(rng.random::<f64>() * TAU))
                .collect()
        })
        .collect()
}

fn chsh_suite(key: StreamKey) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let grid = scan_grid(16);
    let analytic = check_bell_theorem(&DeterministicSignModel, &grid, ExpectationMode::Analytic)?;
    checks.push(Check {
        name: "sign-lhv analytic 16^4 grid".into(),
        value: analytic.max_value,
        target: BELL_BOUND,
        margin: analytic.worst_margin,
        pass: analytic.holds,
    });
    let coarse = scan_grid(8);
    let mc = check_bell_theorem(
        &DeterministicSignModel,
        &coarse,
        ExpectationMode::MonteCarlo {
            trials: 20_000,
            key: key.child(0),
        },
    )?;
    checks.push(Check {
        name: "sign-lhv monte-carlo 8^4 grid (5 sigma)".into(),
        value: mc.max_value,
        target: BELL_BOUND,
        margin: mc.worst_margin,
        pass: mc.holds,
    });
    let vertex_max = (0..16)
        .flat_map(|k| {
            SignChoice::BOTH.map(|s| joint_distribution_chsh(&JointDistribution::vertex(k), s))
        })
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::upper(
        "16 deterministic vertices",
        vertex_max,
        BELL_BOUND,
    ));
    let q = AxisQuad::tsirelson_optimal();
    let e = q.pairs().map(|(a, b)| singlet_expectation(a, b));
    let singlet = chsh_value(e[0], e[1], e[2], e[3], SignChoice::Minus);
    checks.push(Check::near(
        "singlet at optimal axes",
        singlet,
        TSIRELSON_BOUND,
        ANALYTIC_TOLERANCE,
    ));
    Ok(checks)
}

fn wigner_suite(key: StreamKey) -> Result<Vec<Check>> {
    let triples = random_axes(key, 100, 3);
    let mut checks = Vec::new();
    for (label, mc) in [("analytic", false), ("monte-carlo", true)] {
        let mut worst = f64::INFINITY;
        let mut worst_value = 0.0;
        let mut all = true;
        for (i, t) in triples.iter().enumerate() {
            let mode = if mc {
                MeasureMode::MonteCarlo {
                    samples: 20_000,
                    key: key.child(i as u64),
                }
            } else {
                MeasureMode::Analytic
            };
            let c = wigner_inequality_check(&DeterministicSignModel, t[0], t[1], t[2], mode)?;
            let margin = c.difference + c.tolerance;
            if margin < worst {
                worst = margin;
                worst_value = c.difference;
            }
            all &= c.holds;
        }
        checks.push(Check {
            name: format!("sign-lhv {label} 100 triples (lhs - rhs)"),
            value: worst_value,
            target: 0.0,
            margin: worst,
            pass: all,
        });
    }
    let v = quantum_wigner_violation(
        Axis::from_radians(FRAC_PI_4),
        Axis::from_radians(FRAC_PI_2),
        Axis::Z,
    );
    let exact = (v.lhs - 0.5).abs() <= ANALYTIC_TOLERANCE
        && (v.rhs - SQRT_2 / 2.0).abs() <= ANALYTIC_TOLERANCE;
    checks.push(Check {
        name: "singlet violation (rhs - lhs)".into(),
        value: v.rhs - v.lhs,
        target: SQRT_2 / 2.0 - 0.5,
        margin: v.rhs - v.lhs,
        pass: !v.holds && exact,
    });
    Ok(checks)
}

/// Largest CHSH operator norm and largest deviation from the closed form
/// `½√(1 + |sin Δa sin Δb|)` over a `res³` grid with `a = 0`, both signs.
pub fn tsirelson_grid_scan(res: usize) -> (f64, f64) {
    let grid = scan_grid(res);
    (0..res * res * res)
        .into_par_iter()
        .map(|k| {
            let q = AxisQuad {
                a: grid[0],
                a_prime: grid[k / (res * res)],
                b: grid[(k / res) % res],
                b_prime: grid[k % res],
            };
            let closed = oracle::chsh_operator_norm_closed_form(
                q.a.theta(),
                q.a_prime.theta(),
                q.b.theta(),
                q.b_prime.theta(),
            );
            SignChoice::BOTH
                .iter()
                .fold((0.0f64, 0.0f64), |(m, d), &s| {
                    let norm = chsh_operator(&q, s).norm();
                    (m.max(norm), d.max((norm - closed).abs()))
                })
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)))
}

fn tsirelson_suite() -> Vec<Check> {
    let (max, dev) = tsirelson_grid_scan(64);
    vec![
        Check::near(
            "operator norm 64^3 grid max",
            max,
            TSIRELSON_BOUND,
            TSIRELSON_TOLERANCE,
        ),
        Check::upper(
            "operator norm never above bound",
            max,
            TSIRELSON_BOUND + TSIRELSON_TOLERANCE,
        ),
        Check::upper("deviation from closed-form norm", dev, TSIRELSON_TOLERANCE),
    ]
}

fn identity_suite(key: StreamKey) -> Vec<Check> {
    let worst = random_axes(key, 1000, 4)
        .into_iter()
        .map(|t| {
            verify_operator_identity(&AxisQuad {
                a: t[0],
                a_prime: t[1],
                b: t[2],
                b_prime: t[3],
            })
        })
        .fold(0.0, f64::max);
    vec![Check::upper(
        "identity residual, 1000 quadruples",
        worst,
        ANALYTIC_TOLERANCE,
    )]
}

fn stochastic_defect_suite(key: StreamKey) -> Vec<Check> {
    let n = 200_000;
    let mut checks = Vec::new();
    let axes = random_axes(key.child(0), 4, 1);
    let worst = axes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            stochastic_defect(&DeterministicSignModel, a[0], n, key.child(i as u64 + 1)).mean
        })
        .fold(0.0, f64::max);
    checks.push(Check::upper("sign-lhv defect is zero", worst, 0.0));
    for (name, est) in [
        (
            "cosine-response defect is positive",
            stochastic_defect(&CosineResponseModel, Axis::Z, n, key.child(10)),
        ),
        (
            "constant-response defect is positive",
            stochastic_defect(&ConstantResponseModel::fair(), Axis::Z, n, key.child(11)),
        ),
    ] {
        let floor = MC_SIGMAS * est.std_error.unwrap_or(0.0);
        checks.push(Check {
            name: name.into(),
            value: est.mean,
            target: 0.0,
            margin: est.mean - floor,
            pass: est.mean > floor,
        });
    }
    checks
}

/// Runs one suite. Random axes and Monte Carlo draws derive from `seed`.
pub fn run_verify(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let key = StreamKey::new(seed).child(suite as u64);
    let checks = match suite {
        Suite::Chsh => chsh_suite(key)?,
        Suite::Wigner => wigner_suite(key)?,
        Suite::Tsirelson => tsirelson_suite(),
        Suite::Identity => identity_suite(key),
        Suite::StochasticDefect => stochastic_defect_suite(key),
    };
    Ok(SuiteReport { suite, checks })
}

/// Tab-separated table with a header row.
pub fn format_table(reports: &[SuiteReport]) -> String {
    let mut out = String::from("suite\tcheck\tvalue\ttarget\tmargin\tstatus\n");
    for r in reports {
        for c in &r.checks {
            out.push_str(&format!(
                "{}\t{}\t{:.15e}\t{:.15e}\t{:.3e}\t{}\n",
                r.suite,
                c.name,
                c.value,
                c.target,
                c.margin,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        for suite in [
            Suite::Chsh,
            Suite::Wigner,
            Suite::Identity,
            Suite::StochasticDefect,
        ] {
            let r = run_verify(suite, 1).unwrap();
            assert!(r.pass(), "{}", format_table(&[r]));
        }
    }

    #[test]
    fn tsirelson_scan_small_grid() {
        let (max, dev) = tsirelson_grid_scan(8);
        assert!((max - TSIRELSON_BOUND).abs() < TSIRELSON_TOLERANCE);
        assert!(dev < TSIRELSON_TOLERANCE);
    }

    #[test]
    fn table_layout() {
        let r = SuiteReport {
            suite: Suite::Identity,
            checks: vec![Check::upper("x", 1.0, 2.0), Check::upper("y", 3.0, 2.0)],
        };
        let t = format_table(&[r]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("identity\tx\t") && lines[1].ends_with("PASS"));
        assert!(lines[2].ends_with("FAIL"));
        assert_eq!(
            "stochastic-defect".parse::<Suite>().unwrap(),
            Suite::StochasticDefect
        );
    }
}

//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, SQRT_2, TAU};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use bellfoundry::experiment::{run_simulate, run_verify, ExperimentConfig, ModelKind, Suite};
use bellfoundry::lhv::{
    check_bell_theorem, joint_distribution_chsh, quantum_wigner_violation, wigner_inequality_check,
    DeterministicSignModel, ExpectationMode, JointDistribution, MeasureMode,
};
use bellfoundry::model1::{model1_expectation_analytic, EnsembleModel, Particle};
use bellfoundry::model2::{
    model2_expectation_analytic, predictions_equal, two_party_prob, FieldModel, FieldSuperposition,
    HemiField, Hemisphere, TwoPartyField,
};
use bellfoundry::quantum::{
    chsh_operator, singlet_expectation, singlet_joint_probability, verify_operator_identity,
};
use bellfoundry::rng::{PairSource, StreamKey};
use bellfoundry::spin::{chsh_value, AxisQuad, SignChoice, BELL_BOUND, TSIRELSON_BOUND};
use bellfoundry::{empirical_expectation, Axis, Outcome, PairCounts};
use rand::Rng;
use rayon::prelude::*;

const SIGMAS: f64 = 5.0;
const EXACT: f64 = 1e-12;
const MC_TRIALS: u64 = 1_000_000;

type Outcomes = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcomes);
type CountSource<'a> = (&'a str, &'a dyn Fn(StreamKey, Axis, Axis) -> PairCounts);

fn ax(t: f64) -> Axis {
    Axis::from_radians(t)
}

fn grid(n: usize) -> Vec<Axis> {
    (0..n).map(|k| ax(TAU * k as f64 / n as f64)).collect()
}

fn random_axes(seed: u64, n: usize) -> Vec<Axis> {
    let mut rng = StreamKey::new(seed).stream(0);
    (0..n).map(|_| ax(rng.random::<f64>() * TAU)).collect()
}

fn ensure(ok: bool, detail: String) -> Outcomes {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Largest `|f − p| / σ` over the four joint frequencies; cells with `p = 0`
/// or `p = 1` must match exactly.
fn worst_cell_z(counts: &PairCounts, a: Axis, b: Axis) -> f64 {
    let n = counts.total() as f64;
    let mut worst: f64 = 0.0;
    for (x, y, c) in counts.cells() {
        let p = singlet_joint_probability(x, a, y, b);
        let f = c as f64 / n;
        let sigma = (p * (1.0 - p) / n).sqrt();
        let z = if sigma == 0.0 {
            if f == p {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (f - p).abs() / sigma
        };
        worst = worst.max(z);
    }
    worst
}

fn singlet_reproduction() -> Outcomes {
    let deltas = [
        0.0,
        FRAC_PI_6,
        FRAC_PI_4,
        FRAC_PI_3,
        FRAC_PI_2,
        2.0 * FRAC_PI_3,
        3.0 * FRAC_PI_4,
        PI,
    ];
    let a = ax(0.3);
    let sources: [CountSource; 3] = [
        ("model1", &|k, a, b| {
            EnsembleModel::new(Particle::First).counts(k, a, b, MC_TRIALS)
        }),
        ("model1/second-first", &|k, a, b| {
            EnsembleModel::new(Particle::Second).counts(k, a, b, MC_TRIALS)
        }),
        ("model2", &|k, a, b| FieldModel.counts(k, a, b, MC_TRIALS)),
    ];
    let mut worst: f64 = 0.0;
    for (si, (_, counts_of)) in sources.iter().enumerate() {
        for (di, &d) in deltas.iter().enumerate() {
            let b = a.rotated(d);
            let counts = counts_of(StreamKey::new(100 + si as u64).child(di as u64), a, b);
            let est = empirical_expectation(&counts).map_err(|e| e.to_string())?;
            let z_e =
                (est.value - singlet_expectation(a, b)).abs() / est.std_error.unwrap_or(f64::NAN);
            let z_e = if est.value == singlet_expectation(a, b) {
                0.0
            } else {
                z_e
            };
            worst = worst.max(worst_cell_z(&counts, a, b)).max(z_e);
        }
    }
    ensure(
        worst <= SIGMAS,
        format!("3 sources x 8 angles x 1e6 trials, worst deviation {worst:.2} sigma"),
    )
}

fn chsh_violation() -> Outcomes {
    let q = AxisQuad::tsirelson_optimal();
    let e = q.pairs().map(|(a, b)| singlet_expectation(a, b));
    let singlet = chsh_value(e[0], e[1], e[2], e[3], SignChoice::Minus);
    let e1 = q.pairs().map(|(a, b)| model1_expectation_analytic(a, b));
    let e2 = q.pairs().map(|(a, b)| model2_expectation_analytic(a, b));
    let analytic = [
        singlet,
        chsh_value(e1[0], e1[1], e1[2], e1[3], SignChoice::Minus),
        chsh_value(e2[0], e2[1], e2[2], e2[3], SignChoice::Minus),
    ];
    let mut ok = analytic
        .iter()
        .all(|v| (v - TSIRELSON_BOUND).abs() <= EXACT && *v > BELL_BOUND);
    let mut detail = format!(
        "analytic {:.12} {:.12} {:.12}",
        analytic[0], analytic[1], analytic[2]
    );
    for (name, model) in [("model1", ModelKind::Model1), ("model2", ModelKind::Model2)] {
        let ests: Vec<_> = q
            .pairs()
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                empirical_expectation(&model.counts(
                    StreamKey::new(200).child(i as u64),
                    a,
                    b,
                    MC_TRIALS,
                ))
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let v = chsh_value(
            ests[0].value,
            ests[1].value,
            ests[2].value,
            ests[3].value,
            SignChoice::Minus,
        );
        let se = ests
            .iter()
            .map(|e| e.std_error.unwrap().powi(2))
            .sum::<f64>()
            .sqrt();
        ok &= (v - TSIRELSON_BOUND).abs() <= SIGMAS * se && v - SIGMAS * se > BELL_BOUND;
        detail += &format!("; {name} MC {v:.5} ± {se:.5}");
    }
    ensure(ok, detail)
}

fn bell_bound() -> Outcomes {
    let analytic = check_bell_theorem(
        &DeterministicSignModel,
        &grid(16),
        ExpectationMode::Analytic,
    )
    .map_err(|e| e.to_string())?;
    let mc = check_bell_theorem(
        &DeterministicSignModel,
        &grid(16),
        ExpectationMode::MonteCarlo {
            trials: 20_000,
            key: StreamKey::new(300),
        },
    )
    .map_err(|e| e.to_string())?;
    let vertex_max = (0..16)
        .flat_map(|k| {
            SignChoice::BOTH.map(|s| joint_distribution_chsh(&JointDistribution::vertex(k), s))
        })
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(
        analytic.holds && mc.holds && vertex_max <= BELL_BOUND,
        format!(
            "analytic 16^4 max {:.15} ({} combinations); MC 16^4 max {:.5} worst margin {:.2e}; vertices max {vertex_max}",
            analytic.max_value, analytic.checked, mc.max_value, mc.worst_margin
        ),
    )
}

fn identity_and_tsirelson() -> Outcomes {
    let axes = random_axes(400, 4000);
    let residual = axes
        .chunks(4)
        .map(|t| {
            verify_operator_identity(&AxisQuad {
                a: t[0],
                a_prime: t[1],
                b: t[2],
                b_prime: t[3],
            })
        })
        .fold(0.0, f64::max);
    let g = grid(64);
    let max_norm = (0..64 * 64 * 64)
        .into_par_iter()
        .map(|k| {
            let q = AxisQuad {
                a: g[0],
                a_prime: g[k / 4096],
                b: g[(k / 64) % 64],
                b_prime: g[k % 64],
            };
            SignChoice::BOTH
                .iter()
                .map(|&s| chsh_operator(&q, s).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    ensure(
        residual < EXACT && (max_norm - TSIRELSON_BOUND).abs() <= 1e-9,
        format!(
            "identity residual {residual:.2e} over 1000 quadruples; 64^3 norm max {max_norm:.15}"
        ),
    )
}

fn wigner() -> Outcomes {
    let axes = random_axes(500, 300);
    let mut all = true;
    let mut worst_mc = f64::INFINITY;
    for (i, t) in axes.chunks(3).enumerate() {
        let analytic = wigner_inequality_check(
            &DeterministicSignModel,
            t[0],
            t[1],
            t[2],
            MeasureMode::Analytic,
        )
        .map_err(|e| e.to_string())?;
        let mode = MeasureMode::MonteCarlo {
            samples: 100_000,
            key: StreamKey::new(501).child(i as u64),
        };
        let mc = wigner_inequality_check(&DeterministicSignModel, t[0], t[1], t[2], mode)
            .map_err(|e| e.to_string())?;
        all &= analytic.holds && mc.holds;
        worst_mc = worst_mc.min(mc.difference + mc.tolerance);
    }
    let v = quantum_wigner_violation(ax(FRAC_PI_4), ax(FRAC_PI_2), ax(0.0));
    let violated =
        !v.holds && (v.lhs - 0.5).abs() <= EXACT && (v.rhs - SQRT_2 / 2.0).abs() <= EXACT;
    ensure(
        all && violated,
        format!(
            "100 triples hold (MC worst margin {worst_mc:.2e}); singlet lhs {:.12} < rhs {:.12}",
            v.lhs, v.rhs
        ),
    )
}

fn anticorrelation_and_marginals() -> Outcomes {
    let mut worst_z: f64 = 0.0;
    let mut same = 0;
    for (i, model) in ModelKind::ALL.into_iter().enumerate() {
        let a = ax(1.1);
        let counts = model.counts(StreamKey::new(600).child(i as u64), a, a, MC_TRIALS);
        same += counts.same();
        let n = counts.total() as f64;
        let sigma = (0.25 / n).sqrt();
        for f in [
            counts.marginal_first(Outcome::Up),
            counts.marginal_second(Outcome::Up),
        ] {
            worst_z = worst_z.max((f as f64 / n - 0.5).abs() / sigma);
        }
    }
    ensure(
        same == 0 && worst_z <= SIGMAS,
        format!("4 models x 1e6 equal-axis trials: {same} same-sign outcomes; marginals worst {worst_z:.2} sigma"),
    )
}

fn equivalence_classes() -> Outcomes {
    let g = grid(64);
    let axes = random_axes(700, 200);
    let mut decomposed = true;
    for t in axes.chunks(2) {
        let lhs = FieldSuperposition::single(HemiField::new(Hemisphere::plus(t[0])));
        decomposed &= predictions_equal(&lhs, &lhs.decompose_onto(t[1]), &g);
    }
    let distinct = !predictions_equal(
        &FieldSuperposition::single(HemiField::new(Hemisphere::plus(ax(0.0)))),
        &FieldSuperposition::single(HemiField::new(Hemisphere::plus(ax(0.5)))),
        &g,
    );
    let labels = grid(16);
    let mut spread: f64 = 0.0;
    for &c in &grid(16) {
        for &b in &grid(16) {
            for x in Outcome::BOTH {
                for y in Outcome::BOTH {
                    let ps: Vec<f64> = labels
                        .iter()
                        .map(|&l| two_party_prob(&TwoPartyField::new(l), c, b, x, y))
                        .collect();
                    let (lo, hi) = ps
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                            (lo.min(p), hi.max(p))
                        });
                    spread = spread.max(hi - lo);
                }
            }
        }
    }
    ensure(
        decomposed && distinct && spread <= EXACT,
        format!(
            "100 decompositions equivalent on 64 axes; label spread {spread:.2e} over 16 labels"
        ),
    )
}

fn determinism() -> Outcomes {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let q = AxisQuad::tsirelson_optimal();
    let quads = vec![
        [
            q.a.theta(),
            q.a_prime.theta(),
            q.b.theta(),
            q.b_prime.theta(),
        ],
        [0.1, 1.2, 2.3, 3.4],
    ];
    let run = |threads: usize, name: &str| -> Result<Vec<Vec<u8>>, String> {
        let cfg = ExperimentConfig {
            model: ModelKind::Model2,
            axes: quads.clone(),
            trials: 3 * (1 << 16) + 17,
            seed: 42,
            sign_choice: SignChoice::Minus,
            output: dir.path().join(name),
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let (_, paths) = pool
            .install(|| run_simulate(&cfg))
            .map_err(|e| e.to_string())?;
        [&paths.csv, &paths.summary, &paths.json]
            .iter()
            .map(|p| read(p))
            .collect()
    };
    let one = run(1, "t1")?;
    let four = run(4, "t4")?;
    ensure(
        one == four,
        format!(
            "csv, summary and json identical for 1 and 4 threads ({} bytes)",
            one.iter().map(Vec::len).sum::<usize>()
        ),
    )
}

fn read(p: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("singlet reproduction", singlet_reproduction),
        ("CHSH violation", chsh_violation),
        ("Bell bound for factorizable models", bell_bound),
        (
            "operator identity and Tsirelson bound",
            identity_and_tsirelson,
        ),
        ("Wigner inequality", wigner),
        (
            "anticorrelation and marginals",
            anticorrelation_and_marginals,
        ),
        ("equivalence classes", equivalence_classes),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{status} {}. {name}: {detail} [{:.1} s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    let suites = Suite::ALL
        .iter()
        .filter(|&&s| run_verify(s, 0).map(|r| r.pass()).unwrap_or(false))
        .count();
    println!("verify suites passing: {suites}/{}", Suite::ALL.len());
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 && suites == Suite::ALL.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

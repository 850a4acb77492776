//! Experiment driver: configuration, seeded runs with CSV/JSON reports,
//! CHSH angle scans, verification suites and oracle printing.

mod config;
mod scan;
mod simulate;
mod verify;

pub use config::{parse_angle, parse_quad, ExperimentConfig, ModelKind};
pub use scan::{argmax_chsh, run_scan, scan_grid, ScanResult, ARGMAX_TIE_TOLERANCE};
pub use simulate::{
    run_simulate, simulate, write_outputs, BellVerdict, ChshReport, OutputPaths, PairReport,
    RunReport,
};
pub use verify::{
    format_table, run_verify, tsirelson_grid_scan, Check, Suite, SuiteReport, TSIRELSON_TOLERANCE,
};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use crate::oracle;

/// Values of the brute-force oracles, by name.
pub fn oracle_values() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for (label, delta) in [
        ("0", 0.0),
        ("pi/4", FRAC_PI_4),
        ("pi/2", FRAC_PI_2),
        ("pi", PI),
    ] {
        out.push((
            format!("sign_model_E(delta={label}) quadrature"),
            oracle::sign_model_expectation_quadrature(delta, 1 << 20),
        ));
    }
    out.push((
        "circle_measure(+0, +pi/2)".into(),
        oracle::circle_subset_measure(&[(0.0, 1.0), (FRAC_PI_2, 1.0)], 1 << 20),
    ));
    out.push((
        "hemisphere_average(field=pi/3, hemi=0)".into(),
        oracle::hemisphere_average_quadrature(FRAC_PI_3, 0.0, 32),
    ));
    out.push((
        "singlet_P(+,0;+,pi/3) statevector".into(),
        oracle::singlet_probability_statevector(true, 0.0, true, FRAC_PI_3),
    ));
    out.push((
        "singlet_P(+,0;-,pi/3) statevector".into(),
        oracle::singlet_probability_statevector(true, 0.0, false, FRAC_PI_3),
    ));
    out.push((
        "chsh_operator_norm closed form, optimal axes".into(),
        oracle::chsh_operator_norm_closed_form(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4),
    ));
    out.push((
        "tsirelson_grid_max(64)".into(),
        oracle::tsirelson_grid_max(64),
    ));
    let (v, a_prime, b, b_prime) = oracle::singlet_chsh_grid_max(64);
    out.push(("singlet_chsh_grid_max(64)".into(), v));
    out.push(("singlet_chsh_grid_argmax a'".into(), a_prime));
    out.push(("singlet_chsh_grid_argmax b".into(), b));
    out.push(("singlet_chsh_grid_argmax b'".into(), b_prime));
    out.push((
        "hemisphere_sign_rule_mean(delta=pi/3)".into(),
        oracle::hemisphere_sign_rule_mean(FRAC_PI_3, 64),
    ));
    out
}

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ModelKind;
use crate::error::{Error, Result};
use crate::rng::StreamKey;
use crate::spin::{chsh_value, empirical_expectation, Axis, AxisQuad, SignChoice};

/// Relative slack under which a later grid point does not displace an
/// earlier maximum.
pub const ARGMAX_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    pub model: ModelKind,
    pub resolution: usize,
    /// Trials per axis pair; `None` for closed-form scans.
    pub trials: Option<u64>,
    pub axes: AxisQuad,
    pub sign_choice: SignChoice,
    pub value: f64,
    pub std_error: Option<f64>,
}

/// `θ_k = 2πk / resolution`.
pub fn scan_grid(resolution: usize) -> Vec<Axis> {
    (0..resolution)
        .map(|k| Axis::from_radians(TAU * k as f64 / resolution as f64))
        .collect()
}

/// Best `(a′, b, b′, sign, value)` indices over `table[i][j] = E(grid_i, grid_j)`
/// with `a = grid_0`. Ties keep the first point in `(a′, b, b′, sign)` order.
pub fn argmax_chsh(table: &[Vec<f64>]) -> (usize, usize, usize, SignChoice, f64) {
    let n = table.len();
    assert!(n > 0, "empty table");
    let mut best: Option<(usize, usize, usize, SignChoice, f64)> = None;
    for ia in 0..n {
        for ib in 0..n {
            for ib2 in 0..n {
                for sign in SignChoice::BOTH {
                    let v = chsh_value(
                        table[0][ib],
                        table[0][ib2],
                        table[ia][ib],
                        table[ia][ib2],
                        sign,
                    );
                    if best.is_none_or(|b| v > b.4 + ARGMAX_TIE_TOLERANCE * b.4.abs()) {
                        best = Some((ia, ib, ib2, sign, v));
                    }
                }
            }
        }
    }
    best.expect("non-empty table")
}

/// Grid search of the CHSH combination with `a = 0`, both sign choices.
/// Quantum and sign-lhv use closed forms; the other models run `trials`
/// Monte Carlo trials per grid pair.
pub fn run_scan(model: ModelKind, resolution: usize, trials: u64, seed: u64) -> Result<ScanResult> {
    if resolution < 2 {
        return Err(Error::Config("grid resolution must be at least 2".into()));
    }
    let grid = scan_grid(resolution);
    let analytic = model.analytic_expectation(Axis::Z, Axis::Z).is_some();
    if !analytic && trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let root = StreamKey::new(seed);
    let cells: Vec<(f64, f64)> = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (grid[k / resolution], grid[k % resolution]);
            match model.analytic_expectation(a, b) {
                Some(e) => Ok((e, 0.0)),
                None => {
                    let est =
                        empirical_expectation(&model.counts(root.child(k as u64), a, b, trials))?;
                    Ok((est.value, est.std_error.unwrap_or(0.0)))
                }
            }
        })
        .collect::<Result<_>>()?;
    let table: Vec<Vec<f64>> = cells
        .chunks(resolution)
        .map(|row| row.iter().map(|c| c.0).collect())
        .collect();
    let (ia, ib, ib2, sign, value) = argmax_chsh(&table);
    let se = |i: usize, j: usize| cells[i * resolution + j].1;
    let std_error = (!analytic).then(|| {
        (se(0, ib).powi(2) + se(0, ib2).powi(2) + se(ia, ib).powi(2) + se(ia, ib2).powi(2)).sqrt()
    });
    Ok(ScanResult {
        model,
        resolution,
        trials: (!analytic).then_some(trials),
        axes: AxisQuad {
            a: grid[0],
            a_prime: grid[ia],
            b: grid[ib],
            b_prime: grid[ib2],
        },
        sign_choice: sign,
        value,
        std_error,
    })
}

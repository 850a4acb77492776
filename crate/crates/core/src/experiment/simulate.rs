use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::{ExperimentConfig, ModelKind};
use crate::error::{Error, Result};
use crate::lhv::MC_SIGMAS;
use crate::rng::StreamKey;
use crate::spin::{
    chsh_value, empirical_expectation, AxisQuad, ExpectationEstimate, Outcome, PairCounts,
    SignChoice, BELL_BOUND, PAIR_LABELS, TSIRELSON_BOUND,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellVerdict {
    /// `CHSH > 2V_max² + 5σ`.
    Violated,
    Respected,
}

impl fmt::Display for BellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellVerdict::Violated => "Bell bound violated",
            BellVerdict::Respected => "bound respected",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub run_id: String,
    pub theta_a: f64,
    pub theta_b: f64,
    pub counts: PairCounts,
    pub estimate: ExpectationEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshReport {
    pub quad: usize,
    pub axes: AxisQuad,
    pub sign_choice: SignChoice,
    pub value: f64,
    pub std_error: Option<f64>,
    pub bell_bound: f64,
    pub tsirelson_bound: f64,
    pub verdict: BellVerdict,
    pub exceeds_tsirelson: bool,
}

/// Everything a `simulate` run produces. The JSON form omits the wall-clock
/// time so that it depends on `(config, seed)` alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub model: ModelKind,
    pub seed: u64,
    pub trials: u64,
    pub pairs: Vec<PairReport>,
    pub chsh: Vec<ChshReport>,
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

/// Runs `config.trials` trials for every axis pair of every quadruple. Pair
/// `p` of quadruple `q` draws from substream `4q + p` of the seed.
pub fn simulate(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let root = StreamKey::new(config.seed);
    let mut pairs = Vec::new();
    let mut chsh = Vec::new();
    for (qi, quad) in config.quads()?.into_iter().enumerate() {
        let mut estimates = [None; 4];
        for (pi, (a, b)) in quad.pairs().into_iter().enumerate() {
            let counts = config
                .model
                .counts(root.child((4 * qi + pi) as u64), a, b, config.trials);
            let estimate = empirical_expectation(&counts)?;
            estimates[pi] = Some(estimate);
            pairs.push(PairReport {
                run_id: format!("q{qi}:{}", PAIR_LABELS[pi]),
                theta_a: a.theta(),
                theta_b: b.theta(),
                counts,
                estimate,
            });
        }
        let e = estimates.map(|x| x.expect("all four pairs run"));
        let value = chsh_value(
            e[0].value,
            e[1].value,
            e[2].value,
            e[3].value,
            config.sign_choice,
        );
        let std_error = e
            .iter()
            .map(|x| x.std_error.map(|s| s * s))
            .sum::<Option<f64>>()
            .map(f64::sqrt);
        let margin = MC_SIGMAS * std_error.unwrap_or(0.0);
        chsh.push(ChshReport {
            quad: qi,
            axes: quad,
            sign_choice: config.sign_choice,
            value,
            std_error,
            bell_bound: BELL_BOUND,
            tsirelson_bound: TSIRELSON_BOUND,
            verdict: if value > BELL_BOUND + margin {
                BellVerdict::Violated
            } else {
                BellVerdict::Respected
            },
            exceeds_tsirelson: value > TSIRELSON_BOUND + margin,
        });
    }
    Ok(RunReport {
        model: config.model,
        seed: config.seed,
        trials: config.trials,
        pairs,
        chsh,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub json: PathBuf,
}

impl OutputPaths {
    pub fn for_prefix(prefix: &Path) -> Self {
        let with = |suffix: &str| {
            let mut s: OsString = prefix.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        };
        OutputPaths {
            csv: with(".csv"),
            summary: with("_summary.csv"),
            json: with(".json"),
        }
    }
}

#[derive(Serialize)]
struct CountRow<'a> {
    run_id: &'a str,
    theta_a: f64,
    theta_b: f64,
    a1: Outcome,
    b2: Outcome,
    count: u64,
    freq: f64,
}

#[derive(Serialize)]
struct SummaryRow {
    pair_id: String,
    #[serde(rename = "E")]
    e: f64,
    std_error: Option<f64>,
}

fn io_error(path: &Path, e: impl fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| io_error(path, e))
}

/// Writes the per-outcome CSV, the summary CSV and the JSON report.
pub fn write_outputs(report: &RunReport, prefix: &Path) -> Result<OutputPaths> {
    let paths = OutputPaths::for_prefix(prefix);

    let mut w = csv_writer(&paths.csv)?;
    for pair in &report.pairs {
        let total = pair.counts.total() as f64;
        for (a1, b2, count) in pair.counts.cells() {
            w.serialize(CountRow {
                run_id: &pair.run_id,
                theta_a: pair.theta_a,
                theta_b: pair.theta_b,
                a1,
                b2,
                count,
                freq: count as f64 / total,
            })
            .map_err(|e| io_error(&paths.csv, e))?;
        }
    }
    w.flush().map_err(|e| io_error(&paths.csv, e))?;

    let mut w = csv_writer(&paths.summary)?;
    let rows = report
        .pairs
        .iter()
        .map(|p| SummaryRow {
            pair_id: p.run_id.clone(),
            e: p.estimate.value,
            std_error: p.estimate.std_error,
        })
        .chain(report.chsh.iter().map(|c| SummaryRow {
            pair_id: format!("q{}:CHSH", c.quad),
            e: c.value,
            std_error: c.std_error,
        }));
    for row in rows {
        w.serialize(row).map_err(|e| io_error(&paths.summary, e))?;
    }
    w.flush().map_err(|e| io_error(&paths.summary, e))?;

    let file = File::create(&paths.json).map_err(|e| io_error(&paths.json, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| io_error(&paths.json, e))?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| io_error(&paths.json, e))?;
    Ok(paths)
}

/// [`simulate`] followed by [`write_outputs`] to `config.output`.
pub fn run_simulate(config: &ExperimentConfig) -> Result<(RunReport, OutputPaths)> {
    let report = simulate(config)?;
    let paths = write_outputs(&report, &config.output)?;
    Ok((report, paths))
}

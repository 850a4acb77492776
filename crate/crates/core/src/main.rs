use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bellfoundry::experiment::{
    format_table, oracle_values, parse_quad, run_scan, run_simulate, run_verify, ExperimentConfig,
    ModelKind, Suite,
};
use bellfoundry::spin::{SignChoice, BELL_BOUND, TSIRELSON_BOUND};
use bellfoundry::Error;

const THREADS_ENV: &str = "BELLFOUNDRY_THREADS";

#[derive(Parser)]
#[command(
    name = "bellfoundry",
    version,
    about = "EPR-Bell correlation experiments"
)]
struct Cli {
    /// Worker threads (BELLFOUNDRY_THREADS takes precedence).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials on each axis pair and write CSV and JSON reports.
    Simulate(SimulateArgs),
    /// Grid-search the CHSH combination over coplanar axes with a = 0.
    Scan {
        #[arg(long)]
        model: ModelKind,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Trials per axis pair for Monte Carlo models.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run verification suites and print a pass/fail table.
    Verify {
        /// chsh, wigner, tsirelson, identity or stochastic-defect; all when omitted.
        suites: Vec<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the brute-force oracle values.
    Oracle,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    /// Axis quadruple `a,a',b,b'` in radians (`pi` expressions allowed); repeatable.
    #[arg(long, allow_hyphen_values = true)]
    axes: Vec<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `-` or `+`.
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<SignChoice>,
    /// Output prefix.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SimulateArgs {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(m) = self.model {
            cfg.model = m;
        }
        if !self.axes.is_empty() {
            cfg.axes = self
                .axes
                .iter()
                .map(|s| parse_quad(s))
                .collect::<Result<_, _>>()?;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.sign {
            cfg.sign_choice = s;
        }
        if let Some(o) = &self.out {
            cfg.output = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Error> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.config()?;
            let (report, paths) = run_simulate(&cfg)?;
            for c in &report.chsh {
                let se = c
                    .std_error
                    .map_or("unavailable".to_string(), |s| format!("{s:.6}"));
                println!(
                    "q{}\tCHSH={:.6}\tstd_error={}\tbell={BELL_BOUND}\ttsirelson={TSIRELSON_BOUND:.6}\t{}",
                    c.quad, c.value, se, c.verdict
                );
            }
            println!(
                "wrote {}, {}, {}",
                paths.csv.display(),
                paths.summary.display(),
                paths.json.display()
            );
            println!("wall-clock {:.3} s", report.wall_clock_secs);
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            model,
            grid,
            trials,
            seed,
        } => {
            let r = run_scan(model, grid, trials, seed)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&r).expect("scan result serializes")
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suites, seed } => {
            let suites = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites
            };
            let reports = suites
                .into_iter()
                .map(|s| run_verify(s, seed))
                .collect::<Result<Vec<_>, _>>()?;
            print!("{}", format_table(&reports));
            Ok(if reports.iter().all(|r| r.pass()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Oracle => {
            for (name, value) in oracle_values() {
                println!("{name}\t{value:.17e}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

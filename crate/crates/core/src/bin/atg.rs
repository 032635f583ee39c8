use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use atg_core::atg::{bell_pattern, build_atg};
use atg_core::cluster::{failure_bound, threshold_bounds, ThresholdBounds};
use atg_core::code::{logical_basis, parse_code_file, CssCode};
use atg_core::decoder::{DecodeMode, DEFAULT_EXACT_CAP};
use atg_core::ghz::{ghz_layers, ghz_measurement, ghz_stabilizers};
use atg_core::harness::{run_sweep, to_csv, to_json, write_atomic, OutputFormat, PatternSpec, SweepConfig};
use atg_core::mbqc::{foliated_graph, frame_run, recurrence_failures, RecurrenceSide};
use atg_core::noise::{trial_seed, NoiseConfig};
use atg_core::stabilizers::{bell_stabilizers, element_json};
use atg_core::tableau::{foliated_run, oracle_cross_check, MAX_QUBITS};
use atg_core::{AtgError, Result};

#[derive(Parser)]
#[command(name = "atg", version, about = "Single-shot state preparation on alternating Tanner graph cluster states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a code file, printing its parameters.
    Validate {
        #[arg(long)]
        code: PathBuf,
    },
    /// Emit the cluster-state graph as JSON.
    Build {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit every stabilizer element with its verification status.
    Stabilizers {
        #[command(flatten)]
        base: Base,
        #[arg(long, default_value = "bell")]
        pattern: PatternSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one decoded trial and print its outcome.
    Trial {
        #[command(flatten)]
        base: Base,
        #[command(flatten)]
        decode: Decode,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "bell")]
        pattern: PatternSpec,
    },
    /// Monte Carlo sweep over error rates.
    Sweep {
        #[command(flatten)]
        run: Run,
        #[arg(long, default_value = "bell")]
        pattern: PatternSpec,
    },
    /// Sweep with an `m`-surface GHZ pattern.
    Ghz {
        #[command(flatten)]
        run: Run,
        #[arg(long)]
        m: usize,
    },
    /// Check the repeated-measurement syndrome recurrence on noisy foliated runs.
    MbqcCheck {
        #[command(flatten)]
        base: Base,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare frame-level decoding with a stabilizer tableau simulation.
    OracleCheck {
        #[command(flatten)]
        base: Base,
        #[arg(long, default_value = "bell")]
        pattern: PatternSpec,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Threshold constants for an LDPC parameter, and optionally the failure bound.
    Bounds {
        #[arg(long)]
        ell: Option<u64>,
        #[arg(long)]
        code: Option<PathBuf>,
        #[arg(long = "T")]
        t: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Args)]
struct Base {
    #[arg(long)]
    code: PathBuf,
    #[arg(long = "T")]
    t: usize,
}

#[derive(Args)]
struct Decode {
    #[arg(long, default_value = "auto")]
    mode: DecodeMode,
    /// Largest block solved exactly.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct Run {
    #[command(flatten)]
    base: Base,
    #[command(flatten)]
    decode: Decode,
    /// Error rates, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Overrides ATG_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Fill the secs column with wall time.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| AtgError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    }
}

#[derive(Serialize)]
struct CodeSummary<'a> {
    name: &'a str,
    n: usize,
    k: usize,
    d: Option<usize>,
    ell: usize,
    m_x: usize,
    m_z: usize,
}

#[derive(Serialize)]
struct BoundsReport {
    #[serde(flatten)]
    bounds: ThresholdBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure_bound: Option<f64>,
}

#[derive(Serialize)]
struct MbqcReport {
    trials: u64,
    passed: u64,
    engine: &'static str,
    failures: Vec<(u64, Vec<(RecurrenceSide, usize)>)>,
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { code } => {
            let c = parse_code_file(&code)?;
            emit(&json(&summary(&c))?, None)?;
        }
        Command::Build { base, out } => {
            let g = build_atg(&parse_code_file(&base.code)?, base.t)?;
            emit(&json(&g.to_json())?, out.as_deref())?;
        }
        Command::Stabilizers { base, pattern, out } => {
            let code = parse_code_file(&base.code)?;
            let g = build_atg(&code, base.t)?;
            let lb = logical_basis(&code);
            let (meas, set) = match pattern {
                PatternSpec::Bell => (bell_pattern(&g), bell_stabilizers(&g, &lb)),
                PatternSpec::Ghz(m) => {
                    let gp = ghz_layers(base.t, m)?;
                    (ghz_measurement(&g, &gp), ghz_stabilizers(&g, &gp, &lb))
                }
            };
            let elements: Vec<_> = set
                .s0
                .iter()
                .chain(&set.s1)
                .map(|e| element_json(&g, &meas, e))
                .collect();
            let ok = elements.iter().all(|e| e.verified);
            emit(&json(&elements)?, out.as_deref())?;
            return Ok(verdict(ok));
        }
        Command::Trial {
            base,
            decode,
            p,
            seed,
            pattern,
        } => {
            let code = parse_code_file(&base.code)?;
            let pipe = pattern.pipeline(&code, base.t, decode.mode, decode.cap)?;
            let o = pipe.run_trial(&NoiseConfig::new(p, seed)?)?;
            emit(&json(&o)?, None)?;
        }
        Command::Sweep { run, pattern } => sweep(run, pattern)?,
        Command::Ghz { run, m } => sweep(run, PatternSpec::Ghz(m))?,
        Command::MbqcCheck { base, trials, p, seed } => {
            let code = parse_code_file(&base.code)?;
            NoiseConfig::new(p, seed)?;
            let tableau = foliated_graph(&code, base.t)?.num_vertices() <= MAX_QUBITS;
            let results: Vec<(u64, Vec<(RecurrenceSide, usize)>)> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let s = trial_seed(seed, 0, i);
                    let (rec, f) = if tableau {
                        foliated_run(&code, base.t, p, s)?
                    } else {
                        frame_run(&code, base.t, p, s)?
                    };
                    Ok((i, recurrence_failures(&code, &rec, &f)?))
                })
                .collect::<Result<_>>()?;
            let failures: Vec<_> = results.into_iter().filter(|(_, f)| !f.is_empty()).collect();
            let report = MbqcReport {
                trials,
                passed: trials - failures.len() as u64,
                engine: if tableau { "tableau" } else { "frame" },
                failures,
            };
            emit(&json(&report)?, None)?;
            return Ok(verdict(report.failures.is_empty()));
        }
        Command::OracleCheck {
            base,
            pattern,
            p,
            trials,
            seed,
        } => {
            let code = parse_code_file(&base.code)?;
            let pipe = pattern.pipeline(&code, base.t, DecodeMode::Auto, DEFAULT_EXACT_CAP)?;
            let report = oracle_cross_check(&pipe, p, trials, seed)?;
            emit(&json(&report)?, None)?;
            return Ok(verdict(report.passed()));
        }
        Command::Bounds { ell, code, t, p } => {
            let code = code.as_deref().map(parse_code_file).transpose()?;
            let ell = match (ell, &code) {
                (Some(l), _) => l,
                (None, Some(c)) => c.ell as u64,
                (None, None) => return Err(AtgError::InvalidConfig("pass --ell or --code".into())),
            };
            let bounds = threshold_bounds(ell)?;
            let failure_bound = match (&code, t, p) {
                (Some(c), Some(t), Some(p)) => Some(failure_bound(c, t, p, &bounds)?),
                _ => None,
            };
            emit(&json(&BoundsReport { bounds, failure_bound })?, None)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn summary(c: &CssCode) -> CodeSummary<'_> {
    CodeSummary {
        name: &c.name,
        n: c.n,
        k: c.k,
        d: c.d,
        ell: c.ell,
        m_x: c.m_x,
        m_z: c.m_z,
    }
}

fn sweep(run: Run, pattern: PatternSpec) -> Result<()> {
    let code = parse_code_file(&run.base.code)?;
    let mut cfg = SweepConfig::new(code, run.base.t, run.p, run.trials, run.seed);
    cfg.pattern = pattern;
    cfg.mode = run.decode.mode;
    cfg.exact_cap = run.decode.cap;
    cfg.output = run.out.clone();
    cfg.format = run.format;
    cfg.threads = run.threads;
    cfg.timing = run.timing;
    let result = run_sweep(&cfg)?;
    if run.out.is_none() {
        let text = match run.format {
            OutputFormat::Csv => to_csv(&result.rows),
            OutputFormat::Json => to_json(&result.rows)?,
        };
        emit(&text, None)?;
    }
    Ok(())
}

//! Monte Carlo sweeps over error rates and result files.

use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::code::CssCode;
use crate::decoder::{DecodeMode, Pipeline, DEFAULT_EXACT_CAP};
use crate::error::{AtgError, Result};
use crate::ghz::ghz_layers;
use crate::noise::{trial_seed, NoiseConfig};

pub const CSV_HEADER: &str = "code,n,k,d,ell,T,pattern,p,trials,fail_x,fail_z,cc_x_viol,cc_z_viol,\
mean_resid_w,max_resid_w,mean_cluster,max_cluster,seed,mode,secs";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternSpec {
    Bell,
    Ghz(usize),
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternSpec::Bell => f.write_str("bell"),
            PatternSpec::Ghz(m) => write!(f, "ghz{m}"),
        }
    }
}

impl FromStr for PatternSpec {
    type Err = AtgError;

    /// `bell`, `ghz3` or `ghz:3`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "bell" {
            return Ok(PatternSpec::Bell);
        }
        s.strip_prefix("ghz")
            .map(|r| r.trim_start_matches(':'))
            .and_then(|r| r.parse().ok())
            .map(PatternSpec::Ghz)
            .ok_or_else(|| AtgError::InvalidConfig(format!("unknown pattern {s:?}")))
    }
}

impl PatternSpec {
    pub fn pipeline(self, code: &CssCode, t: usize, mode: DecodeMode, exact_cap: usize) -> Result<Pipeline> {
        match self {
            PatternSpec::Bell => Pipeline::bell(code, t, mode, exact_cap),
            PatternSpec::Ghz(m) => Pipeline::ghz(code, t, m, mode, exact_cap),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = AtgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(AtgError::InvalidConfig(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub code: CssCode,
    pub t: usize,
    pub pattern: PatternSpec,
    pub p_list: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub mode: DecodeMode,
    pub exact_cap: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Worker threads; `None` reads `ATG_THREADS`, then falls back to the hardware count.
    pub threads: Option<usize>,
    /// Record wall time in the `secs` column. Off by default so that
    /// output files are reproducible byte for byte.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(code: CssCode, t: usize, p_list: Vec<f64>, trials: u64, seed: u64) -> Self {
        Self {
            code,
            t,
            pattern: PatternSpec::Bell,
            p_list,
            trials,
            seed,
            mode: DecodeMode::Auto,
            exact_cap: DEFAULT_EXACT_CAP,
            output: None,
            format: OutputFormat::Csv,
            threads: None,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(AtgError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.p_list.is_empty() {
            return Err(AtgError::InvalidConfig("empty p list".into()));
        }
        for &p in &self.p_list {
            NoiseConfig::new(p, 0)?;
        }
        if self.t == 0 {
            return Err(AtgError::InvalidConfig("T must be at least 1".into()));
        }
        if let PatternSpec::Ghz(m) = self.pattern {
            ghz_layers(self.t, m)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d: Option<usize>,
    pub ell: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub pattern: String,
    pub p: f64,
    pub trials: u64,
    pub fail_x: u64,
    pub fail_z: u64,
    pub cc_x_viol: u64,
    pub cc_z_viol: u64,
    pub resid_w_sum: u64,
    pub max_resid_w: u64,
    pub cluster_sum: u64,
    pub max_cluster: u64,
    pub seed: u64,
    pub mode: String,
    pub secs: f64,
}

impl SweepRow {
    pub fn mean_resid_w(&self) -> f64 {
        self.resid_w_sum as f64 / self.trials as f64
    }

    pub fn mean_cluster(&self) -> f64 {
        self.cluster_sum as f64 / self.trials as f64
    }

    pub fn failures(&self) -> u64 {
        self.fail_x.max(self.fail_z)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Copy, Default)]
struct Counts {
    fail_x: u64,
    fail_z: u64,
    cc_x: u64,
    cc_z: u64,
    resid: u64,
    max_resid: u64,
    cluster: u64,
    max_cluster: u64,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            fail_x: self.fail_x + o.fail_x,
            fail_z: self.fail_z + o.fail_z,
            cc_x: self.cc_x + o.cc_x,
            cc_z: self.cc_z + o.cc_z,
            resid: self.resid + o.resid,
            max_resid: self.max_resid.max(o.max_resid),
            cluster: self.cluster + o.cluster,
            max_cluster: self.max_cluster.max(o.max_cluster),
        }
    }
}

/// Thread count from `ATG_THREADS`, if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    std::env::var("ATG_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

/// Runs the sweep; trial `i` at the `j`-th listed error rate uses seed
/// `trial_seed(seed, j, i)`. Rows are sorted by `p`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let pipeline = cfg.pattern.pipeline(&cfg.code, cfg.t, cfg.mode, cfg.exact_cap)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads.or_else(env_threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| AtgError::Internal(format!("thread pool: {e}")))?;

    let mut rows = Vec::with_capacity(cfg.p_list.len());
    for (j, &p) in cfg.p_list.iter().enumerate() {
        let start = Instant::now();
        let counts = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|i| {
                    let o = pipeline.run_trial(&NoiseConfig {
                        p,
                        seed: trial_seed(cfg.seed, j as u64, i),
                    })?;
                    let resid = o.residual_weight as u64;
                    let cluster = o.max_cluster() as u64;
                    Ok(Counts {
                        fail_x: o.fail_x() as u64,
                        fail_z: o.fail_z() as u64,
                        cc_x: !o.cc_x_ok as u64,
                        cc_z: !o.cc_z_ok as u64,
                        resid,
                        max_resid: resid,
                        cluster,
                        max_cluster: cluster,
                    })
                })
                .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))
        })?;
        let secs = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
        rows.push(SweepRow {
            code: cfg.code.name.clone(),
            n: cfg.code.n,
            k: cfg.code.k,
            d: cfg.code.d,
            ell: cfg.code.ell,
            t: cfg.t,
            pattern: cfg.pattern.to_string(),
            p,
            trials: cfg.trials,
            fail_x: counts.fail_x,
            fail_z: counts.fail_z,
            cc_x_viol: counts.cc_x,
            cc_z_viol: counts.cc_z,
            resid_w_sum: counts.resid,
            max_resid_w: counts.max_resid,
            cluster_sum: counts.cluster,
            max_cluster: counts.max_cluster,
            seed: cfg.seed,
            mode: cfg.mode.to_string(),
            secs,
        });
    }
    rows.sort_by(|a, b| a.p.total_cmp(&b.p));
    let result = SweepResult { rows };
    if let Some(path) = &cfg.output {
        let text = match cfg.format {
            OutputFormat::Csv => to_csv(&result.rows),
            OutputFormat::Json => to_json(&result.rows)?,
        };
        write_atomic(path, text.as_bytes())?;
    }
    Ok(result)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let d = r.d.map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{},{:.6},{},{},{},{:.3}",
            csv_field(&r.code),
            r.n,
            r.k,
            d,
            r.ell,
            r.t,
            r.pattern,
            r.p,
            r.trials,
            r.fail_x,
            r.fail_z,
            r.cc_x_viol,
            r.cc_z_viol,
            r.mean_resid_w(),
            r.max_resid_w,
            r.mean_cluster(),
            r.max_cluster,
            r.seed,
            r.mode,
            r.secs
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    #[serde(flatten)]
    row: &'a SweepRow,
    mean_resid_w: f64,
    mean_cluster: f64,
}

pub fn to_json(rows: &[SweepRow]) -> Result<String> {
    let rows: Vec<JsonRow> = rows
        .iter()
        .map(|row| JsonRow {
            row,
            mean_resid_w: row.mean_resid_w(),
            mean_cluster: row.mean_cluster(),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).map_err(|e| AtgError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| AtgError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

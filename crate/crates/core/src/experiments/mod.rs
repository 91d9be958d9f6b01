//! Parameter sweeps over `m`: construct a channel, check both facilitator
//! codes exhaustively, estimate the no-cooperation sum rate, evaluate the
//! bounds, and persist one record per `m`.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! channels/m<m>.maccf   constructed channels
//! records.jsonl         one JSON record per line, appended as rows finish
//! records.csv           flat table written at the end
//! regions/*.poly        vertices of the linear rate regions
//! gap_vs_m.csv          gap series
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    cf_inner_region, cf_outer_region, ie_inner_sum, ie_outer_sum, ie_outer_sum_asymptotic, theorem_gap, RateRegion,
};
use crate::capacity::{estimate_sum_capacity, AltOptions, OptimizerConfig};
use crate::channel::{
    construct_channel_with, default_f, default_g, default_p, write_channel_file, ConstructOptions,
    ConstructionParams, Encoding, MemoryCap,
};
use crate::coding::{monte_carlo_error, verify_zero_error, CfCode, Orientation};
use crate::error::{Error, Result};

/// Per-`m` parameter choice: the built-in schedule or one value per entry of `m_values`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleRule<V> {
    #[default]
    Default,
    Explicit(Vec<V>),
}

impl<V: Copy> ScheduleRule<V> {
    fn pick(&self, row: usize, default: impl FnOnce() -> V) -> V {
        match self {
            Self::Default => default(),
            Self::Explicit(values) => values[row],
        }
    }
}

fn default_epsilon() -> f64 {
    0.05
}
fn default_restarts() -> usize {
    8
}
fn default_tol() -> f64 {
    1e-9
}
fn default_max_iters() -> usize {
    200
}
fn default_max_attempts() -> u32 {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub m_values: Vec<u32>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub p_override: Option<f64>,
    #[serde(default)]
    pub f_rule: ScheduleRule<u64>,
    #[serde(default)]
    pub g_rule: ScheduleRule<u32>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub monte_carlo_trials: u64,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    #[serde(skip)]
    pub cap: MemoryCap,
}

impl ExperimentConfig {
    pub fn new(m_values: Vec<u32>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            m_values,
            epsilon: default_epsilon(),
            p_override: None,
            f_rule: ScheduleRule::Default,
            g_rule: ScheduleRule::Default,
            restarts: default_restarts(),
            tol: default_tol(),
            max_iters: default_max_iters(),
            monte_carlo_trials: 0,
            seed: 0,
            output_dir: output_dir.into(),
            max_attempts: default_max_attempts(),
            cap: MemoryCap::default(),
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_values.is_empty() {
            return Err(Error::InvalidParams("m_values is empty".into()));
        }
        for &m in &self.m_values {
            if m == 0 {
                return Err(Error::InvalidParams("m must be at least 1".into()));
            }
            self.cap.check(m)?;
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParams(format!("epsilon = {} outside (0, 1)", self.epsilon)));
        }
        if let Some(p) = self.p_override {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("p_override = {p} outside [0, 1]")));
            }
        }
        let rows = self.m_values.len();
        for (name, len) in [
            ("f_rule", explicit_len(&self.f_rule)),
            ("g_rule", explicit_len(&self.g_rule)),
        ] {
            if len.is_some_and(|l| l != rows) {
                return Err(Error::InvalidParams(format!("{name} lists {} values for {rows} m values", len.unwrap())));
            }
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParams(format!("tol = {} must be nonnegative", self.tol)));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidParams("max_attempts must be positive".into()));
        }
        Ok(())
    }

    /// Construction parameters of row `row`. The row seed is `seed + m`.
    pub fn params_for(&self, row: usize) -> ConstructionParams {
        let m = self.m_values[row];
        ConstructionParams {
            m,
            p: self.p_override.unwrap_or_else(|| default_p(self.epsilon)),
            epsilon: self.epsilon,
            f_of_m: self.f_rule.pick(row, || default_f(m)),
            g_of_m: self.g_rule.pick(row, || default_g(m)),
            seed: self.seed.wrapping_add(u64::from(m)),
        }
    }
}

fn explicit_len<V>(rule: &ScheduleRule<V>) -> Option<usize> {
    match rule {
        ScheduleRule::Default => None,
        ScheduleRule::Explicit(v) => Some(v.len()),
    }
}

/// Seconds spent in each phase of a row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub construct: f64,
    pub codes: f64,
    pub optimize: f64,
    pub bounds: f64,
}

/// One row of a sweep. Fields after a failed phase stay empty and `error` says why.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub m: u32,
    pub g: u32,
    /// Facilitator link rate; equals `g`.
    pub delta: f64,
    pub p: f64,
    pub epsilon: f64,
    pub f: u64,
    pub seed: u64,
    pub attempts: Option<u32>,
    /// `2m - g` when both facilitator codes verified with no failures.
    pub cf_sum_rate: Option<f64>,
    /// Message pairs checked across both orientations.
    pub cf_pairs: Option<u64>,
    pub cf_failures: Option<u64>,
    pub cf_mc_error: Option<f64>,
    /// Best optimizer value: a lower estimate of the no-cooperation sum-capacity.
    pub ie_estimate: Option<f64>,
    pub ie_converged: Option<bool>,
    pub ie_restarts: Option<usize>,
    pub ie_inner: Option<f64>,
    pub ie_outer_finite: Option<f64>,
    pub ie_outer_asym: Option<f64>,
    /// `cf_sum_rate - ie_estimate`; over-estimates the true gap.
    pub gap: Option<f64>,
    pub gap_lower: Option<f64>,
    pub gap_upper: Option<f64>,
    pub wall_time: PhaseTimes,
    pub error: Option<String>,
}

impl ExperimentRecord {
    /// Copy with timings zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self { wall_time: PhaseTimes::default(), ..self.clone() }
    }
}

fn timed<R>(slot: &mut f64, f: impl FnOnce() -> R) -> R {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed().as_secs_f64();
    out
}

fn run_row(config: &ExperimentConfig, row: usize, channel_dir: &Path) -> ExperimentRecord {
    let params = config.params_for(row);
    let (m, g) = (params.m, params.g_of_m);
    let mut rec = ExperimentRecord {
        m,
        g,
        delta: f64::from(g),
        p: params.p,
        epsilon: params.epsilon,
        f: params.f_of_m,
        seed: params.seed,
        ..Default::default()
    };
    if let Err(e) = fill_row(config, &params, channel_dir, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill_row(config: &ExperimentConfig, params: &ConstructionParams, channel_dir: &Path, rec: &mut ExperimentRecord) -> Result<()> {
    let (m, g) = (params.m, params.g_of_m);
    let mut times = PhaseTimes::default();

    // bounds first: they never depend on the channel
    timed(&mut times.bounds, || -> Result<()> {
        rec.ie_inner = Some(ie_inner_sum::<f64>(m, g)?);
        rec.ie_outer_finite = ie_outer_sum::<f64>(m, params.epsilon, params.f_of_m).ok();
        rec.ie_outer_asym = Some(ie_outer_sum_asymptotic(m, params.epsilon));
        let gap = theorem_gap(m, rec.delta, params.epsilon)?;
        rec.gap_lower = Some(gap.lower);
        rec.gap_upper = Some(gap.upper);
        Ok(())
    })?;
    rec.wall_time = times;

    let opts = ConstructOptions { max_attempts: config.max_attempts, cap: config.cap, ..Default::default() };
    let built = timed(&mut times.construct, || construct_channel_with(params, &opts));
    rec.wall_time = times;
    let built = built?;
    rec.attempts = Some(built.attempts);
    let channel = built.channel;
    write_channel_file(channel_dir.join(format!("m{m}.maccf")), &channel, Encoding::Binary)?;

    timed(&mut times.codes, || -> Result<()> {
        let mut pairs = 0;
        let mut failures = 0;
        let mut mc_errors = Vec::new();
        for (k, orientation) in [Orientation::R1Full, Orientation::R2Full].into_iter().enumerate() {
            let code = CfCode::new(&channel, orientation)?;
            let report = verify_zero_error(&code)?;
            pairs += report.pairs_checked;
            failures += report.failures;
            if config.monte_carlo_trials > 0 {
                mc_errors.push(monte_carlo_error(&code, config.monte_carlo_trials, params.seed.wrapping_add(k as u64))?);
            }
        }
        rec.cf_pairs = Some(pairs);
        rec.cf_failures = Some(failures);
        if !mc_errors.is_empty() {
            rec.cf_mc_error = Some(mc_errors.iter().sum::<f64>() / mc_errors.len() as f64);
        }
        if failures == 0 {
            rec.cf_sum_rate = Some(f64::from(2 * m - g));
        }
        Ok(())
    })?;
    rec.wall_time = times;

    let optimizer = OptimizerConfig {
        restarts: config.restarts,
        seed: params.seed,
        alt: AltOptions { max_iters: config.max_iters, tol: config.tol, ..AltOptions::default() },
    };
    let estimate = timed(&mut times.optimize, || estimate_sum_capacity::<f64>(&channel.matrix, &optimizer));
    rec.wall_time = times;
    let estimate = estimate?;
    rec.ie_estimate = Some(estimate.value());
    rec.ie_converged = Some(estimate.best.converged);
    rec.ie_restarts = Some(estimate.restarts);
    rec.gap = rec.cf_sum_rate.map(|cf| cf - estimate.value());
    Ok(())
}

/// Runs every row in order of `m_values`, appending each finished record to
/// `records.jsonl`, then writes the CSV table and plot data. Row failures are
/// captured in the record; only configuration and I/O problems abort.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let out = &config.output_dir;
    let channel_dir = out.join("channels");
    fs::create_dir_all(&channel_dir)?;
    let jsonl_path = out.join("records.jsonl");
    File::create(&jsonl_path)?;
    let mut records = Vec::with_capacity(config.m_values.len());
    for row in 0..config.m_values.len() {
        let rec = run_row(config, row, &channel_dir);
        let mut log = OpenOptions::new().append(true).open(&jsonl_path)?;
        serde_json::to_writer(&mut log, &rec)?;
        log.write_all(b"\n")?;
        log.sync_data()?;
        records.push(rec);
    }
    export_csv(&records, out.join("records.csv"))?;
    write_plot_data(&records, out)?;
    Ok(records)
}

pub const CSV_COLUMNS: [&str; 15] = [
    "m", "g", "delta", "p", "seed", "attempts", "cf_sum_rate", "cf_pairs", "cf_failures", "ie_estimate",
    "ie_inner", "ie_outer_asym", "gap", "gap_lower", "gap_upper",
];

fn cell<V: ToString>(v: Option<V>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn require_records(records: &[ExperimentRecord]) -> Result<()> {
    if records.is_empty() {
        Err(Error::InvalidParams("no records to export".into()))
    } else {
        Ok(())
    }
}

pub fn export_csv(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<()> {
    require_records(records)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record([
            r.m.to_string(),
            r.g.to_string(),
            r.delta.to_string(),
            r.p.to_string(),
            r.seed.to_string(),
            cell(r.attempts),
            cell(r.cf_sum_rate),
            cell(r.cf_pairs),
            cell(r.cf_failures),
            cell(r.ie_estimate),
            cell(r.ie_inner),
            cell(r.ie_outer_asym),
            cell(r.gap),
            cell(r.gap_lower),
            cell(r.gap_upper),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_jsonl(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<()> {
    require_records(records)?;
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn import_jsonl(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Vertex list, one `R1 R2` pair per line after a comment header.
pub fn write_polygon(path: impl AsRef<Path>, title: &str, region: &RateRegion<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {title}")?;
    for (x, y) in region.vertices() {
        writeln!(w, "{x:.9} {y:.9}")?;
    }
    w.flush()?;
    Ok(())
}

/// Region polygons per row under `regions/` and the gap series in `gap_vs_m.csv`.
pub fn write_plot_data(records: &[ExperimentRecord], dir: impl AsRef<Path>) -> Result<()> {
    require_records(records)?;
    let dir = dir.as_ref();
    let regions = dir.join("regions");
    fs::create_dir_all(&regions)?;
    for r in records {
        write_polygon(
            regions.join(format!("cf_inner_m{}_g{}.poly", r.m, r.g)),
            &format!("cf_inner m={} g={}", r.m, r.g),
            &cf_inner_region(r.m, r.g)?,
        )?;
        write_polygon(
            regions.join(format!("cf_outer_m{}_g{}.poly", r.m, r.g)),
            &format!("cf_outer m={} delta={}", r.m, r.delta),
            &cf_outer_region(r.m, r.delta)?,
        )?;
    }
    let mut w = BufWriter::new(File::create(dir.join("gap_vs_m.csv"))?);
    writeln!(w, "# ie_estimate is an optimizer lower estimate, so gap over-estimates the true gap")?;
    writeln!(w, "m,gap,gap_lower,gap_upper,cf_sum_rate,ie_estimate,ie_outer_asym")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.m,
            cell(r.gap),
            cell(r.gap_lower),
            cell(r.gap_upper),
            cell(r.cf_sum_rate),
            cell(r.ie_estimate),
            cell(r.ie_outer_asym)
        )?;
    }
    w.flush()?;
    Ok(())
}

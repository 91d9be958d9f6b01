//! `coopcap` command-line driver.
//!
//! Results go to stdout as `key=value` lines or JSON; diagnostics go to stderr.
//! Exit status is 0 on success, 1 when the computation fails or a check does
//! not pass, and 2 on usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coopcap::bounds::{
    bound_sequences, cf_inner_region, cf_outer_region, construction_failure_bounds, ie_inner_sum, ie_outer_sum,
    ie_outer_sum_asymptotic, theorem_gap,
};
use coopcap::capacity::{estimate_sum_capacity, AltOptions, OptimizerConfig};
use coopcap::channel::{
    construct_channel_with, default_f, default_g, default_p, estimate_bad_density, read_channel_file,
    write_channel_file, ConstructOptions, ConstructionParams, Encoding, MemoryCap, DEFAULT_MAX_M,
};
use coopcap::coding::{monte_carlo_error, verify_zero_error, CfCode, Orientation};
use coopcap::experiments::{run_sweep, ExperimentConfig};
use coopcap::{Error, RateRegion64};

use format::{fixed, json_number};

const MAX_M_VAR: &str = "COOPCAP_MAX_M";

#[derive(Parser, Debug)]
#[command(name = "coopcap", version, about = "Facilitator-assisted multiple-access channels")]
#[command(after_help = "Environment: COOPCAP_MAX_M overrides the largest accepted m (default 14, at most 16).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a channel with the block property and write it to a file.
    Construct {
        #[arg(long)]
        m: u32,
        /// Bernoulli parameter of each entry [default: 1 - eps/2]
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Submatrix threshold [default: m^2, at most 2^m]
        #[arg(long)]
        f: Option<u64>,
        /// Block exponent [default: 2 ceil(log2 m), clamped to 1..=m]
        #[arg(long)]
        g: Option<u32>,
        #[arg(long, default_value_t = 100)]
        max_attempts: u32,
        /// Write rows of 0/1 characters instead of packed bits.
        #[arg(long)]
        text: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the block property and sample submatrix densities.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        density_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustively check the facilitator code on a channel file.
    CodeCheck {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OrientationArg::Both)]
        orientation: OrientationArg,
        /// Additional random message pairs to simulate (0 to skip).
        #[arg(long, default_value_t = 0)]
        mc_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the sum-capacity without cooperation.
    Capacity {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the best input laws as CSV (`index,p1,p2`).
        #[arg(long)]
        marginals: Option<PathBuf>,
    },
    /// Evaluate every closed-form bound at one m as JSON.
    Bounds {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Cooperation rate [default: g]
        #[arg(long)]
        delta: Option<f64>,
        /// Submatrix threshold [default: m^2]
        #[arg(long)]
        f: Option<u64>,
        /// Block exponent [default: 2 ceil(log2 m), clamped to 1..=m]
        #[arg(long)]
        g: Option<u32>,
        /// Bernoulli parameter for the failure bounds [default: 1 - eps/2]
        #[arg(long)]
        p: Option<f64>,
    },
    /// Run a parameter sweep described by a JSON config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    R1,
    R2,
    Both,
}

impl OrientationArg {
    fn orientations(self) -> &'static [Orientation] {
        match self {
            Self::R1 => &[Orientation::R1Full],
            Self::R2 => &[Orientation::R2Full],
            Self::Both => &[Orientation::R1Full, Orientation::R2Full],
        }
    }
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Domain(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn memory_cap() -> Result<MemoryCap, Failure> {
    match std::env::var(MAX_M_VAR) {
        Err(_) => Ok(MemoryCap::new(DEFAULT_MAX_M)),
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .map(MemoryCap::new)
            .map_err(|_| Failure::Usage(format!("{MAX_M_VAR}={v:?} is not a nonnegative integer"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: coopcap <construct|verify|code-check|capacity|bounds|sweep> [OPTIONS]");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CliResult {
    let cap = memory_cap()?;
    match command {
        Command::Construct { m, p, eps, seed, f, g, max_attempts, text, out } => {
            cap.check(m)?;
            let params = ConstructionParams {
                m,
                p: p.unwrap_or_else(|| default_p(eps)),
                epsilon: eps,
                f_of_m: f.unwrap_or_else(|| default_f(m)),
                g_of_m: g.unwrap_or_else(|| default_g(m)),
                seed,
            };
            if !params.in_guarantee_interval() {
                eprintln!("warning: p = {} is outside (1 - eps, 1)", params.p);
            }
            let built = construct_channel_with(&params, &ConstructOptions { max_attempts, cap, ..Default::default() })?;
            let encoding = if text { Encoding::Text } else { Encoding::Binary };
            write_channel_file(&out, &built.channel, encoding)?;
            let bad = built.channel.matrix.count_bad() as f64 / built.channel.matrix.num_entries() as f64;
            println!(
                "m={m} g={} f={} p={} eps={} seed={seed} attempts={} bad_fraction={} out={}",
                params.g_of_m,
                params.f_of_m,
                fixed(params.p),
                fixed(eps),
                built.attempts,
                fixed(bad),
                out.display()
            );
            Ok(())
        }
        Command::Verify { file, density_trials, seed } => {
            let mut channel = read_channel_file(&file, cap)?;
            let report = channel.verify_blocks();
            let mut line = format!(
                "m={} g={} block_property={} block_failures={}",
                channel.m(),
                channel.g(),
                if report.passed() { "pass" } else { "fail" },
                report.failures.len()
            );
            if density_trials > 0 {
                let f = usize::try_from(channel.params.f_of_m).map_err(|_| Failure::Domain("f too large".into()))?;
                let d = estimate_bad_density(&channel.matrix, f, channel.params.epsilon, density_trials, seed)?;
                line += &format!(
                    " density_trials={} density_violations={} min_bad_fraction={} submatrix_size={}",
                    d.trials,
                    d.violations,
                    fixed(d.min_bad_fraction_observed),
                    d.submatrix_size_used
                );
            }
            println!("{line}");
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Domain(format!("{} blocks without a good entry", report.failures.len())))
            }
        }
        Command::CodeCheck { file, orientation, mc_trials, seed } => {
            let mut channel = read_channel_file(&file, cap)?;
            if !channel.verify_blocks().passed() {
                return Err(Failure::Domain(format!(
                    "channel in {} lacks the block property at g = {}",
                    file.display(),
                    channel.g()
                )));
            }
            let (mut pairs, mut failures, mut mc) = (0, 0, Vec::new());
            for (k, &o) in orientation.orientations().iter().enumerate() {
                let code = CfCode::new(&channel, o)?;
                let report = verify_zero_error(&code)?;
                pairs += report.pairs_checked;
                failures += report.failures;
                if mc_trials > 0 {
                    mc.push(monte_carlo_error(&code, mc_trials, seed.wrapping_add(k as u64))?);
                }
            }
            let rate = f64::from(2 * channel.m() - channel.g());
            let mut line = format!("pairs={pairs} failures={failures} sum_rate={}", fixed(rate));
            if !mc.is_empty() {
                line += &format!(" mc_error={}", fixed(mc.iter().sum::<f64>() / mc.len() as f64));
            }
            println!("{line}");
            if failures == 0 {
                Ok(())
            } else {
                Err(Failure::Domain(format!("{failures} message pairs decoded wrongly")))
            }
        }
        Command::Capacity { file, restarts, tol, max_iters, seed, marginals } => {
            if !(tol >= 0.0) {
                return Err(Failure::Usage(format!("--tol {tol} must be nonnegative")));
            }
            let channel = read_channel_file(&file, cap)?;
            let config = OptimizerConfig {
                restarts,
                seed,
                alt: AltOptions { max_iters, tol, ..AltOptions::default() },
            };
            let est = estimate_sum_capacity::<f64>(&channel.matrix, &config)?;
            if let Some(path) = marginals {
                let mut csv = String::from("index,p1,p2\n");
                for (i, (a, b)) in est.best.p1.as_slice().iter().zip(est.best.p2.as_slice()).enumerate() {
                    csv += &format!("{},{},{}\n", i + 1, fixed(*a), fixed(*b));
                }
                std::fs::write(&path, csv).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
            }
            println!("sum_rate={} converged={} restarts={restarts}", fixed(est.value()), est.best.converged);
            Ok(())
        }
        Command::Bounds { m, eps, delta, f, g, p } => {
            println!("{}", serde_json::to_string_pretty(&bounds_report(m, eps, delta, f, g, p)?).unwrap());
            Ok(())
        }
        Command::Sweep { config } => {
            let mut cfg = ExperimentConfig::from_json_file(&config)?;
            cfg.cap = cap;
            let records = run_sweep(&cfg)?;
            let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), fixed);
            for r in &records {
                let mut line = format!(
                    "m={} g={} cf_sum_rate={} ie_estimate={} gap={} gap_lower={} gap_upper={}",
                    r.m,
                    r.g,
                    opt(r.cf_sum_rate),
                    opt(r.ie_estimate),
                    opt(r.gap),
                    opt(r.gap_lower),
                    opt(r.gap_upper)
                );
                if let Some(e) = &r.error {
                    line += &format!(" error={e:?}");
                }
                println!("{line}");
            }
            println!("records={} output_dir={}", records.len(), cfg.output_dir.display());
            Ok(())
        }
    }
}

fn region_json(region: &RateRegion64) -> Value {
    json!({
        "vertices": region.vertices().iter().map(|&(x, y)| json!([json_number(x), json_number(y)])).collect::<Vec<_>>(),
        "max_sum": json_number(region.max_sum()),
    })
}

fn bounds_report(m: u32, eps: f64, delta: Option<f64>, f: Option<u64>, g: Option<u32>, p: Option<f64>) -> Result<Value, Failure> {
    if m == 0 {
        return Err(Failure::Usage("--m must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Failure::Usage(format!("--eps {eps} outside [0, 1)")));
    }
    let g = g.unwrap_or_else(|| default_g(m));
    let f = f.unwrap_or_else(|| u64::from(m) * u64::from(m));
    let p = p.unwrap_or_else(|| default_p(eps));
    let delta = delta.unwrap_or(f64::from(g));
    let gap = theorem_gap(m, delta, eps)?;
    let sequences = bound_sequences::<f64>(m, eps, f).ok().map(|s| {
        json!({
            "k_m": json_number(s.k_m),
            "a_m": json_number(s.a_m),
            "b_m": json_number(s.b_m),
            "c_m": json_number(s.c_m),
        })
    });
    let (finite, finite_note) = match ie_outer_sum::<f64>(m, eps, f) {
        Ok(v) => (json_number(v), Value::Null),
        Err(e) => (Value::Null, Value::String(e.to_string())),
    };
    let fb = construction_failure_bounds(m, p, f, g, eps);
    Ok(json!({
        "m": m,
        "eps": json_number(eps),
        "f": f,
        "g": g,
        "delta": json_number(delta),
        "cf_inner": region_json(&cf_inner_region(m, g)?),
        "cf_outer": region_json(&cf_outer_region(m, delta)?),
        "ie_inner_sum": json_number(ie_inner_sum::<f64>(m, g)?),
        "ie_outer_sum_finite": finite,
        "ie_outer_sum_finite_note": finite_note,
        "ie_outer_sum_asymptotic": json_number(ie_outer_sum_asymptotic(m, eps)),
        "sequences": sequences,
        "theorem_gap_lower": json_number(gap.lower),
        "theorem_gap_upper": json_number(gap.upper),
        "failure_bounds": {
            "p": json_number(p),
            "block_log2": json_number(fb.block_log2),
            "block": json_number(fb.block()),
            "density_log2": json_number(fb.density_log2),
            "density": json_number(fb.density()),
            "density_closed_form": fb.density_closed_form,
        },
    }))
}

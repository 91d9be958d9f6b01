//! Exit criteria. Each test prints one `PASS`/`FAIL` line straight to stdout
//! (bypassing the harness capture) and holds a shared lock so that runtimes
//! are measured one criterion at a time.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coopcap::bounds::{
    block_bound_log2, bound_sequences, construction_failure_bounds, hull_max_sum, numeric_hull_max, HyperbolaRegion,
};
use coopcap::capacity::{
    brute_force_sum_capacity, decompose_into_uniforms, entropy_mass_bound, estimate_sum_capacity, sum_rate,
    tail_mass_bound, OptimizerConfig,
};
use coopcap::channel::{construct_channel, default_f, default_g, sample_matrix, ChannelMatrix, ConstructionParams};
use coopcap::coding::{verify_zero_error, BlockCode, CfCode, Orientation};
use coopcap::experiments::{run_sweep, ExperimentConfig, ScheduleRule};
use coopcap::ProbVector64;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u32, title: &str, budget: Duration, body: impl FnOnce() -> Result<String, String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
        other => other,
    };
    let line = match &outcome {
        Ok(detail) => format!("PASS criterion {id}: {title} ({detail}; {elapsed:.2?})\n"),
        Err(why) => format!("FAIL criterion {id}: {title} ({why})\n"),
    };
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    if let Err(why) = outcome {
        panic!("criterion {id} failed: {why}");
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn criterion_1_zero_error_facilitator_codes() {
    criterion(1, "zero-error facilitator codes at m = 6, 8, 10", Duration::from_secs(15), || {
        let mut details = Vec::new();
        for m in [6u32, 8, 10] {
            let start = Instant::now();
            let params = ConstructionParams::with_defaults(m, 0.25, 1000 + u64::from(m));
            check(params.g_of_m == default_g(m), || format!("m={m}: schedule not default"))?;
            let built = construct_channel(&params, 100).map_err(|e| format!("m={m}: {e}"))?;
            let g = params.g_of_m;
            for orientation in [Orientation::R1Full, Orientation::R2Full] {
                let code = CfCode::new(&built.channel, orientation).map_err(|e| e.to_string())?;
                let report = verify_zero_error(&code).map_err(|e| e.to_string())?;
                check(report.pairs_checked == 1u64 << (2 * m - g), || format!("m={m}: {report:?}"))?;
                check(report.failures == 0, || format!("m={m} {orientation:?}: {} failures", report.failures))?;
                check(code.sum_rate() == f64::from(2 * m - g), || format!("m={m}: rate {}", code.sum_rate()))?;
            }
            let t = start.elapsed();
            check(t < Duration::from_secs(5), || format!("m={m} took {t:?}"))?;
            details.push(format!("m={m} g={g} rate={}", 2 * m - g));
        }
        Ok(details.join(", "))
    });
}

fn random_hypothesis_triple(rng: &mut ChaCha8Rng) -> HyperbolaRegion<f64> {
    loop {
        let r = HyperbolaRegion::new(rng.gen_range(-0.5..1.5), rng.gen_range(0.2..2.0), rng.gen_range(0.05..2.0));
        if r.hypothesis_failures().is_empty() && r.extent() <= 8.0 {
            return r;
        }
    }
}

#[test]
fn criterion_2_hull_maximum_closed_form_vs_raster() {
    criterion(2, "hull maximum closed form against rasterized hull", Duration::from_secs(10), || {
        let tol = 2e-3;
        for (c, expected) in [(1.0, 5f64.sqrt() - 1.0), (1.1, 5.4f64.sqrt() - 1.0)] {
            let region = HyperbolaRegion::new(0.0, 1.0, c);
            let closed = hull_max_sum(&region).map_err(|e| e.to_string())?;
            check((closed - expected).abs() < 1e-12, || format!("c={c}: closed form {closed}"))?;
            let raster = numeric_hull_max(&region, 2000).map_err(|e| e.to_string())?;
            check((closed - raster).abs() <= tol, || format!("c={c}: {closed} vs {raster}"))?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let region = random_hypothesis_triple(&mut rng);
            let closed = hull_max_sum(&region).map_err(|e| e.to_string())?;
            let raster = numeric_hull_max(&region, 20_000).map_err(|e| e.to_string())?;
            worst = worst.max((closed - raster).abs());
            check((closed - raster).abs() <= tol, || format!("{region:?}: {closed} vs {raster}"))?;
        }
        Ok(format!("worst random deviation {worst:.2e}"))
    });
}

fn random_pmf(rng: &mut ChaCha8Rng) -> ProbVector64 {
    let n = rng.gen_range(2..=256);
    let shape = rng.gen_range(0..3);
    let w: Vec<f64> = (0..n)
        .map(|_| match shape {
            0 => rng.gen::<f64>(),
            1 => rng.gen::<f64>().powi(12),
            _ => f64::from(rng.gen_range(0u32..5)),
        })
        .collect();
    ProbVector64::normalized(w).unwrap_or_else(|_| ProbVector64::uniform(n))
}

#[test]
fn criterion_3_uniform_decomposition() {
    criterion(3, "decomposition into nested uniform laws", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = 0.0f64;
        for trial in 0..1000 {
            let p = random_pmf(&mut rng);
            let n = p.len();
            let d = decompose_into_uniforms(&p);
            check(d.is_strictly_nested(), || format!("trial {trial}: supports not strictly nested"))?;
            for (a, b) in d.reconstruct(n).iter().zip(p.as_slice()) {
                worst = worst.max((a - b).abs());
            }
            check(worst <= 1e-12, || format!("trial {trial}: reconstruction error {worst:e}"))?;
            let h = p.entropy();
            for _ in 0..10 {
                let c = rng.gen_range(f64::MIN_POSITIVE..n as f64);
                let mass = d.small_support_mass(c);
                let bound = entropy_mass_bound(h, n, c).map_err(|e| e.to_string())?;
                check(mass <= bound + 1e-12, || format!("trial {trial}: C={c} mass {mass} > {bound}"))?;
            }
        }
        Ok(format!("max reconstruction error {worst:.1e}"))
    });
}

#[test]
fn criterion_4_tail_mass_bound() {
    criterion(4, "tail mass of any subset bounded by entropy", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut violations = 0;
        for _ in 0..1000 {
            let p = random_pmf(&mut rng);
            let n = p.len();
            let t = rng.gen_range(1..n);
            let mut symbols: Vec<usize> = (0..n).collect();
            // half the subsets are the heaviest symbols, the hardest case
            if rng.gen_bool(0.5) {
                symbols.sort_by(|&a, &b| p.as_slice()[b].total_cmp(&p.as_slice()[a]));
            } else {
                symbols.shuffle(&mut rng);
            }
            let mass: f64 = symbols[..t].iter().map(|&x| p.as_slice()[x]).sum();
            let bound = tail_mass_bound(p.entropy(), n, t).map_err(|e| e.to_string())?;
            if mass > bound + 1e-12 {
                violations += 1;
            }
        }
        check(violations == 0, || format!("{violations} violations"))?;
        Ok("0 violations in 1000 draws".into())
    });
}

#[test]
fn criterion_5_optimizer_matches_grid_search() {
    criterion(5, "alternating optimizer against grid search", Duration::from_secs(120), || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst = 0.0f64;
        for k in 0..20u64 {
            let m = if k < 10 { 1 } else { 2 };
            let b = sample_matrix(m, rng.gen_range(0.1..0.9), 500 + k, Default::default()).unwrap();
            let est = estimate_sum_capacity::<f64>(&b, &OptimizerConfig { restarts: 8, seed: k, ..Default::default() })
                .map_err(|e| e.to_string())?;
            let grid = brute_force_sum_capacity::<f64>(&b, 64).map_err(|e| e.to_string())?;
            let diff = (est.value() - grid.value).abs();
            worst = worst.max(diff);
            check(diff <= 0.02, || format!("matrix {k} ({b:?}): optimizer {} vs grid {}", est.value(), grid.value))?;
        }
        Ok(format!("worst difference {worst:.2e} bits"))
    });
}

#[test]
fn criterion_6_analytic_anchors() {
    criterion(6, "analytic sum-rate anchors", Duration::from_secs(30), || {
        for m in 1..=6u32 {
            let cfg = OptimizerConfig::default();
            let zeros = estimate_sum_capacity::<f64>(&ChannelMatrix::zeros(m), &cfg).unwrap().value();
            check((zeros - 2.0 * f64::from(m)).abs() <= 1e-4, || format!("all-zeros m={m}: {zeros}"))?;
            let ones = estimate_sum_capacity::<f64>(&ChannelMatrix::ones(m), &cfg).unwrap().value();
            check(ones == 0.0, || format!("all-ones m={m}: {ones}"))?;
        }
        let anti = ChannelMatrix::from_rows(&["01", "10"]).unwrap();
        let u = ProbVector64::uniform(2);
        let v = sum_rate(&anti, &u, &u).unwrap();
        check(v == 1.5, || format!("anti-diagonal at uniform inputs: {v}"))?;
        Ok("2m, 0 and 1.5 bits reproduced".into())
    });
}

#[test]
fn criterion_7_finite_gap_bracket() {
    criterion(7, "finite-m gap bracket from a sweep at m = 8, 10, 12", Duration::from_secs(600), || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut config = ExperimentConfig::new(vec![8, 10, 12], dir.path());
        config.epsilon = 0.05;
        config.p_override = Some(0.955);
        config.g_rule = ScheduleRule::Explicit(vec![8, 8, 8]);
        config.seed = 7;
        let records = run_sweep(&config).map_err(|e| e.to_string())?;
        let mut details = Vec::new();
        for r in &records {
            let m = f64::from(r.m);
            check(r.error.is_none(), || format!("m={}: {:?}", r.m, r.error))?;
            check(r.cf_failures == Some(0), || format!("m={}: {:?} failures", r.m, r.cf_failures))?;
            let cf = r.cf_sum_rate.ok_or("missing cf rate")?;
            let ie = r.ie_estimate.ok_or("missing ie estimate")?;
            let gap = r.gap.ok_or("missing gap")?;
            check(gap >= 0.0, || format!("m={}: gap {gap}", r.m))?;
            check(2.0 * m - r.delta <= cf && cf <= 2.0 * m, || format!("m={}: cf rate {cf}", r.m))?;
            check(ie <= 2.0 * m, || format!("m={}: ie {ie}", r.m))?;
            if r.m >= 10 {
                check(ie < cf, || format!("m={}: ie {ie} not below cf {cf}", r.m))?;
            }
            details.push(format!("m={} cf={cf} ie={ie:.4} gap={gap:.4}", r.m));
        }
        Ok(details.join(", "))
    });
}

#[test]
fn criterion_8_construction_failure_bounds() {
    criterion(8, "block failure union bound", Duration::from_secs(5), || {
        let b = construction_failure_bounds(4, 0.9, default_f(4), 3, 0.2);
        check((b.block() - 27.55).abs() <= 0.01, || format!("m=4 g=3 p=0.9: {}", b.block()))?;
        let at = |m| block_bound_log2(m, default_g(m), 0.9);
        let (a, c, d) = (at(16), at(32), at(64));
        check(a > c && c > d, || format!("log2 bounds {a}, {c}, {d} not decreasing"))?;
        Ok(format!("27.55 reproduced; log2 bounds {a:.2}, {c:.2}, {d:.2}"))
    });
}

#[test]
fn criterion_9_bound_sequence_limits() {
    criterion(9, "bound sequences near their limits at m = 1000", Duration::from_secs(5), || {
        let m = 1000u32;
        let s = bound_sequences::<f64>(m, 0.1, u64::from(m) * u64::from(m)).map_err(|e| e.to_string())?;
        let (da, db, dc) = (s.a_m.abs(), (s.b_m - 1.0).abs(), (s.c_m - 1.1).abs());
        let summary = format!("|a|={da:.4}, |b-1|={db:.4}, |c-1.1|={dc:.4}");
        check(da < 0.05 && db < 0.05 && dc < 0.05, || summary.clone())?;
        Ok(summary)
    });
}

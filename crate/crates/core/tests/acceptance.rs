//! Acceptance suite. Each test prints one PASS/FAIL line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use atg_core::atg::{bell_pattern, build_atg};
use atg_core::cluster::{count_connected_sets, failure_bound, threshold_bounds};
use atg_core::code::{fixtures, logical_basis, CssCode};
use atg_core::decoder::{DecodeMode, Pipeline, DEFAULT_EXACT_CAP};
use atg_core::ghz::{ghz_layers, ghz_measurement, ghz_stabilizers};
use atg_core::harness::{run_sweep, to_csv, PatternSpec, SweepConfig};
use atg_core::mbqc::{foliate_outcomes, foliated_graph, foliated_pattern, record_from_outcomes, verify_recurrence};
use atg_core::noise::{sample_error, trial_seed, NoiseConfig};
use atg_core::stabilizers::{bell_stabilizers, verify_factorization};
use atg_core::tableau::{foliated_run, oracle_cross_check};

fn report(id: u32, name: &str, ok: bool, detail: &str, elapsed: Duration, budget: Duration) {
    let within = elapsed <= budget;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    println!(
        "criterion {id:2} {name}: {verdict} ({detail}; {:.2} s of {:.0} s)",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(within, "criterion {id} over budget: {:.2} s", elapsed.as_secs_f64());
}

#[test]
fn criterion_01_stabilizer_factorization() {
    let start = Instant::now();
    let cases: [(CssCode, &[usize]); 3] = [
        (fixtures::c422(), &[1, 2, 3]),
        (fixtures::steane(), &[1, 2]),
        (fixtures::surface13(), &[1, 2]),
    ];
    let (mut checked, mut bad) = (0usize, Vec::new());
    for (code, ts) in &cases {
        let lb = logical_basis(code);
        for &t in *ts {
            let g = build_atg(code, t).unwrap();
            let mut runs = vec![("bell".to_string(), bell_pattern(&g), bell_stabilizers(&g, &lb))];
            for m in 2..=t + 1 {
                let gp = ghz_layers(t, m).unwrap();
                runs.push((format!("ghz{m}"), ghz_measurement(&g, &gp), ghz_stabilizers(&g, &gp, &lb)));
            }
            for (name, meas, set) in &runs {
                for e in set.s0.iter().chain(&set.s1) {
                    checked += 1;
                    if !verify_factorization(&g, meas, e).ok {
                        bad.push(format!("{} T={t} {name} {}", code.name, e.label()));
                    }
                }
            }
        }
    }
    let detail = format!("{checked} elements, {} failed {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>());
    report(1, "stabilizer factorization", bad.is_empty(), &detail, start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let mut mismatches = 0;
    let mut trials = 0;
    for (code, t, p, n) in [(fixtures::c422(), 1, 0.1, 200), (fixtures::steane(), 2, 0.05, 50)] {
        let pipe = Pipeline::bell(&code, t, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
        let r = oracle_cross_check(&pipe, p, n, 17).unwrap();
        trials += r.trials;
        mismatches += r.mismatches.len();
        assert_eq!(r.passed(), r.mismatches.is_empty());
    }
    let detail = format!("{trials} trials, {mismatches} mismatches");
    report(2, "oracle equivalence", mismatches == 0, &detail, start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_03_cluster_weight_inequality() {
    let start = Instant::now();
    let pipe = Pipeline::bell(&fixtures::c422(), 3, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
    let (mut violations, mut components, mut suboptimal) = (0, 0, 0);
    for i in 0..1000 {
        let o = pipe.run_trial(&NoiseConfig::new(0.05, trial_seed(3, 0, i)).unwrap()).unwrap();
        components += o.clusters.x.components.len() + o.clusters.z.components.len();
        violations += !o.weight_ok as usize;
        suboptimal += !o.optimal as usize;
    }
    let detail = format!("1000 trials, {components} components, {violations} violations, {suboptimal} non-optimal");
    let ok = violations == 0 && suboptimal == 0;
    report(3, "cluster weight inequality", ok, &detail, start.elapsed(), Duration::from_secs(120));
}

#[test]
fn criterion_04_zero_noise() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut runs = 0;
    for code in fixtures::all() {
        for pattern in [PatternSpec::Bell, PatternSpec::Ghz(3)] {
            // exact decoding where it fits, the heuristic beyond the cap
            let pipe = pattern.pipeline(&code, 2, DecodeMode::Auto, DEFAULT_EXACT_CAP).unwrap();
            for i in 0..1000 {
                let o = pipe.run_trial(&NoiseConfig::new(0.0, trial_seed(4, 0, i)).unwrap()).unwrap();
                runs += 1;
                if !(o.success && o.residual_weight == 0 && o.cc_x_ok && o.cc_z_ok) {
                    bad.push(format!("{} {pattern} trial {i}", code.name));
                }
            }
        }
    }
    let detail = format!("{runs} trials, {} failures {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>());
    report(4, "zero noise", bad.is_empty(), &detail, start.elapsed(), Duration::from_secs(10));
}

#[test]
fn criterion_05_threshold_formulas() {
    let start = Instant::now();
    let b = threshold_bounds(4).unwrap();
    let exact = b.z == 20 && b.p0_denominator == 25_600 && b.p1_denominator == 655_360_000 && b.p2_denominator == 655_360_000;
    let code = fixtures::steane();
    let values: Vec<f64> = (0..100)
        .map(|i| failure_bound(&code, 3, b.p_star * i as f64 / 100.0, &b).unwrap())
        .collect();
    let monotone = values.windows(2).all(|w| w[0] <= w[1]);
    let detail = format!(
        "z={} p0=1/{} p1=1/{} p2=1/{}, monotone over {} points",
        b.z,
        b.p0_denominator,
        b.p1_denominator,
        b.p2_denominator,
        values.len()
    );
    report(5, "threshold formulas", exact && monotone, &detail, start.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_06_noise_monotonicity() {
    let start = Instant::now();
    let pipe = Pipeline::bell(&fixtures::steane(), 3, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
    let n = 10_000u64;
    let rate = |p: f64, stream: u64| {
        let fails = (0..n)
            .filter(|&i| !pipe.run_trial(&NoiseConfig::new(p, trial_seed(6, stream, i)).unwrap()).unwrap().success)
            .count();
        fails as f64 / n as f64
    };
    let (lo, hi) = (rate(0.001, 0), rate(0.05, 1));
    let sigma = ((lo * (1.0 - lo) + hi * (1.0 - hi)) / n as f64).sqrt();
    let gap = (hi - lo) / sigma;
    let detail = format!("rate {lo:.4} at p=0.001, {hi:.4} at p=0.05, gap {gap:.1} sigma");
    report(6, "noise monotonicity", lo < hi && gap >= 5.0, &detail, start.elapsed(), Duration::from_secs(600));
}

#[test]
fn criterion_07_ghz_bell_coherence() {
    let start = Instant::now();
    let code = fixtures::c422();
    let bell = Pipeline::bell(&code, 2, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
    let ghz = Pipeline::ghz(&code, 2, 2, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
    let mut differ = 0;
    let mut failures = 0;
    for i in 0..500 {
        let cfg = NoiseConfig::new(0.1, trial_seed(7, 0, i)).unwrap();
        let (a, b) = (bell.run_trial(&cfg).unwrap(), ghz.run_trial(&cfg).unwrap());
        failures += !a.success as usize;
        let same = a.success == b.success
            && a.logical_x_flags == b.logical_x_flags
            && a.logical_z_flags == b.logical_z_flags;
        differ += !same as usize;
    }
    let detail = format!("500 shared seeds, {failures} Bell failures, {differ} differences");
    report(7, "GHZ/Bell coherence", differ == 0, &detail, start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_08_mbqc_recurrence() {
    let start = Instant::now();
    let code = fixtures::c422();
    let passed = (0..500u64)
        .filter(|&i| {
            let (rec, f) = foliated_run(&code, 3, 0.05, trial_seed(8, 0, i)).unwrap();
            verify_recurrence(&code, &rec, &f).unwrap()
        })
        .count();

    let g = foliated_graph(&code, 3).unwrap();
    let pat = foliated_pattern(&g);
    let draw = |s| record_from_outcomes(&g, &sample_error(&g, &pat, &NoiseConfig::new(0.5, s).unwrap()).bits);
    let linear = (0..1000u64)
        .filter(|&i| {
            let (a, b) = (draw(trial_seed(8, 1, i)), draw(trial_seed(8, 2, i)));
            let (ax, az) = foliate_outcomes(&code, &a).unwrap();
            let (bx, bz) = foliate_outcomes(&code, &b).unwrap();
            let (cx, cz) = foliate_outcomes(&code, &a.xor(&b)).unwrap();
            (0..3).all(|j| cx[j] == ax[j].xor(&bx[j]) && cz[j] == az[j].xor(&bz[j]))
        })
        .count();
    let detail = format!("recurrence {passed}/500, linearity {linear}/1000");
    report(8, "MBQC recurrence", passed == 500 && linear == 1000, &detail, start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_09_connected_set_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut checks, mut worst, mut violations) = (0u64, 0.0f64, Vec::new());
    for graph in 0..30 {
        let n = rng.gen_range(4..=12);
        let density = rng.gen_range(0.1..0.5);
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(density) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        let z = adj.iter().map(Vec::len).max().unwrap() as f64;
        for _ in 0..50 {
            let t = rng.gen_range(1..=3.min(n));
            let mut anchor: Vec<usize> = (0..n).collect();
            for i in 0..t {
                let j = rng.gen_range(i..n);
                anchor.swap(i, j);
            }
            anchor.truncate(t);
            for s in t..=n {
                let count = count_connected_sets(&adj, &anchor, s).unwrap() as f64;
                let bound = z.powi((s - t) as i32) * 4f64.powi(s as i32);
                checks += 1;
                if count > bound {
                    violations.push((graph, anchor.clone(), s));
                } else if count > 0.0 {
                    worst = worst.max(count / bound);
                }
            }
        }
    }
    let detail = format!("{checks} counts, {} violations, largest count/bound {worst:.3}", violations.len());
    report(9, "connected set bound", violations.is_empty(), &detail, start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_10_reproducibility() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in [1, 2, 4] {
        let mut cfg = SweepConfig::new(fixtures::steane(), 2, vec![0.05, 0.0, 0.02], 500, 10);
        cfg.threads = Some(threads);
        let path = dir.path().join(format!("sweep{threads}.csv"));
        cfg.output = Some(path.clone());
        let r = run_sweep(&cfg).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes, to_csv(&r.rows).into_bytes());
        files.push(bytes);
    }
    let same = files.windows(2).all(|w| w[0] == w[1]);
    let detail = format!("threads 1, 2, 4 over {} bytes", files[0].len());
    report(10, "reproducibility", same, &detail, start.elapsed(), Duration::from_secs(60));
}

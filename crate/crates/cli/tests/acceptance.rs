//! End-to-end acceptance checks. Each criterion prints one `[PASS]`/`[FAIL]`
//! line; the target exits nonzero if any criterion fails.
//!
//! Run with `cargo test -p fracdim-cli --test acceptance`.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode, Stdio};

use fracdim::estimators::{bk_profile, higuchi_profile, pursuit_profile};
use fracdim::experiments::TrackingExperimentSpec;
use fracdim::{
    estimate_dimension, generate_fbm, generate_fgn, run_static, run_tracking, track, AlphaScope,
    EstimatorConfig, FbmSpec, LengthProfile, Method, StaticExperimentSpec, StaticReport,
    TimeSeries, TrackingConfig, TrackingReport,
};
use tempfile::TempDir;

const N_STATIC: usize = 1 << 15;

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u8, title: &'static str, checks: Vec<(bool, String)>) -> Outcome {
    let pass = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .into_iter()
        .map(|(ok, d)| if ok { d } else { format!("FAILED {d}") })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        id,
        title,
        pass,
        detail,
    }
}

fn static_report() -> StaticReport {
    let spec = StaticExperimentSpec {
        lengths: vec![N_STATIC],
        trials: 100,
        ..StaticExperimentSpec::default()
    };
    assert_eq!(spec.estimator.k_max, 128);
    assert_eq!(spec.alpha_inv_fraction, 1.0);
    run_static(&spec).expect("static experiment")
}

fn tracking_report() -> TrackingReport {
    let spec = TrackingExperimentSpec {
        trials: 10,
        stride: 16,
        ..TrackingExperimentSpec::default()
    };
    assert_eq!(spec.window, 1 << 12);
    assert_eq!(spec.band, 0.05);
    assert_eq!(spec.hold_steps(), 100 / 16);
    run_tracking(&spec).expect("tracking experiment")
}

fn static_stats(r: &StaticReport, m: Method) -> (f64, f64, Vec<f64>) {
    let cell = r.cell(N_STATIC, m).unwrap();
    let s = cell.stats.expect("no successful trials");
    assert!(!cell.partial, "{m}: failed trials");
    (s.mean, s.std_dev, cell.dimensions())
}

fn c1(r: &StaticReport) -> Outcome {
    let (mean, sd, v) = static_stats(r, Method::Higuchi);
    outcome(
        1,
        "static accuracy, Higuchi",
        vec![
            (v.len() >= 30, format!("trials {}", v.len())),
            (
                (1.48..=1.52).contains(&mean),
                format!("mean {mean:.6} (sd {sd:.2e}) in [1.48, 1.52]"),
            ),
        ],
    )
}

fn c2(r: &StaticReport) -> Outcome {
    let (pm, psd, _) = static_stats(r, Method::Pursuit);
    let (hm, _, _) = static_stats(r, Method::Higuchi);
    let alpha = r.cell(N_STATIC, Method::Pursuit).unwrap().alpha.unwrap();
    outcome(
        2,
        "static accuracy, pursuit alpha = 1/N",
        vec![
            (alpha == 1.0 / N_STATIC as f64, format!("alpha {alpha:e}")),
            (
                (1.48..=1.52).contains(&pm),
                format!("mean {pm:.6} (sd {psd:.2e}) in [1.48, 1.52]"),
            ),
            (
                (pm - hm).abs() < 0.01,
                format!("|pursuit - higuchi| {:.2e} < 0.01", (pm - hm).abs()),
            ),
        ],
    )
}

fn c3(r: &StaticReport) -> Outcome {
    let (bm, _, _) = static_stats(r, Method::Bk);
    let (hm, _, _) = static_stats(r, Method::Higuchi);
    outcome(
        3,
        "BK bias direction",
        vec![
            (bm > hm, format!("bk {bm:.6} > higuchi {hm:.6}")),
            (bm > 1.5, format!("bk {bm:.6} > 1.5")),
        ],
    )
}

fn c4(r: &StaticReport) -> Outcome {
    let (_, psd, _) = static_stats(r, Method::Pursuit);
    let (_, hsd, _) = static_stats(r, Method::Higuchi);
    outcome(
        4,
        "variance ordering",
        vec![(
            psd > hsd,
            format!("sd pursuit {psd:.6e} > higuchi {hsd:.6e}"),
        )],
    )
}

fn conv(r: &TrackingReport, label: &str) -> Option<usize> {
    r.trace(label).unwrap().convergence_step
}

fn c5(r: &TrackingReport) -> Outcome {
    let key = |s: Option<usize>| s.unwrap_or(usize::MAX);
    let labels = ["pursuit_a4", "pursuit_a2", "pursuit_a1", "higuchi"];
    let steps: Vec<Option<usize>> = labels.iter().map(|l| conv(r, l)).collect();
    let shown = labels
        .iter()
        .zip(&steps)
        .map(|(l, s)| format!("{l} {}", s.map_or("none".into(), |s| s.to_string())))
        .collect::<Vec<_>>()
        .join(" <= ");
    let alphas: Vec<f64> = labels[..3]
        .iter()
        .map(|l| r.trace(l).unwrap().series.alpha.unwrap() * 4096.0)
        .collect();
    outcome(
        5,
        "tracking convergence ordering",
        vec![
            (
                alphas
                    .iter()
                    .zip([4.0, 2.0, 1.0])
                    .all(|(a, e)| (a - e).abs() < 1e-9),
                format!("alpha * n = {alphas:?}"),
            ),
            (
                steps.iter().all(Option::is_some),
                "all mean traces converge".into(),
            ),
            (steps.windows(2).all(|w| key(w[0]) <= key(w[1])), shown),
        ],
    )
}

fn c6(r: &TrackingReport) -> Outcome {
    let sd = |l| r.trace(l).unwrap().tail_std_dev(0.25).unwrap();
    let (a4, a1) = (sd("pursuit_a4"), sd("pursuit_a1"));
    outcome(
        6,
        "stability trade-off",
        vec![(
            a4 > a1,
            format!("tail sd alpha=4/n {a4:.4e} > alpha=1/n {a1:.4e}"),
        )],
    )
}

fn c7(r: &TrackingReport) -> Outcome {
    let higuchi = r.trace("higuchi").unwrap();
    let late: Vec<f64> = r
        .steps
        .iter()
        .zip(&higuchi.mean)
        .filter(|(s, _)| s.position >= 8192)
        .filter_map(|(_, v)| *v)
        .collect();
    let gaps = r
        .steps
        .iter()
        .zip(&higuchi.mean)
        .filter(|(s, v)| s.position >= 8192 && v.is_none())
        .count();
    let worst = late.iter().map(|v| (v - 1.5).abs()).fold(0.0, f64::max);
    outcome(
        7,
        "late-trace plateau",
        vec![
            (
                !late.is_empty() && gaps == 0,
                format!("{} steps, {gaps} gaps", late.len()),
            ),
            (worst <= 0.1, format!("max |D - 1.5| {worst:.4} <= 0.1")),
        ],
    )
}

/// `x(i)`, 1-based.
fn x(s: &[f64], i: usize) -> f64 {
    s[i - 1]
}

fn brute_higuchi(s: &[f64], k: usize) -> f64 {
    let n = s.len();
    let mut acc = 0.0;
    for m in 1..=k {
        let big_m = (n - m) / k;
        let sum: f64 = (1..=big_m)
            .map(|i| (x(s, m + i * k) - x(s, m + (i - 1) * k)).abs())
            .sum();
        acc += sum * ((n - 1) as f64 / (big_m * k) as f64) / k as f64;
    }
    acc / k as f64
}

fn brute_pursuit(s: &[f64], k: usize, alpha: f64) -> f64 {
    let n = s.len();
    let mut acc = 0.0;
    for m in 1..=k {
        let big_m = (n - m) / k;
        let a = alpha * n as f64 / big_m as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 1..=big_m {
            let w = (1.0 - a).powi((big_m - i) as i32);
            num += w * (x(s, m + i * k) - x(s, m + (i - 1) * k)).abs();
            den += w;
        }
        acc += num / den * (n - 1) as f64 / (k * k) as f64;
    }
    acc / k as f64
}

fn brute_bk(s: &[f64], k: usize) -> f64 {
    let mean = |j: usize| ((j - 1) * k + 1..=j * k).map(|t| x(s, t)).sum::<f64>() / k as f64;
    (1..s.len() / k)
        .map(|j| (mean(j + 1) - mean(j)).abs())
        .sum::<f64>()
        / k as f64
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn profile_matches(p: &LengthProfile, f: impl Fn(usize) -> f64, tol: f64) -> bool {
    p.entries().iter().all(|e| rel_close(e.length, f(e.k), tol))
}

/// Random short series: fractional Gaussian noise or its path, 16..=64 samples.
fn random_series() -> Vec<TimeSeries> {
    (0..300u64)
        .map(|seed| {
            let n = 16 + (seed as usize * 37) % 49;
            let hurst = [0.2, 0.5, 0.8][seed as usize % 3];
            let spec = FbmSpec::new(hurst, n, 5000 + seed).unwrap();
            if seed % 2 == 0 {
                generate_fgn(&spec)
            } else {
                generate_fbm(&spec)
            }
        })
        .collect()
}

fn k_max_for(n: usize) -> usize {
    (n / 4).min(8)
}

fn fracdim_cli(args: &[&str], cwd: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_fracdim"))
        .args(args)
        .current_dir(cwd)
        .stdout(Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn manifest_replay_identical() -> (bool, String) {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let runs: [&[&str]; 3] = [
        &[
            "fbm", "--hurst", "0.5", "--n", "4096", "--seed", "9", "--out", "f.csv",
        ],
        &[
            "track",
            "-i",
            "f.csv",
            "--window",
            "1024",
            "--stride",
            "64",
            "--method",
            "pursuit",
            "--alpha-inv",
            "0.25n",
            "--k-max",
            "32",
            "--out",
            "t.csv",
        ],
        &[
            "experiment",
            "table1",
            "--trials",
            "2",
            "--lengths",
            "4096",
            "--k-max",
            "32",
            "--out-dir",
            "ex",
        ],
    ];
    if !runs.iter().all(|a| fracdim_cli(a, d)) {
        return (false, "initial runs failed".into());
    }
    let files = [
        "f.csv",
        "f.csv.manifest.json",
        "t.csv",
        "t.csv.manifest.json",
        "ex/table1.csv",
        "ex/table1_trials.csv",
        "ex/table1.manifest.json",
    ];
    let before: Vec<Vec<u8>> = files.iter().map(|f| fs::read(d.join(f)).unwrap()).collect();
    for m in [
        "f.csv.manifest.json",
        "t.csv.manifest.json",
        "ex/table1.manifest.json",
    ] {
        if !fracdim_cli(&["--from-manifest", m], d) {
            return (false, format!("replay of {m} failed"));
        }
    }
    let same = files
        .iter()
        .zip(&before)
        .all(|(f, b)| &fs::read(d.join(f)).unwrap() == b);
    (
        same,
        format!("{} files byte-identical after replay", files.len()),
    )
}

fn c8() -> Outcome {
    let series = random_series();
    let mut oracle_ok = true;
    let mut alpha0_ok = true;
    for s in &series {
        let v = s.samples();
        let cfg = EstimatorConfig::new(k_max_for(v.len()));
        let alpha = 0.5 / v.len() as f64;
        let h = higuchi_profile(s, &cfg).unwrap();
        oracle_ok &= profile_matches(&h, |k| brute_higuchi(v, k), 1e-10);
        oracle_ok &= profile_matches(&bk_profile(s, &cfg).unwrap(), |k| brute_bk(v, k), 1e-10);
        let p = pursuit_profile(s, &cfg.with_alpha(alpha)).unwrap();
        oracle_ok &= profile_matches(&p, |k| brute_pursuit(v, k, alpha), 1e-10);

        for scope in [AlphaScope::Subsequence, AlphaScope::Window] {
            let p0 = pursuit_profile(s, &cfg.with_alpha(0.0).with_alpha_scope(scope)).unwrap();
            alpha0_ok &= p0
                .entries()
                .iter()
                .zip(h.entries())
                .all(|(a, b)| a.k == b.k && rel_close(a.length, b.length, 1e-12));
        }
    }

    let mut ramp_worst: f64 = 0.0;
    for n in [64usize, 257, 1000, 4096] {
        let ramp = TimeSeries::new((0..n).map(|i| 2.5 * i as f64 - 7.0).collect()).unwrap();
        let cfg = EstimatorConfig::new(n / 8).with_alpha(1.0 / n as f64);
        for m in [Method::Higuchi, Method::Pursuit] {
            let d = estimate_dimension(&ramp, m, &cfg).unwrap().dimension;
            ramp_worst = ramp_worst.max((d - 1.0).abs());
        }
    }

    let mut invariance_worst: f64 = 0.0;
    for seed in 0..10u64 {
        let s = generate_fbm(&FbmSpec::new(0.6, 1024, 70 + seed).unwrap());
        let moved = TimeSeries::new(s.samples().iter().map(|v| -3.7 * v + 1e3).collect()).unwrap();
        let cfg = EstimatorConfig::new(32).with_alpha(1.0 / 1024.0);
        for m in Method::ALL {
            let a = estimate_dimension(&s, m, &cfg).unwrap().dimension;
            let b = estimate_dimension(&moved, m, &cfg).unwrap().dimension;
            invariance_worst = invariance_worst.max((a - b).abs());
        }
    }

    let path = generate_fbm(&FbmSpec::new(0.5, 3000, 77).unwrap());
    let mut stride_ok = true;
    for m in Method::ALL {
        let base = TrackingConfig::new(512, m, EstimatorConfig::new(16).with_alpha(1.0 / 512.0));
        let dense = track(&path, &base).unwrap();
        let sparse = track(&path, &base.with_stride(7)).unwrap();
        stride_ok &= sparse.steps.len() == (3000 - 512) / 7 + 1;
        stride_ok &= sparse.steps.iter().enumerate().all(|(j, s)| {
            let d = &dense.steps[7 * j];
            s.window_start == d.window_start && s.dimension == d.dimension
        });
    }

    let (replay_ok, replay_detail) = manifest_replay_identical();
    outcome(
        8,
        "property suite",
        vec![
            (
                oracle_ok,
                format!(
                    "brute-force oracles on {} random series (1e-10)",
                    series.len()
                ),
            ),
            (alpha0_ok, "alpha = 0 pursuit equals Higuchi (1e-12)".into()),
            (
                ramp_worst < 1e-12,
                format!("ramp |D - 1| max {ramp_worst:.1e}"),
            ),
            (
                invariance_worst < 1e-9,
                format!("scale/offset |dD| max {invariance_worst:.1e}"),
            ),
            (
                stride_ok,
                "stride-7 traces subsample stride-1 traces".into(),
            ),
            (replay_ok, replay_detail),
        ],
    )
}

fn c9() -> Outcome {
    let n = 1 << 15;
    let lags = [1usize, 2, 4, 8, 16, 32, 64];
    let mut checks = Vec::new();
    for hurst in [0.5, 0.7] {
        let mut msi = vec![0.0; lags.len()];
        for seed in 0..20u64 {
            let p = generate_fbm(&FbmSpec::new(hurst, n, 900 + seed).unwrap());
            let v = p.samples();
            for (acc, &lag) in msi.iter_mut().zip(&lags) {
                *acc += v
                    .windows(lag + 1)
                    .map(|w| (w[lag] - w[0]).powi(2))
                    .sum::<f64>()
                    / (n - lag) as f64;
            }
        }
        let lx: Vec<f64> = lags.iter().map(|&l| (l as f64).ln()).collect();
        let ly: Vec<f64> = msi.iter().map(|m| (m / 20.0).ln()).collect();
        let mx = lx.iter().sum::<f64>() / lx.len() as f64;
        let my = ly.iter().sum::<f64>() / ly.len() as f64;
        let slope = lx
            .iter()
            .zip(&ly)
            .map(|(a, b)| (a - mx) * (b - my))
            .sum::<f64>()
            / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        checks.push((
            (slope - 2.0 * hurst).abs() <= 0.1,
            format!("H {hurst}: slope {slope:.4} vs {}", 2.0 * hurst),
        ));
    }
    outcome(9, "FBM variance scaling", checks)
}

fn main() -> ExitCode {
    let static_r = static_report();
    let tracking_r = tracking_report();
    let outcomes = [
        c1(&static_r),
        c2(&static_r),
        c3(&static_r),
        c4(&static_r),
        c5(&tracking_r),
        c6(&tracking_r),
        c7(&tracking_r),
        c8(),
        c9(),
    ];
    for o in &outcomes {
        println!(
            "[{}] criterion {}: {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail
        );
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

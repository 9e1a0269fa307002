use std::fs;
use std::io::{self, Write};
use std::path::Path;

use fracdim::estimators::{self, AlphaScope, KSchedule, PursuitNormalization};
use fracdim::experiments::{
    alpha_from_inv_fraction, switching_series, HalfScaling, StaticReport, TrackingReport,
};
use fracdim::{
    generate_fbm, loglog_fit, run_static, run_tracking, track, Alignment, EstimatorConfig, FbmSpec,
    Method, StaticExperimentSpec, TrackingConfig, TrackingExperimentSpec,
};

use crate::args::{
    Command, EstimateArgs, EstimatorArgs, ExperimentArgs, ExperimentName, FbmArgs, SwitchArgs,
    TrackArgs,
};
use crate::csvio::{fmt_f64, fmt_opt, read_series, write_series, CsvOut};
use crate::error::{CliError, CliResult};
use crate::manifest::{sidecar_for, RunManifest};

pub fn run(cmd: &Command, timestamp: Option<u64>) -> CliResult<()> {
    let manifest = RunManifest::new(cmd, timestamp);
    match cmd {
        Command::Fbm(a) => cmd_fbm(a, &manifest),
        Command::Switch(a) => cmd_switch(a, &manifest),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Track(a) => cmd_track(a, &manifest),
        Command::Experiment(a) => cmd_experiment(a, &manifest),
    }
}

fn parse<T: std::str::FromStr<Err = fracdim::Error>>(s: &str) -> CliResult<T> {
    s.parse().map_err(CliError::from)
}

/// Resolves `--alpha-inv` forms `n`, `0.25n`, `1024` against length `n`.
pub fn resolve_alpha_inv(spec: &str, n: usize) -> CliResult<f64> {
    let bad = || CliError::Config(format!("--alpha-inv: cannot parse '{spec}'"));
    let s = spec.trim();
    let reciprocal = match s.strip_suffix('n') {
        Some("") => n as f64,
        Some(coef) => {
            coef.trim_end_matches('*')
                .parse::<f64>()
                .map_err(|_| bad())?
                * n as f64
        }
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    if !reciprocal.is_finite() || reciprocal <= 1.0 {
        return Err(CliError::Config(format!(
            "--alpha-inv must resolve to a value above 1, got {reciprocal}"
        )));
    }
    Ok(1.0 / reciprocal)
}

fn estimator_config(
    a: &EstimatorArgs,
    n: usize,
    default_k_max: usize,
) -> CliResult<(Method, EstimatorConfig)> {
    let method: Method = parse(&a.method)?;
    let mut cfg = EstimatorConfig::new(a.k_max.unwrap_or(default_k_max))
        .with_schedule(parse::<KSchedule>(&a.schedule)?)
        .with_alpha_scope(parse::<AlphaScope>(&a.alpha_scope)?);
    if a.as_printed {
        cfg = cfg.with_normalization(PursuitNormalization::AsPrinted);
    }
    cfg.alpha = match (&a.alpha, &a.alpha_inv) {
        (Some(alpha), _) => Some(*alpha),
        (None, Some(inv)) => Some(resolve_alpha_inv(inv, n)?),
        (None, None) => None,
    };
    if method == Method::Pursuit && cfg.alpha.is_none() {
        return Err(CliError::Config(
            "--method pursuit requires --alpha or --alpha-inv".into(),
        ));
    }
    Ok((method, cfg))
}

fn cmd_fbm(a: &FbmArgs, manifest: &RunManifest) -> CliResult<()> {
    let spec = FbmSpec::new(a.hurst, a.n, a.seed)
        .map_err(|e| CliError::Config(format!("--hurst/--n: {e}")))?;
    let path = generate_fbm(&spec);
    write_series(&a.out, &path, &manifest.comments("series"))?;
    manifest.write(&sidecar_for(&a.out))
}

fn cmd_switch(a: &SwitchArgs, manifest: &RunManifest) -> CliResult<()> {
    let spec = TrackingExperimentSpec {
        half_length: a.half_length,
        hurst_first: a.hurst_first,
        hurst_second: a.hurst_second,
        half_scaling: parse::<HalfScaling>(&a.scaling)?,
        ..TrackingExperimentSpec::default()
    };
    let x = switching_series(&spec, a.seed)?;
    write_series(&a.out, &x, &manifest.comments("series"))?;
    manifest.write(&sidecar_for(&a.out))
}

fn cmd_estimate(a: &EstimateArgs) -> CliResult<()> {
    let x = read_series(&a.input)?;
    let (method, cfg) = estimator_config(&a.estimator, x.len(), EstimatorConfig::SERIES_K_MAX)?;
    let profile = match method {
        Method::Higuchi => estimators::higuchi_profile(&x, &cfg),
        Method::Bk => estimators::bk_profile(&x, &cfg),
        Method::Pursuit => estimators::pursuit_profile(&x, &cfg),
    }?;
    let est = loglog_fit(&profile)?;
    if !est.in_planar_range() {
        eprintln!(
            "warning: dimension {} lies outside [1, 2]",
            fmt_f64(est.dimension)
        );
    }

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "method,{method}")?;
    if let Some(alpha) = cfg.alpha.filter(|_| method == Method::Pursuit) {
        writeln!(out, "alpha,{}", fmt_f64(alpha))?;
    }
    writeln!(out, "n_samples,{}", x.len())?;
    writeln!(out, "dimension,{}", fmt_f64(est.dimension))?;
    writeln!(out, "intercept,{}", fmt_f64(est.intercept))?;
    writeln!(out, "r_squared,{}", fmt_f64(est.r_squared))?;
    writeln!(out, "n_points,{}", est.n_points)?;
    if a.profile {
        writeln!(out)?;
        writeln!(out, "k,length")?;
        for e in profile.entries() {
            writeln!(out, "{},{}", e.k, fmt_f64(e.length))?;
        }
    }
    Ok(())
}

fn cmd_track(a: &TrackArgs, manifest: &RunManifest) -> CliResult<()> {
    let x = read_series(&a.input)?;
    let (method, est) = estimator_config(&a.estimator, a.window, EstimatorConfig::WINDOW_K_MAX)?;
    let cfg = TrackingConfig::new(a.window, method, est)
        .with_stride(a.stride)
        .with_alignment(parse::<Alignment>(&a.alignment)?);
    let trace = track(&x, &cfg)?;

    let mut out = CsvOut::create(&a.out, &manifest.comments("trace"))?;
    out.record(["step", "window_start", "dimension"])?;
    for s in &trace.steps {
        out.record([
            s.step.to_string(),
            s.window_start.to_string(),
            fmt_opt(s.dimension),
        ])?;
    }
    out.finish()?;
    manifest.write(&sidecar_for(&a.out))
}

fn cmd_experiment(a: &ExperimentArgs, manifest: &RunManifest) -> CliResult<()> {
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", a.out_dir.display())))?;
    let trials = a.trials.unwrap_or(if a.fast { 10 } else { 100 });
    let scope = parse::<AlphaScope>(&a.alpha_scope)?;
    match a.name {
        ExperimentName::Table1 => {
            let defaults = StaticExperimentSpec::default();
            let spec = StaticExperimentSpec {
                lengths: a.lengths.clone().unwrap_or(defaults.lengths),
                hurst: a.hurst.unwrap_or(defaults.hurst),
                trials,
                base_seed: a.seed,
                estimator: EstimatorConfig::new(a.k_max.unwrap_or(EstimatorConfig::SERIES_K_MAX))
                    .with_alpha_scope(scope),
                alpha_inv_fraction: a.alpha_inv_fraction.unwrap_or(defaults.alpha_inv_fraction),
                ..defaults
            };
            let report = run_static(&spec)?;
            write_table1(&a.out_dir, &report, manifest)?;
            print_table1(&report);
        }
        ExperimentName::Figure1 => {
            let defaults = TrackingExperimentSpec::default();
            let window = a.window.unwrap_or(defaults.window);
            let alphas = match &a.alpha_inv_fractions {
                Some(fr) => fr
                    .iter()
                    .map(|&f| alpha_from_inv_fraction(f, window))
                    .collect(),
                None => fracdim::experiments::ALPHA_INV_FRACTIONS
                    .iter()
                    .map(|&f| alpha_from_inv_fraction(f, window))
                    .collect(),
            };
            let spec = TrackingExperimentSpec {
                half_length: a.half_length.unwrap_or(defaults.half_length),
                window,
                alphas,
                trials,
                stride: a.stride.unwrap_or(defaults.stride),
                base_seed: a.seed,
                estimator: EstimatorConfig::new(a.k_max.unwrap_or(EstimatorConfig::WINDOW_K_MAX))
                    .with_alpha_scope(scope),
                alignment: match &a.alignment {
                    Some(s) => parse(s)?,
                    None => defaults.alignment,
                },
                half_scaling: match &a.scaling {
                    Some(s) => parse(s)?,
                    None => defaults.half_scaling,
                },
                band: a.band.unwrap_or(defaults.band),
                hold: a.hold.unwrap_or(defaults.hold),
                ..defaults
            };
            let report = run_tracking(&spec)?;
            write_figure1(&a.out_dir, &report, manifest, a.plot_data)?;
            print_figure1(&report);
        }
    }
    manifest.write(&a.out_dir.join(format!("{}.manifest.json", a.name.as_str())))
}

fn write_table1(dir: &Path, report: &StaticReport, manifest: &RunManifest) -> CliResult<()> {
    let comments = manifest.comments("table1");
    let mut out = CsvOut::create(&dir.join("table1.csv"), &comments)?;
    out.record(["length", "method", "mean", "std_dev", "std_err", "trials"])?;
    for c in &report.cells {
        let s = c.stats;
        out.record([
            c.length.to_string(),
            c.method.to_string(),
            fmt_opt(s.map(|s| s.mean)),
            fmt_opt(s.map(|s| s.std_dev)),
            fmt_opt(s.map(|s| s.std_err)),
            s.map(|s| s.trials).unwrap_or(0).to_string(),
        ])?;
    }
    out.finish()?;

    let mut out = CsvOut::create(&dir.join("table1_trials.csv"), &comments)?;
    out.record(["length", "method", "seed", "dimension", "error"])?;
    for c in &report.cells {
        for v in &c.values {
            out.record([
                c.length.to_string(),
                c.method.to_string(),
                v.seed.to_string(),
                fmt_opt(v.dimension),
                v.error.clone().unwrap_or_default(),
            ])?;
        }
    }
    out.finish()
}

fn print_table1(report: &StaticReport) {
    println!("length,method,mean,std_dev,std_err,trials");
    for c in &report.cells {
        match c.stats {
            Some(s) => println!(
                "{},{},{:.6},{:.3e},{:.3e},{}{}",
                c.length,
                c.method,
                s.mean,
                s.std_dev,
                s.std_err,
                s.trials,
                if c.partial { " (partial)" } else { "" }
            ),
            None => println!("{},{},,,,0 (all trials failed)", c.length, c.method),
        }
    }
}

fn write_figure1(
    dir: &Path,
    report: &TrackingReport,
    manifest: &RunManifest,
    plot_data: bool,
) -> CliResult<()> {
    let comments = manifest.comments("figure1");
    let labels: Vec<&str> = report
        .traces
        .iter()
        .map(|t| t.series.label.as_str())
        .collect();

    let mut out = CsvOut::create(&dir.join("figure1.csv"), &comments)?;
    out.record(std::iter::once("step").chain(labels.iter().copied()))?;
    for (i, step) in report.steps.iter().enumerate() {
        out.record(
            std::iter::once(step.position.to_string())
                .chain(report.traces.iter().map(|t| fmt_opt(t.mean[i]))),
        )?;
    }
    out.finish()?;

    let mut out = CsvOut::create(&dir.join("figure1_convergence.csv"), &comments)?;
    out.record([
        "series",
        "method",
        "alpha",
        "convergence_step",
        "convergence_position",
        "tail_std_dev",
    ])?;
    for t in &report.traces {
        out.record([
            t.series.label.clone(),
            t.series.method.to_string(),
            fmt_opt(t.series.alpha),
            t.convergence_step
                .map(|s| s.to_string())
                .unwrap_or_default(),
            t.convergence_step
                .and_then(|s| report.position_of(s))
                .map(|p| p.to_string())
                .unwrap_or_default(),
            fmt_opt(t.tail_std_dev(0.25)),
        ])?;
    }
    out.finish()?;

    let mut out = CsvOut::create(&dir.join("figure1_trials.csv"), &comments)?;
    out.record(["series", "seed", "convergence_step"])?;
    for t in &report.traces {
        for (seed, step) in report.trial_seeds.iter().zip(&t.trial_convergence_steps) {
            out.record([
                t.series.label.clone(),
                seed.to_string(),
                step.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    out.finish()?;

    if plot_data {
        let mut out = CsvOut::create(&dir.join("figure1_long.csv"), &comments)?;
        out.record(["step", "series_label", "value"])?;
        for t in &report.traces {
            for (step, v) in report.steps.iter().zip(&t.mean) {
                if let Some(v) = v {
                    out.record([
                        step.position.to_string(),
                        t.series.label.clone(),
                        fmt_f64(*v),
                    ])?;
                }
            }
        }
        out.finish()?;
    }
    Ok(())
}

fn print_figure1(report: &TrackingReport) {
    println!("series,alpha,convergence_step,convergence_position,tail_std_dev");
    for t in &report.traces {
        println!(
            "{},{},{},{},{}",
            t.series.label,
            t.series
                .alpha
                .map(|a| format!("{a:.6e}"))
                .unwrap_or_default(),
            t.convergence_step
                .map(|s| s.to_string())
                .unwrap_or_else(|| "none".into()),
            t.convergence_step
                .and_then(|s| report.position_of(s))
                .map(|p| p.to_string())
                .unwrap_or_else(|| "none".into()),
            t.tail_std_dev(0.25)
                .map(|s| format!("{s:.4e}"))
                .unwrap_or_default(),
        );
    }
}

//! Monte-Carlo replication harness: static accuracy on FBM paths and
//! tracking on the regime-switching series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_slice, EstimatorConfig, Method};
use crate::fbm::{generate_fbm, FbmSpec};
use crate::series::{summarize, synthesize_switch_series, SummaryStats, TimeSeries};
use crate::tracking::{convergence_step, track, Alignment, TrackingConfig};

/// The four forgetting factors `1/n, 1/(0.5 n), 1/(0.3 n), 1/(0.25 n)`.
pub const ALPHA_INV_FRACTIONS: [f64; 4] = [1.0, 0.5, 0.3, 0.25];

/// `alpha = 1 / (fraction * n)`.
pub fn alpha_from_inv_fraction(fraction: f64, n: usize) -> f64 {
    1.0 / (fraction * n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticExperimentSpec {
    pub lengths: Vec<usize>,
    pub hurst: f64,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub estimator: EstimatorConfig,
    /// Pursuit runs use `alpha = 1 / (fraction * N)` with `N` the series length.
    pub alpha_inv_fraction: f64,
}

impl Default for StaticExperimentSpec {
    fn default() -> Self {
        Self {
            lengths: vec![1 << 15, 1 << 16, 1 << 17],
            hurst: 0.5,
            trials: 100,
            methods: Method::ALL.to_vec(),
            base_seed: 1,
            estimator: EstimatorConfig::new(EstimatorConfig::SERIES_K_MAX),
            alpha_inv_fraction: 1.0,
        }
    }
}

impl StaticExperimentSpec {
    /// Ten trials, for quick checks.
    pub fn fast() -> Self {
        Self {
            trials: 10,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.lengths.is_empty() || self.methods.is_empty() {
            return Err(Error::Config(
                "at least one length and one method are required".into(),
            ));
        }
        if self.alpha_inv_fraction.is_nan() || self.alpha_inv_fraction <= 0.0 {
            return Err(Error::Config("alpha fraction must be positive".into()));
        }
        for &n in &self.lengths {
            FbmSpec::new(self.hurst, n, 0)?;
            self.estimator_for(n).validate(n)?;
        }
        Ok(())
    }

    fn estimator_for(&self, length: usize) -> EstimatorConfig {
        self.estimator
            .with_alpha(alpha_from_inv_fraction(self.alpha_inv_fraction, length))
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialValue {
    pub seed: u64,
    pub dimension: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticCell {
    pub length: usize,
    pub method: Method,
    pub alpha: Option<f64>,
    /// Summary over the successful trials; `None` if every trial failed.
    pub stats: Option<SummaryStats>,
    /// Set when some trials failed; `stats.trials` then counts the successes.
    pub partial: bool,
    pub values: Vec<TrialValue>,
}

impl StaticCell {
    pub fn dimensions(&self) -> Vec<f64> {
        self.values.iter().filter_map(|v| v.dimension).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticReport {
    pub spec: StaticExperimentSpec,
    pub cells: Vec<StaticCell>,
}

impl StaticReport {
    pub fn cell(&self, length: usize, method: Method) -> Option<&StaticCell> {
        self.cells
            .iter()
            .find(|c| c.length == length && c.method == method)
    }
}

/// Estimates every method on `trials` independent FBM paths per length.
/// Trial `t` uses seed `base_seed + t`, and all methods see the same path.
pub fn run_static(spec: &StaticExperimentSpec) -> Result<StaticReport> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.lengths.len() * spec.methods.len());
    for &length in &spec.lengths {
        let est_cfg = spec.estimator_for(length);
        // Per trial, one result per method.
        let per_trial: Vec<Vec<TrialValue>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let seed = spec.trial_seed(t);
                let path = generate_fbm(&FbmSpec::new(spec.hurst, length, seed)?);
                Ok(spec
                    .methods
                    .iter()
                    .map(|&m| match estimate_slice(path.samples(), m, &est_cfg) {
                        Ok(est) => TrialValue {
                            seed,
                            dimension: Some(est.dimension),
                            error: None,
                        },
                        Err(e) => TrialValue {
                            seed,
                            dimension: None,
                            error: Some(e.to_string()),
                        },
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;

        for (mi, &method) in spec.methods.iter().enumerate() {
            let values: Vec<TrialValue> = per_trial.iter().map(|row| row[mi].clone()).collect();
            let ok: Vec<f64> = values.iter().filter_map(|v| v.dimension).collect();
            cells.push(StaticCell {
                length,
                method,
                alpha: (method == Method::Pursuit).then(|| est_cfg.alpha.unwrap()),
                stats: if ok.is_empty() {
                    None
                } else {
                    Some(summarize(&ok)?)
                },
                partial: ok.len() != spec.trials,
                values,
            });
        }
    }
    Ok(StaticReport {
        spec: spec.clone(),
        cells,
    })
}

/// Amplitude convention for the two halves of the switching series.
///
/// A single path's fitted dimension ignores amplitude, but the joined series
/// does not: the relative scale of the halves decides how fast a window's
/// curve length is taken over by the new regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfScaling {
    /// Each half is FBM on `t` in `[0, 1]`: the unit-increment path times
    /// `(n - 1)^-H`, so increments have standard deviation `dt^H`.
    #[default]
    UnitInterval,
    /// Unit-variance increments in both halves.
    UnitIncrements,
}

impl HalfScaling {
    pub fn apply(&self, path: TimeSeries, hurst: f64) -> Result<TimeSeries> {
        match self {
            HalfScaling::UnitIncrements => Ok(path),
            HalfScaling::UnitInterval => {
                let c = ((path.len() - 1) as f64).powf(-hurst);
                TimeSeries::new(path.into_inner().into_iter().map(|v| v * c).collect())
            }
        }
    }
}

impl std::str::FromStr for HalfScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_interval" | "unit-interval" => Ok(HalfScaling::UnitInterval),
            "unit_increments" | "unit-increments" => Ok(HalfScaling::UnitIncrements),
            other => Err(Error::Config(format!(
                "unknown half scaling '{other}' (expected unit_interval or unit_increments)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingExperimentSpec {
    pub half_length: usize,
    pub hurst_first: f64,
    pub hurst_second: f64,
    pub half_scaling: HalfScaling,
    pub window: usize,
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub stride: usize,
    pub base_seed: u64,
    pub estimator: EstimatorConfig,
    pub alignment: Alignment,
    /// Half-width of the convergence band around `2 - hurst_second`.
    pub band: f64,
    /// Convergence hold measured in samples; divided by the stride to get trace steps.
    pub hold: usize,
}

impl Default for TrackingExperimentSpec {
    fn default() -> Self {
        let window = 1 << 12;
        Self {
            half_length: 1 << 13,
            hurst_first: 0.7,
            hurst_second: 0.5,
            half_scaling: HalfScaling::UnitInterval,
            window,
            alphas: ALPHA_INV_FRACTIONS
                .iter()
                .map(|&f| alpha_from_inv_fraction(f, window))
                .collect(),
            trials: 100,
            stride: 1,
            base_seed: 1,
            estimator: EstimatorConfig::new(EstimatorConfig::WINDOW_K_MAX),
            alignment: Alignment::WindowStart,
            band: 0.05,
            hold: 100,
        }
    }
}

impl TrackingExperimentSpec {
    pub fn series_length(&self) -> usize {
        2 * self.half_length - 1
    }

    pub fn target(&self) -> f64 {
        2.0 - self.hurst_second
    }

    /// Hold expressed in trace steps.
    pub fn hold_steps(&self) -> usize {
        (self.hold / self.stride).max(1)
    }

    /// Trial `t` uses seed `base_seed + 2t` for the first half and `+1` for the second.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(2 * trial as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        FbmSpec::new(self.hurst_first, self.half_length, 0)?;
        FbmSpec::new(self.hurst_second, self.half_length, 0)?;
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..1.0).contains(*a)) {
            return Err(Error::Config(format!("alpha must lie in [0, 1), got {a}")));
        }
        if self.band.is_nan() || self.band <= 0.0 {
            return Err(Error::Config("band must be positive".into()));
        }
        for series in self.series() {
            series.config(self).validate(self.series_length())?;
        }
        Ok(())
    }

    /// Higuchi, BK, then one pursuit series per alpha.
    pub fn series(&self) -> Vec<TraceSeries> {
        let mut out = vec![
            TraceSeries {
                label: "higuchi".into(),
                method: Method::Higuchi,
                alpha: None,
            },
            TraceSeries {
                label: "bk".into(),
                method: Method::Bk,
                alpha: None,
            },
        ];
        out.extend(self.alphas.iter().enumerate().map(|(i, &a)| TraceSeries {
            label: format!("pursuit_a{}", i + 1),
            method: Method::Pursuit,
            alpha: Some(a),
        }));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSeries {
    pub label: String,
    pub method: Method,
    pub alpha: Option<f64>,
}

impl TraceSeries {
    fn config(&self, spec: &TrackingExperimentSpec) -> TrackingConfig {
        let mut est = spec.estimator;
        est.alpha = self.alpha;
        TrackingConfig::new(spec.window, self.method, est)
            .with_stride(spec.stride)
            .with_alignment(spec.alignment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub step: usize,
    pub window_start: usize,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanTrace {
    pub series: TraceSeries,
    /// Point-wise mean over trials with a non-gap estimate at that step.
    pub mean: Vec<Option<f64>>,
    /// Number of trials contributing at each step.
    pub counts: Vec<usize>,
    /// Convergence step of the mean trace.
    pub convergence_step: Option<usize>,
    /// Convergence step of each individual trial, in seed order.
    pub trial_convergence_steps: Vec<Option<usize>>,
}

impl MeanTrace {
    /// Sample standard deviation across the last `fraction` of the mean trace.
    pub fn tail_std_dev(&self, fraction: f64) -> Option<f64> {
        let n = self.mean.len();
        let take = ((n as f64 * fraction).round() as usize).clamp(1, n);
        let tail: Vec<f64> = self.mean[n - take..].iter().flatten().copied().collect();
        summarize(&tail).ok().map(|s| s.std_dev)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingReport {
    pub spec: TrackingExperimentSpec,
    pub trial_seeds: Vec<u64>,
    pub steps: Vec<StepInfo>,
    pub traces: Vec<MeanTrace>,
}

impl TrackingReport {
    pub fn trace(&self, label: &str) -> Option<&MeanTrace> {
        self.traces.iter().find(|t| t.series.label == label)
    }

    /// Sample position of a trace step under the configured alignment.
    pub fn position_of(&self, step: usize) -> Option<usize> {
        self.steps.get(step.checked_sub(1)?).map(|s| s.position)
    }
}

/// Builds the switching series for one trial: reversed first-half path,
/// shared zero, second-half path.
pub fn switching_series(spec: &TrackingExperimentSpec, seed: u64) -> Result<TimeSeries> {
    let half = |hurst: f64, seed: u64| -> Result<TimeSeries> {
        let path = generate_fbm(&FbmSpec::new(hurst, spec.half_length, seed)?);
        spec.half_scaling.apply(path, hurst)
    };
    let first = half(spec.hurst_first, seed)?;
    let second = half(spec.hurst_second, seed.wrapping_add(1))?;
    synthesize_switch_series(&first, &second)
}

/// Tracks every series on every trial and averages the traces point-wise.
///
/// Trials run in seed order; each trace parallelizes over windows.
pub fn run_tracking(spec: &TrackingExperimentSpec) -> Result<TrackingReport> {
    spec.validate()?;
    let series = spec.series();
    let configs: Vec<TrackingConfig> = series.iter().map(|s| s.config(spec)).collect();
    let n_steps = configs[0].steps(spec.series_length());
    let target = spec.target();
    let hold = spec.hold_steps();

    let mut sums = vec![vec![0.0f64; n_steps]; series.len()];
    let mut counts = vec![vec![0usize; n_steps]; series.len()];
    let mut trial_conv = vec![Vec::with_capacity(spec.trials); series.len()];
    let mut steps = Vec::new();
    let mut trial_seeds = Vec::with_capacity(spec.trials);

    for t in 0..spec.trials {
        let seed = spec.trial_seed(t);
        trial_seeds.push(seed);
        let x = switching_series(spec, seed)?;
        let traces = configs
            .par_iter()
            .map(|cfg| track(&x, cfg))
            .collect::<Result<Vec<_>>>()?;
        if steps.is_empty() {
            steps = traces[0]
                .steps
                .iter()
                .map(|s| StepInfo {
                    step: s.step,
                    window_start: s.window_start,
                    position: s.position,
                })
                .collect();
        }
        for (si, trace) in traces.iter().enumerate() {
            for (i, d) in trace.dimensions().enumerate() {
                if let Some(d) = d {
                    sums[si][i] += d;
                    counts[si][i] += 1;
                }
            }
            trial_conv[si].push(trace.convergence_step(target, spec.band, hold));
        }
    }

    let traces = series
        .into_iter()
        .zip(sums)
        .zip(counts)
        .zip(trial_conv)
        .map(|(((series, sum), count), trial_convergence_steps)| {
            let mean: Vec<Option<f64>> = sum
                .iter()
                .zip(&count)
                .map(|(&s, &c)| (c > 0).then(|| s / c as f64))
                .collect();
            MeanTrace {
                convergence_step: convergence_step(&mean, target, spec.band, hold),
                series,
                mean,
                counts: count,
                trial_convergence_steps,
            }
        })
        .collect();

    Ok(TrackingReport {
        spec: spec.clone(),
        trial_seeds,
        steps,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_alphas() {
        let spec = TrackingExperimentSpec::default();
        let n = 4096.0;
        let expected = [1.0 / n, 2.0 / n, 10.0 / (3.0 * n), 4.0 / n];
        for (a, e) in spec.alphas.iter().zip(expected) {
            assert!((a - e).abs() < 1e-18);
        }
        assert_eq!(spec.series_length(), (1 << 14) - 1);
        assert_eq!(spec.series().len(), 6);
    }

    #[test]
    fn unit_interval_scaling() {
        let spec = TrackingExperimentSpec {
            half_length: 1025,
            ..TrackingExperimentSpec::default()
        };
        let x = switching_series(&spec, 5).unwrap();
        let raw_first = generate_fbm(&FbmSpec::new(0.7, 1025, 5).unwrap());
        let c = 1024f64.powf(-0.7);
        assert_eq!(x.len(), 2049);
        assert_eq!(x.at(1025), 0.0);
        assert_eq!(x.at(1), raw_first.at(1025) * c);
        let raw_second = generate_fbm(&FbmSpec::new(0.5, 1025, 6).unwrap());
        assert_eq!(x.at(2049), raw_second.at(1025) / 32.0);

        let unit = TrackingExperimentSpec {
            half_scaling: HalfScaling::UnitIncrements,
            ..spec
        };
        assert_eq!(
            switching_series(&unit, 5).unwrap().at(1),
            raw_first.at(1025)
        );
    }

    #[test]
    fn hold_in_steps() {
        let mut spec = TrackingExperimentSpec::default();
        assert_eq!(spec.hold_steps(), 100);
        spec.stride = 16;
        assert_eq!(spec.hold_steps(), 6);
        spec.stride = 512;
        assert_eq!(spec.hold_steps(), 1);
    }

    #[test]
    fn static_single_trial_is_reproducible() {
        let spec = StaticExperimentSpec {
            lengths: vec![1 << 12],
            trials: 1,
            estimator: EstimatorConfig::new(32),
            ..StaticExperimentSpec::default()
        };
        let a = run_static(&spec).unwrap();
        let b = run_static(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 3);
        for c in &a.cells {
            assert!(!c.partial);
            assert!(c.stats.unwrap().mean.is_finite());
        }
        assert_eq!(
            a.cell(1 << 12, Method::Pursuit).unwrap().alpha,
            Some(1.0 / 4096.0)
        );
    }

    #[test]
    fn static_rejects_short_lengths() {
        let spec = StaticExperimentSpec {
            lengths: vec![256],
            ..StaticExperimentSpec::default()
        };
        assert!(matches!(run_static(&spec), Err(Error::Config(_))));
        let spec = StaticExperimentSpec {
            trials: 0,
            ..StaticExperimentSpec::default()
        };
        assert!(run_static(&spec).is_err());
    }

    #[test]
    fn tracking_smoke() {
        let spec = TrackingExperimentSpec {
            half_length: 1 << 10,
            window: 512,
            alphas: vec![1.0 / 512.0, 4.0 / 512.0],
            trials: 2,
            stride: 64,
            estimator: EstimatorConfig::new(32),
            ..TrackingExperimentSpec::default()
        };
        let report = run_tracking(&spec).unwrap();
        assert_eq!(report.traces.len(), 4);
        assert_eq!(report.trial_seeds, vec![1, 3]);
        let steps = (2047 - 512) / 64 + 1;
        assert_eq!(report.steps.len(), steps);
        for t in &report.traces {
            assert_eq!(t.mean.len(), steps);
            assert!(t.counts.iter().all(|&c| c == 2));
            assert_eq!(t.trial_convergence_steps.len(), 2);
        }
        assert_eq!(report, run_tracking(&spec).unwrap());
    }
}

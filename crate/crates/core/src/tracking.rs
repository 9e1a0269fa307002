//! Sliding-window dimension tracking.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_slice, EstimatorConfig, Method};
use crate::series::TimeSeries;

pub const MIN_WINDOW: usize = 16;

/// Sample index a window's estimate is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    #[default]
    WindowStart,
    WindowEnd,
    WindowCenter,
}

impl Alignment {
    /// 1-based sample position for a window starting at `start` (1-based).
    pub fn position(&self, start: usize, window: usize) -> usize {
        match self {
            Alignment::WindowStart => start,
            Alignment::WindowEnd => start + window - 1,
            Alignment::WindowCenter => start + (window - 1) / 2,
        }
    }
}

impl FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "start" | "window_start" => Ok(Alignment::WindowStart),
            "end" | "window_end" => Ok(Alignment::WindowEnd),
            "center" | "window_center" => Ok(Alignment::WindowCenter),
            other => Err(Error::Config(format!(
                "unknown alignment '{other}' (expected start, end or center)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingConfig {
    pub window: usize,
    pub stride: usize,
    pub method: Method,
    pub estimator: EstimatorConfig,
    pub alignment: Alignment,
}

impl TrackingConfig {
    pub fn new(window: usize, method: Method, estimator: EstimatorConfig) -> Self {
        Self {
            window,
            stride: 1,
            method,
            estimator,
            alignment: Alignment::WindowStart,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_alignment(mut self, alignment: Alignment) -> Self {
        self.alignment = alignment;
        self
    }

    pub fn validate(&self, series_len: usize) -> Result<()> {
        if self.window < MIN_WINDOW {
            return Err(Error::Config(format!(
                "window must be at least {MIN_WINDOW}, got {}",
                self.window
            )));
        }
        if self.window > series_len {
            return Err(Error::Config(format!(
                "window {} exceeds series length {series_len}",
                self.window
            )));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        self.estimator.validate(self.window)?;
        if self.method == Method::Pursuit && self.estimator.alpha.is_none() {
            return Err(Error::Config("the pursuit estimator requires alpha".into()));
        }
        Ok(())
    }

    /// Number of window positions over a series of length `series_len`.
    pub fn steps(&self, series_len: usize) -> usize {
        (series_len - self.window) / self.stride + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// 1-based position in the trace.
    pub step: usize,
    /// 1-based index of the window's first sample.
    pub window_start: usize,
    /// Sample index the estimate is attributed to under the configured alignment.
    pub position: usize,
    /// `None` marks a degenerate window.
    pub dimension: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingTrace {
    pub config: TrackingConfig,
    pub steps: Vec<TraceStep>,
}

impl TrackingTrace {
    pub fn dimensions(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.steps.iter().map(|s| s.dimension)
    }

    pub fn gaps(&self) -> usize {
        self.steps.iter().filter(|s| s.dimension.is_none()).count()
    }
}

/// Estimates the dimension on every window `x(s)..x(s + W - 1)` with
/// `s = 1, 1 + stride, ...`. Windows are evaluated in parallel; the trace is
/// always in step order.
pub fn track(x: &TimeSeries, cfg: &TrackingConfig) -> Result<TrackingTrace> {
    cfg.validate(x.len())?;
    let samples = x.samples();
    let steps = (0..cfg.steps(x.len()))
        .into_par_iter()
        .map(|i| {
            let offset = i * cfg.stride;
            let window = &samples[offset..offset + cfg.window];
            let dimension = match estimate_slice(window, cfg.method, &cfg.estimator) {
                Ok(est) => Some(est.dimension),
                Err(Error::Degenerate { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(TraceStep {
                step: i + 1,
                window_start: offset + 1,
                position: cfg.alignment.position(offset + 1, cfg.window),
                dimension,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrackingTrace {
        config: *cfg,
        steps,
    })
}

/// Smallest trace step `s` such that the estimates at `s..s + hold - 1` all
/// exist and lie in `[target - band, target + band]`.
///
/// A gap never counts toward the hold, and the hold must fit inside the trace.
pub fn convergence_step(
    dimensions: &[Option<f64>],
    target: f64,
    band: f64,
    hold: usize,
) -> Option<usize> {
    let hold = hold.max(1);
    let inside = |d: &Option<f64>| matches!(d, Some(v) if (v - target).abs() <= band);
    let mut run = 0;
    for (i, d) in dimensions.iter().enumerate() {
        if inside(d) {
            run += 1;
            if run == hold {
                return Some(i + 2 - hold);
            }
        } else {
            run = 0;
        }
    }
    None
}

impl TrackingTrace {
    /// See [`convergence_step`].
    pub fn convergence_step(&self, target: f64, band: f64, hold: usize) -> Option<usize> {
        let dims: Vec<Option<f64>> = self.dimensions().collect();
        convergence_step(&dims, target, band, hold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> TimeSeries {
        TimeSeries::new((1..=n).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn ramp_trace_is_one() {
        let cfg = TrackingConfig::new(64, Method::Higuchi, EstimatorConfig::new(16));
        let trace = track(&ramp(256), &cfg).unwrap();
        assert_eq!(trace.steps.len(), 256 - 64 + 1);
        for s in &trace.steps {
            assert!((s.dimension.unwrap() - 1.0).abs() < 1e-9);
            assert_eq!(s.window_start, s.step);
        }
    }

    #[test]
    fn step_indexing_with_stride_and_alignment() {
        let cfg = TrackingConfig::new(64, Method::Higuchi, EstimatorConfig::new(16))
            .with_stride(10)
            .with_alignment(Alignment::WindowEnd);
        let trace = track(&ramp(200), &cfg).unwrap();
        assert_eq!(trace.steps.len(), (200 - 64) / 10 + 1);
        for s in &trace.steps {
            assert_eq!(s.window_start, 1 + (s.step - 1) * 10);
            assert_eq!(s.position, s.window_start + 63);
        }
        assert_eq!(Alignment::WindowCenter.position(1, 64), 32);
    }

    #[test]
    fn window_too_large() {
        let cfg = TrackingConfig::new(300, Method::Higuchi, EstimatorConfig::new(16));
        assert!(matches!(track(&ramp(256), &cfg), Err(Error::Config(_))));
        let cfg = TrackingConfig::new(8, Method::Higuchi, EstimatorConfig::new(2));
        assert!(matches!(track(&ramp(256), &cfg), Err(Error::Config(_))));
        let cfg = TrackingConfig::new(64, Method::Higuchi, EstimatorConfig::new(16)).with_stride(0);
        assert!(matches!(track(&ramp(256), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn degenerate_windows_become_gaps() {
        // Flat for the first 100 samples, then a ramp.
        let mut v = vec![0.0; 100];
        v.extend((1..=100).map(|i| i as f64));
        let x = TimeSeries::new(v).unwrap();
        let cfg = TrackingConfig::new(64, Method::Higuchi, EstimatorConfig::new(16));
        let trace = track(&x, &cfg).unwrap();
        assert!(trace.steps[0].dimension.is_none());
        assert!(trace.steps.last().unwrap().dimension.is_some());
        assert!(trace.gaps() > 0);
    }

    #[test]
    fn convergence_examples() {
        let flat = vec![Some(1.5); 50];
        assert_eq!(convergence_step(&flat, 1.5, 0.05, 10), Some(1));
        let low = vec![Some(1.3); 50];
        assert_eq!(convergence_step(&low, 1.5, 0.05, 10), None);

        let mut mixed = vec![Some(1.3); 5];
        mixed.extend([
            Some(1.5),
            Some(1.5),
            None,
            Some(1.5),
            Some(1.52),
            Some(1.49),
        ]);
        assert_eq!(convergence_step(&mixed, 1.5, 0.05, 3), Some(9));
        assert_eq!(convergence_step(&mixed, 1.5, 0.05, 4), None);
        assert_eq!(convergence_step(&mixed, 1.5, 0.05, 1), Some(6));
    }
}

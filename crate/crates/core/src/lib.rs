//! Fractal dimension of time series from curve lengths.
//!
//! Three estimators share one pipeline: build a `(k, <L(k)>)` length profile,
//! then fit `<L(k)> ∝ k^-D` in log-log space.
//!
//! * Higuchi: plain mean of subsampled increments.
//! * Burlaga-Klein: total variation of block means.
//! * Pursuit: exponentially weighted mean of increments, so that windowed
//!   estimates follow changes in the dimension faster.
//!
//! The crate also generates fractional Brownian motion with a known dimension
//! `2 - H`, slides windows over a series, and runs the Monte-Carlo
//! experiments comparing the estimators.
//!
//! ```
//! use fracdim::{estimate_dimension, EstimatorConfig, Method, TimeSeries};
//!
//! let ramp = TimeSeries::new((1..=256).map(|i| i as f64).collect()).unwrap();
//! let est = estimate_dimension(&ramp, Method::Higuchi, &EstimatorConfig::new(16)).unwrap();
//! assert!((est.dimension - 1.0).abs() < 1e-9);
//! ```

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod fbm;
pub mod series;
pub mod tracking;

pub use error::{Error, Result};
pub use estimators::{
    bk_profile, estimate_dimension, higuchi_profile, pursuit_profile, AlphaScope, EstimatorConfig,
    KSchedule, Method, PursuitNormalization,
};
pub use experiments::{
    run_static, run_tracking, HalfScaling, StaticExperimentSpec, StaticReport,
    TrackingExperimentSpec, TrackingReport,
};
pub use fbm::{generate_fbm, generate_fgn, FbmSpec};
pub use series::{
    loglog_fit, summarize, synthesize_switch_series, DimensionEstimate, LengthProfile,
    ProfileEntry, SummaryStats, TimeSeries,
};
pub use tracking::{convergence_step, track, Alignment, TraceStep, TrackingConfig, TrackingTrace};

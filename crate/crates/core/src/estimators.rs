//! Curve-length profiles for the Higuchi, Burlaga-Klein and exponentially
//! weighted pursuit estimators.
//!
//! All three produce `(k, <L(k)>)` pairs; the dimension is the negative slope
//! of the log-log fit (see [`crate::series::loglog_fit`]).
//!
//! Notation (1-based): for scale `k` and offset `m` in `1..=k` the subsequence
//! `x(m), x(m+k), ..., x(m+M k)` has `M = floor((N - m) / k)` increments
//! `d_i = |x(m + i k) - x(m + (i - 1) k)|`, `i = 1..=M`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{loglog_fit, DimensionEstimate, LengthProfile, ProfileEntry, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Higuchi,
    Bk,
    Pursuit,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Higuchi, Method::Bk, Method::Pursuit];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Higuchi => "higuchi",
            Method::Bk => "bk",
            Method::Pursuit => "pursuit",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "higuchi" => Ok(Method::Higuchi),
            "bk" | "burlaga-klein" => Ok(Method::Bk),
            "pursuit" => Ok(Method::Pursuit),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected higuchi, bk or pursuit)"
            ))),
        }
    }
}

/// Which scales in `1..=k_max` enter the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSchedule {
    #[default]
    AllIntegers,
    PowersOfTwo,
}

impl KSchedule {
    pub fn scales(&self, k_max: usize) -> Vec<usize> {
        match self {
            KSchedule::AllIntegers => (1..=k_max).collect(),
            KSchedule::PowersOfTwo => std::iter::successors(Some(1usize), |k| k.checked_mul(2))
                .take_while(|&k| k <= k_max)
                .collect(),
        }
    }
}

impl FromStr for KSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "all_integers" | "all-integers" => Ok(KSchedule::AllIntegers),
            "pow2" | "powers_of_two" | "powers-of-two" => Ok(KSchedule::PowersOfTwo),
            other => Err(Error::Config(format!(
                "unknown k schedule '{other}' (expected all_integers or powers_of_two)"
            ))),
        }
    }
}

/// How the weighted increment sum is normalized in the pursuit estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PursuitNormalization {
    /// `L_m(k) = (sum_i w_i d_i / A) (N - 1) / k^2`: the weighted mean
    /// increment replaces Higuchi's plain mean. Reduces to Higuchi at `alpha = 0`.
    #[default]
    WeightedMean,
    /// `L_m(k) = sum_i w_i d_i (N - 1) / (M k A) / k`, the formula as typeset.
    /// Carries an extra `1 / M` relative to Higuchi, which lowers fitted
    /// dimensions by roughly one. Kept for auditing only.
    AsPrinted,
}

/// How the forgetting factor is applied across subsequences of different length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaScope {
    /// `alpha` is stated per sample of the analysed series (e.g. `c / N`) and
    /// rescaled to `alpha * N / M` on a subsequence with `M` increments, so
    /// every scale forgets over the same fraction of its data.
    #[default]
    Subsequence,
    /// The same `alpha` on every subsequence. With `alpha ~ 1 / N` the weights
    /// are nearly flat for all but the smallest `k`.
    Window,
}

impl AlphaScope {
    pub fn effective_alpha(&self, alpha: f64, n: usize, increments: usize) -> f64 {
        match self {
            AlphaScope::Window => alpha,
            AlphaScope::Subsequence => alpha * n as f64 / increments as f64,
        }
    }
}

impl FromStr for AlphaScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subsequence" => Ok(AlphaScope::Subsequence),
            "window" => Ok(AlphaScope::Window),
            other => Err(Error::Config(format!(
                "unknown alpha scope '{other}' (expected subsequence or window)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub k_max: usize,
    /// Forgetting factor for the pursuit estimator, in `[0, 1)`.
    pub alpha: Option<f64>,
    pub alpha_scope: AlphaScope,
    pub schedule: KSchedule,
    pub normalization: PursuitNormalization,
}

impl EstimatorConfig {
    /// Default scale range for sliding windows.
    pub const WINDOW_K_MAX: usize = 64;
    /// Default scale range for whole-series runs.
    pub const SERIES_K_MAX: usize = 128;

    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            alpha: None,
            alpha_scope: AlphaScope::Subsequence,
            schedule: KSchedule::AllIntegers,
            normalization: PursuitNormalization::WeightedMean,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_alpha_scope(mut self, scope: AlphaScope) -> Self {
        self.alpha_scope = scope;
        self
    }

    pub fn with_schedule(mut self, schedule: KSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_normalization(mut self, normalization: PursuitNormalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Checks the configuration against a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_max < 2 {
            return Err(Error::Config(format!(
                "k_max must be at least 2, got {}",
                self.k_max
            )));
        }
        if n < 4 * self.k_max {
            return Err(Error::Config(format!(
                "series length {n} is shorter than 4 * k_max = {}",
                4 * self.k_max
            )));
        }
        if let Some(a) = self.alpha {
            if !(0.0..1.0).contains(&a) {
                return Err(Error::Config(format!("alpha must lie in [0, 1), got {a}")));
            }
            if self.alpha_scope == AlphaScope::Subsequence {
                // Shortest subsequence: offset m = k_max at scale k_max.
                let shortest = (n - self.k_max) / self.k_max;
                let widest = self.alpha_scope.effective_alpha(a, n, shortest);
                if widest >= 1.0 {
                    return Err(Error::Config(format!(
                        "alpha {a} rescales to {widest} >= 1 on the shortest subsequence \
                         ({shortest} increments); use a smaller alpha or k_max"
                    )));
                }
            }
        }
        if self.schedule.scales(self.k_max).len() < 2 {
            return Err(Error::Config(
                "k schedule yields fewer than 2 scales".into(),
            ));
        }
        Ok(())
    }

    fn pursuit_alpha(&self) -> Result<f64> {
        self.alpha
            .ok_or_else(|| Error::Config("the pursuit estimator requires alpha".into()))
    }
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self::new(Self::WINDOW_K_MAX)
    }
}

pub fn higuchi_profile(x: &TimeSeries, cfg: &EstimatorConfig) -> Result<LengthProfile> {
    profile(x.samples(), Method::Higuchi, cfg)
}

pub fn bk_profile(x: &TimeSeries, cfg: &EstimatorConfig) -> Result<LengthProfile> {
    profile(x.samples(), Method::Bk, cfg)
}

pub fn pursuit_profile(x: &TimeSeries, cfg: &EstimatorConfig) -> Result<LengthProfile> {
    profile(x.samples(), Method::Pursuit, cfg)
}

/// Profile of the selected method followed by the log-log fit.
pub fn estimate_dimension(
    x: &TimeSeries,
    method: Method,
    cfg: &EstimatorConfig,
) -> Result<DimensionEstimate> {
    let est = estimate_slice(x.samples(), method, cfg)?;
    if !est.in_planar_range() {
        log::warn!(
            "{method} estimate D = {:.4} lies outside [1, 2]",
            est.dimension
        );
    }
    Ok(est)
}

/// Estimate on a raw slice whose samples are known to be finite.
pub(crate) fn estimate_slice(
    x: &[f64],
    method: Method,
    cfg: &EstimatorConfig,
) -> Result<DimensionEstimate> {
    loglog_fit(&profile(x, method, cfg)?)
}

pub(crate) fn profile(x: &[f64], method: Method, cfg: &EstimatorConfig) -> Result<LengthProfile> {
    cfg.validate(x.len())?;
    let alpha = match method {
        Method::Pursuit => cfg.pursuit_alpha()?,
        _ => 0.0,
    };
    let entries = cfg
        .schedule
        .scales(cfg.k_max)
        .into_iter()
        .map(|k| {
            let length = match method {
                Method::Higuchi => higuchi_length(x, k),
                Method::Bk => bk_length(x, k),
                Method::Pursuit => pursuit_length(x, k, alpha, cfg.alpha_scope, cfg.normalization),
            };
            if length > 0.0 {
                Ok(ProfileEntry { k, length })
            } else {
                Err(Error::Degenerate { k })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LengthProfile::new(entries)
}

/// `<L(k)>` for Higuchi: the mean over offsets of
/// `L_m(k) = (sum_i d_i / M) (N - 1) / k^2`.
fn higuchi_length(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let norm = (n - 1) as f64 / (k * k) as f64;
    let mut total = 0.0;
    for start in 0..k {
        let subseq = &x[start..];
        let increments = (n - 1 - start) / k;
        let sum: f64 = (1..=increments)
            .map(|i| (subseq[i * k] - subseq[(i - 1) * k]).abs())
            .sum();
        total += sum / increments as f64 * norm;
    }
    total / k as f64
}

/// `<L(k)>` for the pursuit estimator with weights `w_i = (1 - a)^(M - i)`,
/// `a` being `alpha` resolved through `scope`.
fn pursuit_length(
    x: &[f64],
    k: usize,
    alpha: f64,
    scope: AlphaScope,
    normalization: PursuitNormalization,
) -> f64 {
    let n = x.len();
    let norm = (n - 1) as f64 / (k * k) as f64;
    let mut total = 0.0;
    for start in 0..k {
        let subseq = &x[start..];
        let increments = (n - 1 - start) / k;
        let decay = 1.0 - scope.effective_alpha(alpha, n, increments);
        // Horner form: after step i, increment j carries weight decay^(i - j),
        // so the newest increment ends with weight 1.
        let mut weighted = 0.0;
        let mut weight_sum = 0.0;
        for i in 1..=increments {
            let d = (subseq[i * k] - subseq[(i - 1) * k]).abs();
            weighted = weighted * decay + d;
            weight_sum = weight_sum * decay + 1.0;
        }
        total += match normalization {
            PursuitNormalization::WeightedMean => weighted / weight_sum * norm,
            PursuitNormalization::AsPrinted => weighted / (increments as f64 * weight_sum) * norm,
        };
    }
    total / k as f64
}

/// `L_BK(k) = sum_{j=1}^{J-1} |mean_{j+1} - mean_j| / k` over `J = floor(N / k)`
/// consecutive blocks of length `k`.
fn bk_length(x: &[f64], k: usize) -> f64 {
    let mut means = x.chunks_exact(k).map(|b| b.iter().sum::<f64>() / k as f64);
    let Some(mut prev) = means.next() else {
        return 0.0;
    };
    let mut sum = 0.0;
    for mean in means {
        sum += (mean - prev).abs();
        prev = mean;
    }
    sum / k as f64
}

//! Series container, the reversed-join switching series, log-log fitting and
//! Monte-Carlo summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled, finite, real-valued sequence.
///
/// Formulas elsewhere in the crate are documented with 1-based indices
/// `x(1)..x(N)`; `x(i)` is `samples()[i - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    samples: Vec<f64>,
}

impl TimeSeries {
    /// Wraps `samples`, rejecting empty input and non-finite values.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "sample {} is not finite ({})",
                i + 1,
                samples[i]
            )));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// 1-based accessor, `x(i)`.
    pub fn at(&self, i: usize) -> f64 {
        self.samples[i - 1]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.samples
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.samples
    }
}

/// One `(k, <L(k)>)` point of a curve-length profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub k: usize,
    pub length: f64,
}

/// Averaged curve lengths by scale, strictly increasing in `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthProfile {
    entries: Vec<ProfileEntry>,
}

impl LengthProfile {
    pub fn new(entries: Vec<ProfileEntry>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: entries.len(),
            });
        }
        if entries.windows(2).any(|w| w[0].k >= w[1].k) || entries[0].k == 0 {
            return Err(Error::Config(
                "profile scales must be positive and strictly increasing".into(),
            ));
        }
        if let Some(e) = entries
            .iter()
            .find(|e| !e.length.is_finite() || e.length <= 0.0)
        {
            return Err(Error::Domain(format!(
                "curve length at k = {} is {}, expected a positive finite value",
                e.k, e.length
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplies every length by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|e| ProfileEntry {
                    k: e.k,
                    length: e.length * c,
                })
                .collect(),
        )
    }
}

/// Result of fitting `ln <L(k)> = intercept - D ln k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub dimension: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl DimensionEstimate {
    /// Whether `D` lies in `[1, 2]`, the range for the graph of a planar curve.
    pub fn in_planar_range(&self) -> bool {
        (1.0..=2.0).contains(&self.dimension)
    }
}

/// Ordinary least squares of `ln length` on `ln k`, all points equally weighted.
pub fn loglog_fit(profile: &LengthProfile) -> Result<DimensionEstimate> {
    let entries = profile.entries();
    if entries.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: entries.len(),
        });
    }
    let n = entries.len() as f64;
    let xs: Vec<f64> = entries.iter().map(|e| (e.k as f64).ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.length.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;

    // Centered sums are better conditioned than the textbook n*Sxy - Sx*Sy form.
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };

    Ok(DimensionEstimate {
        dimension: -slope,
        intercept,
        r_squared,
        n_points: entries.len(),
    })
}

/// Mean with sample standard deviation and standard error over trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std_dev: f64,
    pub std_err: f64,
    pub trials: usize,
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "summary input contains a non-finite value".into(),
        ));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_dev = if n == 1 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(SummaryStats {
        mean,
        std_dev,
        std_err: std_dev / (n as f64).sqrt(),
        trials: n,
    })
}

/// Joins two anchored paths into the regime-switching test signal
///
/// `first(n1), ..., first(2), 0, second(2), ..., second(n2)`
///
/// so the output has `n1 + n2 - 1` samples, `x(n1) = 0`, and the two halves
/// meet continuously at the shared zero.
pub fn synthesize_switch_series(first: &TimeSeries, second: &TimeSeries) -> Result<TimeSeries> {
    for (name, s) in [("first", first), ("second", second)] {
        if s.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: s.len(),
            });
        }
        if s.samples()[0] != 0.0 {
            return Err(Error::Domain(format!(
                "{name} path must start at exactly 0, found {}",
                s.samples()[0]
            )));
        }
    }
    let mut out = Vec::with_capacity(first.len() + second.len() - 1);
    out.extend(first.samples()[1..].iter().rev());
    out.push(0.0);
    out.extend_from_slice(&second.samples()[1..]);
    TimeSeries::new(out)
}

//! Fractional Brownian motion sample paths with a prescribed Hurst exponent.
//!
//! Increments (fractional Gaussian noise) are drawn by circulant embedding of
//! the autocovariance (Davies-Harte / Wood-Chan), which is exact in
//! distribution whenever the embedding is nonnegative definite. When it is
//! not, generation falls back to the exact Durbin-Levinson recursion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Most negative circulant eigenvalue treated as round-off.
const EIGEN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbmSpec {
    hurst: f64,
    length: usize,
    seed: u64,
}

impl FbmSpec {
    pub fn new(hurst: f64, length: usize, seed: u64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::Config(format!(
                "hurst must lie in (0, 1), got {hurst}"
            )));
        }
        if length < 2 {
            return Err(Error::Config(format!(
                "length must be at least 2, got {length}"
            )));
        }
        Ok(Self {
            hurst,
            length,
            seed,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Graph dimension of the path, `2 - H`.
    pub fn theoretical_dimension(&self) -> f64 {
        2.0 - self.hurst
    }
}

/// Which generator produced a noise sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgnMethod {
    CirculantEmbedding,
    DurbinLevinson,
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `lag`.
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let t = lag as f64;
    0.5 * ((t + 1.0).powf(two_h) - 2.0 * t.powf(two_h) + (t - 1.0).abs().powf(two_h))
}

/// `length - 1` unit-variance FGN increments.
pub fn generate_fgn(spec: &FbmSpec) -> TimeSeries {
    generate_fgn_with_method(spec).0
}

/// As [`generate_fgn`], also reporting which generator was used.
pub fn generate_fgn_with_method(spec: &FbmSpec) -> (TimeSeries, FgnMethod) {
    let m = spec.length - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match circulant_sqrt_eigenvalues(spec.hurst, m) {
        Some(sqrt_eig) => {
            let noise = circulant_sample(&sqrt_eig, m, &mut rng);
            (series(noise), FgnMethod::CirculantEmbedding)
        }
        None => {
            log::warn!(
                "circulant embedding not nonnegative definite for H = {}, n = {}; using O(n^2) recursion",
                spec.hurst,
                spec.length
            );
            (
                series(durbin_levinson(spec.hurst, m, &mut rng)),
                FgnMethod::DurbinLevinson,
            )
        }
    }
}

/// FGN from the exact Durbin-Levinson recursion regardless of embedding validity.
pub fn generate_fgn_exact(spec: &FbmSpec) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    series(durbin_levinson(spec.hurst, spec.length - 1, &mut rng))
}

/// Cumulative sum of [`generate_fgn`] prefixed with 0; exactly `length` samples.
pub fn generate_fbm(spec: &FbmSpec) -> TimeSeries {
    integrate(generate_fgn(spec).samples())
}

pub(crate) fn integrate(increments: &[f64]) -> TimeSeries {
    let mut path = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    path.push(acc);
    for d in increments {
        acc += d;
        path.push(acc);
    }
    series(path)
}

fn series(v: Vec<f64>) -> TimeSeries {
    TimeSeries::new(v).expect("generator output is finite and non-empty")
}

/// Square roots of `lambda_j / (2m)` for the size-`2m` circulant embedding, or
/// `None` if an eigenvalue is negative beyond tolerance.
fn circulant_sqrt_eigenvalues(hurst: f64, m: usize) -> Option<Vec<f64>> {
    let size = 2 * m;
    let mut row: Vec<Complex<f64>> = (0..size)
        .map(|j| {
            let lag = if j <= m { j } else { size - j };
            Complex::new(fgn_autocovariance(hurst, lag), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(size).process(&mut row);

    let scale = 1.0 / size as f64;
    let mut out = Vec::with_capacity(size);
    for c in &row {
        let lambda = c.re;
        if lambda < -EIGEN_TOLERANCE {
            return None;
        }
        out.push((lambda.max(0.0) * scale).sqrt());
    }
    Some(out)
}

fn circulant_sample(sqrt_eig: &[f64], m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // With xi complex standard normal (independent real and imaginary parts),
    // Re FFT(sqrt(lambda / 2m) xi) has exactly the circulant covariance.
    let mut w: Vec<Complex<f64>> = sqrt_eig
        .iter()
        .map(|&s| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(s * re, s * im)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(w.len()).process(&mut w);
    w.into_iter().take(m).map(|c| c.re).collect()
}

fn durbin_levinson(hurst: f64, m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gamma: Vec<f64> = (0..m).map(|lag| fgn_autocovariance(hurst, lag)).collect();
    let mut out = Vec::with_capacity(m);
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    let mut prev: Vec<f64> = Vec::with_capacity(m);
    let mut variance = gamma[0];

    for t in 0..m {
        let mean: f64 = phi.iter().zip(out.iter().rev()).map(|(p, x)| p * x).sum();
        let z: f64 = StandardNormal.sample(rng);
        out.push(mean + variance.sqrt() * z);
        if t + 1 == m {
            break;
        }
        // Update the order-(t+1) prediction coefficients.
        let num = gamma[t + 1]
            - phi
                .iter()
                .enumerate()
                .map(|(j, p)| p * gamma[t - j])
                .sum::<f64>();
        let reflection = num / variance;
        prev.clear();
        prev.extend_from_slice(&phi);
        for j in 0..t {
            phi[j] = prev[j] - reflection * prev[t - 1 - j];
        }
        phi.push(reflection);
        variance *= 1.0 - reflection * reflection;
    }
    out
}

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::DopplerModel;
use crate::fft::fft_in_place;
use crate::{Error, Result, C64};

/// Largest tolerated fraction of negative circulant spectrum.
pub const MAX_CLIPPED_FRACTION: f64 = 1e-3;

/// Draws a standard circular complex Gaussian, `E|w|² = 1`.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Stationary complex Gaussian sequences with covariance `γ`, by circulant
/// embedding.
///
/// The covariance is wrapped onto a circle of length `P` (a power of two at
/// least `4(M + K)`), its discrete spectrum is clipped at zero and rescaled to
/// unit power, and each draw is the inverse transform of spectrally weighted
/// white noise, cut to the first `M` samples. Band-limited spectra, whose
/// covariance has a heavy tail, are instead integrated over the cells of the
/// circle.
#[derive(Debug, Clone)]
pub struct FieldGenerator {
    len: usize,
    amplitudes: Vec<f64>,
    clipped_fraction: f64,
}

impl FieldGenerator {
    pub fn new(doppler: &DopplerModel, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("window", "sequence length must be positive"));
        }
        let horizon = doppler.horizon();
        let period = (4 * (len + horizon)).next_power_of_two();

        let (raw, clipped_fraction) = if doppler.band_limited_mass(0.0, 0.0).is_some() {
            // spectral mass of each cell of the circle; nonnegative by construction
            let p = period as f64;
            let raw = (0..period)
                .map(|k| {
                    let f = if k < period / 2 { k as f64 } else { k as f64 - p } / p;
                    doppler
                        .band_limited_mass(f - 0.5 / p, f + 0.5 / p)
                        .unwrap_or(0.0)
                })
                .collect();
            (raw, 0.0)
        } else {
            embed_covariance(doppler.covariance(), period)?
        };

        // Σ λ_k / P is the variance; rescale it to one
        let power: f64 = raw.iter().sum::<f64>() / period as f64;
        let amplitudes = raw
            .iter()
            .map(|l| (l / (power * period as f64)).sqrt())
            .collect();

        Ok(FieldGenerator {
            len,
            amplitudes,
            clipped_fraction,
        })
    }

    /// Samples per sequence (`M`).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Embedding circle length `P`.
    pub fn period(&self) -> usize {
        self.amplitudes.len()
    }

    /// Fraction of absolute spectral mass that was negative and clipped.
    pub fn clipped_fraction(&self) -> f64 {
        self.clipped_fraction
    }

    /// Covariance at `lag` of the sequences this generator produces.
    pub fn realized_covariance(&self, lag: usize) -> f64 {
        let p = self.period() as f64;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a * a * (2.0 * core::f64::consts::PI * ((k * lag) % self.period()) as f64 / p).cos())
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<C64> {
        let mut buf: Vec<C64> = self
            .amplitudes
            .iter()
            .map(|&a| complex_normal(rng) * a)
            .collect();
        fft_in_place(&mut buf, true);
        buf.truncate(self.len);
        buf
    }
}

/// Spectrum of the circulant wrapping of `γ(0..=K)` onto `period` points,
/// clipped at zero, with the clipped fraction of absolute mass.
fn embed_covariance(covariance: &[f64], period: usize) -> Result<(Vec<f64>, f64)> {
    let mut row = vec![C64::new(0.0, 0.0); period];
    for (k, &g) in covariance.iter().enumerate() {
        row[k] = C64::new(g, 0.0);
        if k > 0 {
            row[period - k] = C64::new(g, 0.0);
        }
    }
    fft_in_place(&mut row, false);

    let total: f64 = row.iter().map(|v| v.re.abs()).sum();
    let negative: f64 = row.iter().map(|v| (-v.re).max(0.0)).sum();
    let fraction = negative / total;
    if fraction > MAX_CLIPPED_FRACTION {
        return Err(Error::EmbeddingClipped { fraction });
    }
    Ok((row.iter().map(|v| v.re.max(0.0)).collect(), fraction))
}

/// The field `W_d(k)`, `k = -n..=n`, of one lag `d`: `M = 2n+1` matrices of
/// size `N x T`. Entries at distinct positions are independent; along `k`
/// each entry is stationary with covariance `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagField {
    pub lag: i64,
    /// Indexed by `k + n`.
    pub samples: Vec<DMatrix<C64>>,
}

pub fn generate_lag_field<R: Rng + ?Sized>(
    generator: &FieldGenerator,
    lag: i64,
    n_rx: usize,
    n_tx: usize,
    rng: &mut R,
) -> LagField {
    let mut samples = vec![DMatrix::zeros(n_rx, n_tx); generator.len()];
    // column-major entry order, one sequence per entry
    for col in 0..n_tx {
        for row in 0..n_rx {
            for (k, v) in generator.sample(rng).into_iter().enumerate() {
                samples[k][(row, col)] = v;
            }
        }
    }
    LagField { lag, samples }
}

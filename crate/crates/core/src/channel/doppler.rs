use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use super::FrequencyGrid;
use crate::{Error, Result};

/// Covariance lags with `|γ(k)|` below this value are dropped.
pub const COVARIANCE_CUTOFF: f64 = 1e-10;

/// The exponential covariance is summed until `exp(-k f_d)` falls below this.
const EXPONENTIAL_CUTOFF: f64 = 1e-12;

const MAX_HORIZON: usize = 1_000_000;


#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DopplerKind {
    /// Block fading, `γ(k) = δ(k)`.
    Delta,
    /// `γ(k) = exp(-|k| f_d)`.
    Exponential { f_d: f64 },
    /// Band-limited `1/(π sqrt(f_d² - f²))` spectrum, softened at the band
    /// edge by `reg`.
    Jakes { f_d: f64, reg: f64 },
}

/// Temporal correlation of the fading process: the covariance `γ(k)` with
/// `γ(0) = 1` and its spectrum `𝜸(f) = Σ_k e^{2iπkf} γ(k)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerModel {
    kind: DopplerKind,
    spectrum: Vec<f64>,
    // one-sided, covariance[k] = γ(k) = γ(-k) for 0 <= k <= horizon
    covariance: Vec<f64>,
}

impl DopplerModel {
    pub fn delta(grid: &FrequencyGrid) -> Self {
        DopplerModel {
            kind: DopplerKind::Delta,
            spectrum: vec![1.0; grid.len()],
            covariance: vec![1.0],
        }
    }

    /// Exponentially decaying covariance. `horizon` defaults to the smallest
    /// lag with `exp(-k f_d) < 1e-12`; an explicit horizon must satisfy the
    /// same bound.
    pub fn exponential(f_d: f64, grid: &FrequencyGrid, horizon: Option<usize>) -> Result<Self> {
        if !(f_d > 0.0) || !f_d.is_finite() {
            return Err(Error::invalid("f_d", "must be positive and finite"));
        }
        let min_horizon = (-EXPONENTIAL_CUTOFF.ln() / f_d).floor() + 1.0;
        if min_horizon > MAX_HORIZON as f64 {
            return Err(Error::invalid("f_d", "correlation too long for the lag horizon cap"));
        }
        let horizon = match horizon {
            None => min_horizon as usize,
            Some(k) if (-(k as f64) * f_d).exp() < EXPONENTIAL_CUTOFF && k <= MAX_HORIZON => k,
            Some(_) => {
                return Err(Error::invalid(
                    "horizon",
                    "exp(-horizon * f_d) must be below 1e-12",
                ))
            }
        };

        let covariance: Vec<f64> = (0..=horizon).map(|k| (-(k as f64) * f_d).exp()).collect();
        let mut spectrum: Vec<f64> = (0..grid.len())
            .map(|j| {
                let f = grid.point(j);
                covariance[1..]
                    .iter()
                    .enumerate()
                    .fold(covariance[0], |acc, (i, &g)| {
                        acc + 2.0 * g * (2.0 * PI * (i + 1) as f64 * f).cos()
                    })
            })
            .collect();
        normalize(&mut spectrum, grid);

        Ok(DopplerModel {
            kind: DopplerKind::Exponential { f_d },
            spectrum,
            covariance,
        })
    }

    /// Jakes spectrum with the edge singularity softened to
    /// `1/(π sqrt(f_d² - f² + reg²))`; `reg` defaults to `f_d/100`. The
    /// covariance is the inverse discrete transform of the sampled spectrum.
    pub fn jakes(f_d: f64, reg: Option<f64>, grid: &FrequencyGrid) -> Result<Self> {
        if !(f_d > 0.0 && f_d < 0.5) {
            return Err(Error::invalid("f_d", "Jakes Doppler frequency must lie in (0, 0.5)"));
        }
        let reg = reg.unwrap_or(f_d / 100.0);
        if !(reg > 0.0) || !reg.is_finite() {
            return Err(Error::invalid("reg", "must be positive and finite"));
        }

        let mut spectrum: Vec<f64> = (0..grid.len())
            .map(|j| {
                jakes_density(f_d, reg, grid.centered_point(j))
            })
            .collect();
        normalize(&mut spectrum, grid);

        let len = grid.len();
        let mut covariance: Vec<f64> = (0..=len / 2)
            .map(|k| {
                spectrum
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| s * (2.0 * PI * ((k * j) % len) as f64 / len as f64).cos())
                    .sum::<f64>()
                    / len as f64
            })
            .collect();
        covariance[0] = 1.0;
        let keep = covariance
            .iter()
            .rposition(|g| g.abs() >= COVARIANCE_CUTOFF)
            .unwrap_or(0);
        covariance.truncate(keep + 1);

        Ok(DopplerModel {
            kind: DopplerKind::Jakes { f_d, reg },
            spectrum,
            covariance,
        })
    }

    pub fn kind(&self) -> DopplerKind {
        self.kind
    }

    /// `𝜸(f_j)` for each grid point.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// One-sided covariance `γ(0), …, γ(K)`.
    pub fn covariance(&self) -> &[f64] {
        &self.covariance
    }

    /// Largest lag `K` with a stored covariance value.
    pub fn horizon(&self) -> usize {
        self.covariance.len() - 1
    }

    pub fn gamma(&self, k: i64) -> f64 {
        self.covariance
            .get(k.unsigned_abs() as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// `Σ_k |γ(k)|` over all lags.
    pub fn coherence_sum(&self) -> f64 {
        self.covariance[0] + 2.0 * self.covariance[1..].iter().map(|g| g.abs()).sum::<f64>()
    }

    /// Unnormalized spectral mass on `[lo, hi] ⊂ [-½, ½]` for band-limited
    /// kinds whose covariance decays too slowly to truncate. `None` for the
    /// others.
    pub fn band_limited_mass(&self, lo: f64, hi: f64) -> Option<f64> {
        match self.kind {
            DopplerKind::Jakes { f_d, reg } => {
                let a = (f_d * f_d + reg * reg).sqrt();
                let primitive = |f: f64| (f.clamp(-f_d, f_d) / a).asin() / PI;
                Some(primitive(hi) - primitive(lo))
            }
            _ => None,
        }
    }

    pub fn grid_len(&self) -> usize {
        self.spectrum.len()
    }
}

/// Softened Jakes density on `f ∈ [-½, ½)`.
fn jakes_density(f_d: f64, reg: f64, f: f64) -> f64 {
    if f.abs() < f_d {
        1.0 / (PI * (f_d * f_d - f * f + reg * reg).sqrt())
    } else {
        0.0
    }
}

fn normalize(spectrum: &mut [f64], grid: &FrequencyGrid) {
    let mass = grid.quadrature(spectrum);
    for s in spectrum.iter_mut() {
        *s /= mass;
    }
}

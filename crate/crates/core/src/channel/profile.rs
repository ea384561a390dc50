use alloc::vec;
use alloc::vec::Vec;


use num_traits::Float;
use crate::{Error, Result};

/// Multipath amplitude profile `φ(ℓ)`, `ℓ = -L..=L`, with total power
/// `σ² = Σ_ℓ φ(ℓ)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    taps: Vec<f64>,
    sigma_sq: f64,
}

impl PowerProfile {
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.len().is_multiple_of(2) {
            return Err(Error::invalid("taps", "need an odd number 2L+1 of taps"));
        }
        if taps.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::invalid("taps", "amplitudes must be finite and nonnegative"));
        }
        let sigma_sq = taps.iter().map(|t| t * t).sum();
        Ok(PowerProfile { taps, sigma_sq })
    }

    pub fn zero(lag_span: usize) -> Self {
        PowerProfile {
            taps: vec![0.0; 2 * lag_span + 1],
            sigma_sq: 0.0,
        }
    }

    /// `φ(ℓ)² = σ²/(2L+1)` for every tap.
    pub fn uniform(lag_span: usize, sigma_sq: f64) -> Result<Self> {
        check_power(sigma_sq)?;
        let amp = (sigma_sq / (2 * lag_span + 1) as f64).sqrt();
        Self::from_taps(vec![amp; 2 * lag_span + 1])
    }

    /// `φ(ℓ)² ∝ exp(-|ℓ|/decay)`, scaled to total power `σ²`.
    pub fn exponential(lag_span: usize, decay: f64, sigma_sq: f64) -> Result<Self> {
        check_power(sigma_sq)?;
        if !(decay > 0.0) || !decay.is_finite() {
            return Err(Error::invalid("decay", "must be positive and finite"));
        }
        let raw: Vec<f64> = (-(lag_span as i64)..=lag_span as i64)
            .map(|l| (-(l.abs() as f64) / decay).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        let taps = raw.iter().map(|p| (p * sigma_sq / total).sqrt()).collect();
        Self::from_taps(taps)
    }

    pub fn lag_span(&self) -> usize {
        self.taps.len() / 2
    }

    /// Amplitudes indexed by `ℓ + L`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// `φ(ℓ)`, zero outside `-L..=L`.
    pub fn amplitude(&self, lag: i64) -> f64 {
        let idx = lag + self.lag_span() as i64;
        if idx < 0 {
            return 0.0;
        }
        self.taps.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn is_zero(&self) -> bool {
        self.sigma_sq == 0.0
    }

    /// Rescales the amplitudes so that the total power becomes `sigma_sq`.
    pub fn scaled_to(&self, sigma_sq: f64) -> Result<Self> {
        check_power(sigma_sq)?;
        if sigma_sq == 0.0 {
            return Ok(Self::zero(self.lag_span()));
        }
        if self.is_zero() {
            return Err(Error::invalid("profile", "cannot rescale an all-zero profile"));
        }
        let s = (sigma_sq / self.sigma_sq).sqrt();
        Self::from_taps(self.taps.iter().map(|t| t * s).collect())
    }
}

fn check_power(sigma_sq: f64) -> Result<()> {
    if !(sigma_sq >= 0.0) || !sigma_sq.is_finite() {
        return Err(Error::invalid("sigma_sq", "must be finite and nonnegative"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_is_sum_of_squares() {
        let p = PowerProfile::from_taps(vec![0.5, 1.0, 0.25]).unwrap();
        assert_eq!(p.sigma_sq(), 0.25 + 1.0 + 0.0625);
        assert_eq!(p.lag_span(), 1);
        assert_eq!(p.amplitude(-1), 0.5);
        assert_eq!(p.amplitude(2), 0.0);
    }

    #[test]
    fn uniform_and_exponential_hit_target_power() {
        let u = PowerProfile::uniform(3, 2.5).unwrap();
        assert!((u.sigma_sq() - 2.5).abs() < 1e-14);
        let e = PowerProfile::exponential(3, 1.5, 2.5).unwrap();
        assert!((e.sigma_sq() - 2.5).abs() < 1e-14);
        assert!(e.amplitude(0) > e.amplitude(3));
    }

    #[test]
    fn rejects_malformed() {
        assert!(PowerProfile::from_taps(vec![1.0, 1.0]).is_err());
        assert!(PowerProfile::from_taps(vec![-1.0]).is_err());
        assert!(PowerProfile::zero(2).scaled_to(1.0).is_err());
    }
}

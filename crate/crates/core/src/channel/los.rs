use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use nalgebra::DMatrix;

use super::FrequencyGrid;
use crate::linalg::spectral_norm;
use crate::{Error, Result, C64};

/// Deterministic (line-of-sight) channel taps `A(k)`, `k = -L..=L`, each an
/// `N x T` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LosTaps {
    n_rx: usize,
    n_tx: usize,
    blocks: Vec<DMatrix<C64>>,
    spectral_norm_sum: f64,
}

impl LosTaps {
    pub fn from_blocks(blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if blocks.len().is_multiple_of(2) {
            return Err(Error::invalid("los", "need an odd number 2L+1 of blocks"));
        }
        let (n_rx, n_tx) = blocks[0].shape();
        if n_rx == 0 || n_tx == 0 {
            return Err(Error::invalid("los", "blocks must be nonempty"));
        }
        if blocks.iter().any(|b| b.shape() != (n_rx, n_tx)) {
            return Err(Error::invalid("los", "all blocks must share one shape"));
        }
        if blocks.iter().any(|b| b.iter().any(|v| !(v.re.is_finite() && v.im.is_finite()))) {
            return Err(Error::invalid("los", "entries must be finite"));
        }
        let spectral_norm_sum = blocks.iter().map(spectral_norm).sum();
        Ok(LosTaps {
            n_rx,
            n_tx,
            blocks,
            spectral_norm_sum,
        })
    }

    pub fn zero(n_rx: usize, n_tx: usize, lag_span: usize) -> Result<Self> {
        Self::from_blocks(
            (0..2 * lag_span + 1)
                .map(|_| DMatrix::zeros(n_rx, n_tx))
                .collect(),
        )
    }

    /// Rank-one steering-vector taps
    /// `A(k)_{m,n} = e^{-|k|ξ/L_tot} e^{2πj(m-n) sin θ_k} / sqrt(N)` with
    /// `θ_k = kπ/L_tot` and `L_tot = 2L+1`.
    pub fn steering(n_rx: usize, n_tx: usize, lag_span: usize, xi: f64) -> Result<Self> {
        if n_rx == 0 || n_tx == 0 {
            return Err(Error::invalid("N/T", "antenna counts must be positive"));
        }
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::invalid("xi", "must be finite and nonnegative"));
        }
        let l_tot = (2 * lag_span + 1) as f64;
        let norm = 1.0 / (n_rx as f64).sqrt();
        let blocks = (-(lag_span as i64)..=lag_span as i64)
            .map(|k| {
                let amp = (-(k.abs() as f64) * xi / l_tot).exp() * norm;
                let s = (k as f64 * PI / l_tot).sin();
                DMatrix::from_fn(n_rx, n_tx, |m, n| {
                    C64::from_polar(amp, 2.0 * PI * (m as f64 - n as f64) * s)
                })
            })
            .collect();
        Self::from_blocks(blocks)
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn lag_span(&self) -> usize {
        self.blocks.len() / 2
    }

    /// Blocks indexed by `k + L`.
    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    /// `A(k)`, or `None` outside `-L..=L`.
    pub fn block(&self, lag: i64) -> Option<&DMatrix<C64>> {
        let idx = lag + self.lag_span() as i64;
        if idx < 0 {
            None
        } else {
            self.blocks.get(idx as usize)
        }
    }

    /// `Σ_k ‖A(k)‖` (spectral norms).
    pub fn spectral_norm_sum(&self) -> f64 {
        self.spectral_norm_sum
    }

    /// `Σ_k tr(A(k) A(k)*)`.
    pub fn power(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|v| *v == C64::new(0.0, 0.0)))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_blocks(self.blocks.iter().map(|b| b * C64::from(factor)).collect())
    }
}

/// `𝐀(f_j) = Σ_k e^{2iπ k f_j} A(k)` on every grid point.
pub fn transfer_function(los: &LosTaps, grid: &FrequencyGrid) -> Vec<DMatrix<C64>> {
    let lag_span = los.lag_span() as i64;
    (0..grid.len())
        .map(|j| {
            let f = grid.point(j);
            los.blocks.iter().zip(-lag_span..=lag_span).fold(
                DMatrix::zeros(los.n_rx, los.n_tx),
                |acc, (b, k)| acc + b * C64::from_polar(1.0, 2.0 * PI * k as f64 * f),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram, hermitian_eigenvalues};
    use alloc::vec;

    #[test]
    fn single_tap_is_flat() {
        let los = LosTaps::steering(3, 2, 0, 0.7).unwrap();
        let a0 = los.block(0).unwrap();
        let expect = 1.0 / 3f64.sqrt();
        assert!(a0.iter().all(|v| (v - C64::new(expect, 0.0)).norm() < 1e-15));

        let grid = FrequencyGrid::new(8).unwrap();
        for a in transfer_function(&los, &grid) {
            assert!((a - a0).norm() < 1e-15);
        }
    }

    #[test]
    fn taps_are_rank_one_with_expected_power() {
        let (n, t, l, xi) = (4, 3, 2, 1.3);
        let los = LosTaps::steering(n, t, l, xi).unwrap();
        for k in -(l as i64)..=l as i64 {
            let b = los.block(k).unwrap();
            let eig = hermitian_eigenvalues(&gram(b));
            let top = *eig.last().unwrap();
            assert!(eig[..eig.len() - 1].iter().all(|e| e.abs() < 1e-12 * top));
            // unit-modulus steering entries: tr(AA*) = N*T * amp² = T e^{-2|k|ξ/L_tot}
            let expected = t as f64 * (-2.0 * k.abs() as f64 * xi / 5.0).exp();
            assert!((gram(b).trace().re - expected).abs() < 1e-12);
            assert!((spectral_norm(b) - expected.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_delay_tap_has_flat_gram() {
        let b = DMatrix::from_fn(2, 2, |m, n| C64::new(m as f64 + 1.0, n as f64 - 0.5));
        let z = DMatrix::zeros(2, 2);
        let los = LosTaps::from_blocks(vec![z.clone(), z, b.clone()]).unwrap();
        let grid = FrequencyGrid::new(16).unwrap();
        let bb = gram(&b);
        for (j, a) in transfer_function(&los, &grid).iter().enumerate() {
            let phase = C64::from_polar(1.0, 2.0 * PI * grid.point(j));
            assert!((a - &b * phase).norm() < 1e-13);
            assert!((gram(a) - &bb).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval() {
        let los = LosTaps::steering(3, 4, 3, 0.4).unwrap();
        let grid = FrequencyGrid::new(64).unwrap();
        let freq: vec::Vec<f64> = transfer_function(&los, &grid)
            .iter()
            .map(|a| a.norm_squared())
            .collect();
        let lhs = los.power();
        assert!((grid.quadrature(&freq) - lhs).abs() < 1e-10 * lhs);
    }

    #[test]
    fn rejects_inconsistent_shapes() {
        assert!(LosTaps::from_blocks(vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 3)]).is_err());
        assert!(LosTaps::from_blocks(vec![
            DMatrix::zeros(2, 2),
            DMatrix::zeros(2, 3),
            DMatrix::zeros(2, 2)
        ])
        .is_err());
        assert!(LosTaps::steering(0, 2, 1, 1.0).is_err());
        assert!(LosTaps::steering(2, 2, 1, -1.0).is_err());
    }
}

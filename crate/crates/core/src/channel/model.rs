use alloc::vec::Vec;

use num_traits::Float;
use nalgebra::DMatrix;

use super::{transfer_function, DopplerModel, FrequencyGrid, LosTaps, PowerProfile};
use crate::linalg::{gram, hermitian_eigenvalues};
use crate::{Error, Result, C64};

/// Sentinel for a purely deterministic channel (`K = ∞`).
pub const RICEAN_K_INFINITE: f64 = f64::INFINITY;

/// Full statistical description of the channel, with the frequency-domain
/// quantities the solver consumes precomputed on the grid.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    n_rx: usize,
    n_tx: usize,
    doppler: DopplerModel,
    profile: PowerProfile,
    los: LosTaps,
    grid: FrequencyGrid,
    transfer: Vec<DMatrix<C64>>,
    gram: Vec<DMatrix<C64>>,
    // eigenvalues of (AA*)(f_j) and (A*A)(f_j), clamped at zero
    rx_eigs: Vec<Vec<f64>>,
    tx_eigs: Vec<Vec<f64>>,
}

impl ChannelModel {
    pub fn new(
        doppler: DopplerModel,
        profile: PowerProfile,
        los: LosTaps,
        grid: FrequencyGrid,
    ) -> Result<Self> {
        if profile.lag_span() != los.lag_span() {
            return Err(Error::invalid(
                "L",
                "power profile and LOS taps disagree on the number of taps",
            ));
        }
        if doppler.grid_len() != grid.len() {
            return Err(Error::invalid("grid_size", "Doppler spectrum sampled on another grid"));
        }
        if grid.len() <= 2 * los.lag_span() {
            return Err(Error::invalid(
                "grid_size",
                "grid must have more than 2L points to resolve the tap delays",
            ));
        }

        let transfer = transfer_function(&los, &grid);
        let gram: Vec<_> = transfer.iter().map(gram).collect();
        let clamp = |v: Vec<f64>| v.into_iter().map(|e| e.max(0.0)).collect::<Vec<_>>();
        let rx_eigs = gram.iter().map(|g| clamp(hermitian_eigenvalues(g))).collect();
        let tx_eigs = transfer
            .iter()
            .map(|a| clamp(hermitian_eigenvalues(&(a.adjoint() * a))))
            .collect();

        Ok(ChannelModel {
            n_rx: los.n_rx(),
            n_tx: los.n_tx(),
            doppler,
            profile,
            los,
            grid,
            transfer,
            gram,
            rx_eigs,
            tx_eigs,
        })
    }

    /// Receive antennas `N`.
    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// Transmit antennas `T`.
    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn lag_span(&self) -> usize {
        self.los.lag_span()
    }

    /// Aspect ratio `c = N/T`.
    pub fn c(&self) -> f64 {
        self.n_rx as f64 / self.n_tx as f64
    }

    pub fn doppler(&self) -> &DopplerModel {
        &self.doppler
    }

    pub fn profile(&self) -> &PowerProfile {
        &self.profile
    }

    pub fn los(&self) -> &LosTaps {
        &self.los
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn sigma_sq(&self) -> f64 {
        self.profile.sigma_sq()
    }

    /// `Σ_k ‖A(k)‖`.
    pub fn spectral_norm_sum(&self) -> f64 {
        self.los.spectral_norm_sum()
    }

    pub fn transfer(&self) -> &[DMatrix<C64>] {
        &self.transfer
    }

    /// `(𝐀𝐀*)(f_j)` per grid point.
    pub fn gram(&self) -> &[DMatrix<C64>] {
        &self.gram
    }

    /// Eigenvalues of `(𝐀𝐀*)(f_j)` (length `N`, ascending, nonnegative).
    pub fn rx_eigenvalues(&self, j: usize) -> &[f64] {
        &self.rx_eigs[j]
    }

    /// Eigenvalues of `(𝐀*𝐀)(f_j)` (length `T`, ascending, nonnegative).
    pub fn tx_eigenvalues(&self, j: usize) -> &[f64] {
        &self.tx_eigs[j]
    }

    /// Deterministic received power `(1/N) ∫ tr (𝐀𝐀*)(f) df`.
    pub fn los_power(&self) -> f64 {
        let traces: Vec<f64> = self.gram.iter().map(|g| g.trace().re).collect();
        self.grid.quadrature(&traces) / self.n_rx as f64
    }

    /// `ρ = σ² + (1/N) ∫ tr (𝐀𝐀*)(f) df`.
    pub fn snr(&self) -> f64 {
        self.sigma_sq() + self.los_power()
    }

    /// Rescales the random and deterministic parts so that the total SNR is
    /// `rho` and the deterministic-to-random power ratio is `k`
    /// ([`RICEAN_K_INFINITE`] for a purely deterministic channel).
    pub fn normalize_for_snr(&self, rho: f64, k: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::invalid("rho", "must be positive and finite"));
        }
        if !(k >= 0.0) {
            return Err(Error::invalid("K", "must be nonnegative"));
        }
        let (random, deterministic) = if k.is_infinite() {
            (0.0, rho)
        } else {
            (rho / (1.0 + k), rho * k / (1.0 + k))
        };

        if random > 0.0 && self.profile.is_zero() {
            return Err(Error::invalid("K", "finite K requires a nonzero power profile"));
        }
        let profile = self.profile.scaled_to(random)?;

        let current = self.los_power();
        let los = if deterministic == 0.0 {
            LosTaps::zero(self.n_rx, self.n_tx, self.lag_span())?
        } else if current > 0.0 {
            self.los.scaled((deterministic / current).sqrt())?
        } else {
            return Err(Error::invalid("K", "positive K requires nonzero LOS taps"));
        };

        Self::new(self.doppler.clone(), profile, los, self.grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(n: usize, t: usize, l: usize) -> ChannelModel {
        let grid = FrequencyGrid::new(64).unwrap();
        ChannelModel::new(
            DopplerModel::exponential(0.5, &grid, None).unwrap(),
            PowerProfile::uniform(l, 1.0).unwrap(),
            LosTaps::steering(n, t, l, 1.0).unwrap(),
            grid,
        )
        .unwrap()
    }

    #[test]
    fn gram_is_consistent_with_transfer() {
        let m = base(3, 2, 2);
        for (a, g) in m.transfer().iter().zip(m.gram()) {
            let direct = a * a.adjoint();
            assert!((direct - g).iter().all(|v| v.norm() < 1e-12));
            assert!((g - g.adjoint()).norm() < 1e-13);
        }
        for j in 0..m.grid().len() {
            assert_eq!(m.rx_eigenvalues(j).len(), 3);
            assert_eq!(m.tx_eigenvalues(j).len(), 2);
            let tr: f64 = m.rx_eigenvalues(j).iter().sum();
            assert!((tr - m.gram()[j].trace().re).abs() < 1e-10);
        }
    }

    #[test]
    fn equal_split() {
        let m = base(2, 2, 1).normalize_for_snr(2.0, 1.0).unwrap();
        assert!((m.sigma_sq() - 1.0).abs() < 1e-12);
        assert!((m.los_power() - 1.0).abs() < 1e-12);
        assert!((m.snr() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_and_deterministic_limits() {
        let m = base(2, 3, 1).normalize_for_snr(5.0, 0.0).unwrap();
        assert!((m.sigma_sq() - 5.0).abs() < 1e-12);
        assert!(m.los().is_zero());

        let m = base(2, 3, 1).normalize_for_snr(5.0, RICEAN_K_INFINITE).unwrap();
        assert_eq!(m.sigma_sq(), 0.0);
        assert!((m.los_power() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_is_idempotent() {
        let once = base(3, 2, 2).normalize_for_snr(7.0, 2.5).unwrap();
        let twice = once.normalize_for_snr(7.0, 2.5).unwrap();
        assert!((once.sigma_sq() - twice.sigma_sq()).abs() < 1e-12);
        for (a, b) in once.los().blocks().iter().zip(twice.los().blocks()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn unsatisfiable_normalizations() {
        let grid = FrequencyGrid::new(16).unwrap();
        let no_los = ChannelModel::new(
            DopplerModel::delta(&grid),
            PowerProfile::uniform(1, 1.0).unwrap(),
            LosTaps::zero(2, 2, 1).unwrap(),
            grid,
        )
        .unwrap();
        assert!(no_los.normalize_for_snr(1.0, 1.0).is_err());
        assert!(no_los.normalize_for_snr(1.0, 0.0).is_ok());

        let no_random = ChannelModel::new(
            DopplerModel::delta(&grid),
            PowerProfile::zero(1),
            LosTaps::steering(2, 2, 1, 1.0).unwrap(),
            grid,
        )
        .unwrap();
        assert!(no_random.normalize_for_snr(1.0, 3.0).is_err());
        assert!(no_random.normalize_for_snr(1.0, RICEAN_K_INFINITE).is_ok());
        assert!(no_random.normalize_for_snr(0.0, RICEAN_K_INFINITE).is_err());
    }

    #[test]
    fn rejects_mismatched_parts() {
        let grid = FrequencyGrid::new(16).unwrap();
        assert!(ChannelModel::new(
            DopplerModel::delta(&grid),
            PowerProfile::uniform(2, 1.0).unwrap(),
            LosTaps::zero(2, 2, 1).unwrap(),
            grid,
        )
        .is_err());
        let small = FrequencyGrid::new(4).unwrap();
        assert!(ChannelModel::new(
            DopplerModel::delta(&small),
            PowerProfile::uniform(2, 1.0).unwrap(),
            LosTaps::zero(2, 2, 2).unwrap(),
            small,
        )
        .is_err());
    }
}

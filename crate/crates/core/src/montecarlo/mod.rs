//! Finite-window simulation of the band channel matrix.
//!
//! Over the window `k = -n..=n` the channel is the `(2n+1)N x (2n+2L+1)T`
//! matrix `Hⁿ` whose block `(m, ℓ)` is `A(m-ℓ) + φ(m-ℓ) W_{m-ℓ}(m) / sqrt(T)`
//! for `|m - ℓ| <= L`. The per-antenna mutual information
//! `log det(HⁿHⁿ* + I) / ((2n+1)N)` converges to the ergodic value as the
//! window grows; averaging it over independent trials gives the estimate the
//! deterministic equivalent is checked against.

mod field;

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelModel;
use crate::{Error, Result, C64};

pub use field::{generate_lag_field, FieldGenerator, LagField, MAX_CLIPPED_FRACTION};

/// Caps on the dense band matrix.
pub const MAX_ROWS: usize = 4096;
pub const MAX_COLS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    /// `n`; the window holds `M = 2n+1` blocks.
    pub half_window: usize,
    pub trials: usize,
    pub seed: u64,
}

impl McConfig {
    /// Window size `M = 2n+1`.
    pub fn window(&self) -> usize {
        2 * self.half_window + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub stderr: f64,
    pub trials: usize,
    pub per_trial: Option<Vec<f64>>,
}

impl McEstimate {
    /// Summary of `samples`, accumulated in index order.
    pub fn from_samples(samples: Vec<f64>, keep: bool) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean,
            stderr,
            trials: n,
            per_trial: keep.then_some(samples),
        }
    }
}

/// Dense `Hⁿ` with its block geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    pub half_window: usize,
    pub lag_span: usize,
    pub n_rx: usize,
    pub n_tx: usize,
    pub matrix: DMatrix<C64>,
}

impl BandMatrix {
    /// Block `(m, ℓ)` with `m ∈ -n..=n`, `ℓ ∈ -n-L..=n+L`.
    pub fn block(&self, m: i64, l: i64) -> DMatrix<C64> {
        let row = (m + self.half_window as i64) as usize * self.n_rx;
        let col = (l + (self.half_window + self.lag_span) as i64) as usize * self.n_tx;
        self.matrix
            .view((row, col), (self.n_rx, self.n_tx))
            .into_owned()
    }

    /// `HⁿHⁿ*`, computed block-wise over the band.
    pub fn gram(&self) -> DMatrix<C64> {
        let (n, t) = (self.n_rx, self.n_tx);
        let blocks = 2 * self.half_window + 1;
        let width = 2 * self.lag_span + 1;
        let mut g = DMatrix::zeros(blocks * n, blocks * n);
        for bi in 0..blocks {
            // block row bi occupies column blocks bi..bi+width
            for bj in bi..blocks.min(bi + width) {
                let overlap = (bi + width - bj) * t;
                let a = self.matrix.view((bi * n, bj * t), (n, overlap));
                let b = self.matrix.view((bj * n, bj * t), (n, overlap));
                let prod = a * b.adjoint();
                g.view_mut((bi * n, bj * n), (n, n)).copy_from(&prod);
                if bj != bi {
                    g.view_mut((bj * n, bi * n), (n, n))
                        .copy_from(&prod.adjoint());
                }
            }
        }
        g
    }
}

/// `log det(HH* + I) / rows(H)` for a dense matrix.
pub fn log_det_mutual_info(h: &DMatrix<C64>) -> Result<f64> {
    let rows = h.nrows();
    if rows == 0 {
        return Err(Error::invalid("H", "empty matrix"));
    }
    let g = h * h.adjoint() + DMatrix::identity(rows, rows);
    cholesky_logdet(g).map(|v| v / rows as f64)
}

fn cholesky_logdet(g: DMatrix<C64>) -> Result<f64> {
    let chol = g.cholesky().ok_or(Error::Factorization)?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>())
}

/// `log det(HⁿHⁿ* + I) / ((2n+1)N)`.
pub fn per_antenna_mutual_info(h: &BandMatrix) -> Result<f64> {
    let rows = h.matrix.nrows();
    let g = h.gram() + DMatrix::identity(rows, rows);
    cholesky_logdet(g).map(|v| v / rows as f64)
}

/// Reusable simulation context for one model and window.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    model: &'a ChannelModel,
    half_window: usize,
    // None when the channel has no random part
    generator: Option<FieldGenerator>,
}

impl<'a> Simulator<'a> {
    pub fn new(model: &'a ChannelModel, half_window: usize) -> Result<Self> {
        let l = model.lag_span();
        let rows = (2 * half_window + 1) * model.n_rx();
        let cols = (2 * half_window + 2 * l + 1) * model.n_tx();
        if rows > MAX_ROWS || cols > MAX_COLS {
            return Err(Error::DimensionCap { rows, cols });
        }
        let generator = if model.sigma_sq() > 0.0 {
            Some(FieldGenerator::new(model.doppler(), 2 * half_window + 1)?)
        } else {
            None
        };
        Ok(Simulator {
            model,
            half_window,
            generator,
        })
    }

    pub fn generator(&self) -> Option<&FieldGenerator> {
        self.generator.as_ref()
    }

    /// One independent field per lag with a nonzero profile tap.
    pub fn generate_fields<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<LagField> {
        let Some(generator) = &self.generator else {
            return Vec::new();
        };
        let l = self.model.lag_span() as i64;
        (-l..=l)
            .filter(|&d| self.model.profile().amplitude(d) > 0.0)
            .map(|d| generate_lag_field(generator, d, self.model.n_rx(), self.model.n_tx(), rng))
            .collect()
    }

    pub fn assemble(&self, fields: &[LagField]) -> BandMatrix {
        let m = self.model;
        let (n_rx, n_tx, l) = (m.n_rx(), m.n_tx(), m.lag_span());
        let blocks = 2 * self.half_window + 1;
        let mut matrix = DMatrix::zeros(blocks * n_rx, (blocks + 2 * l) * n_tx);
        let inv_sqrt_t = 1.0 / (n_tx as f64).sqrt();

        for i in 0..blocks {
            for d in -(l as i64)..=l as i64 {
                // ℓ = m - d lands in column block i - d + L
                let col = (i as i64 - d + l as i64) as usize * n_tx;
                let mut view = matrix.view_mut((i * n_rx, col), (n_rx, n_tx));
                if let Some(a) = m.los().block(d) {
                    view += a;
                }
                if let Some(field) = fields.iter().find(|f| f.lag == d) {
                    let scale = C64::from(m.profile().amplitude(d) * inv_sqrt_t);
                    view += &field.samples[i] * scale;
                }
            }
        }
        BandMatrix {
            half_window: self.half_window,
            lag_span: l,
            n_rx,
            n_tx,
            matrix,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BandMatrix {
        let fields = self.generate_fields(rng);
        self.assemble(&fields)
    }

    /// Per-antenna mutual information of trial `index` under `seed`.
    pub fn trial(&self, seed: u64, index: usize) -> Result<f64> {
        let mut rng = trial_rng(seed, index);
        per_antenna_mutual_info(&self.sample(&mut rng))
    }
}

/// Independent stream per trial, split from one master seed.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// One draw of `Hⁿ` for `model`.
pub fn assemble_band_matrix<R: Rng + ?Sized>(
    model: &ChannelModel,
    half_window: usize,
    rng: &mut R,
) -> Result<BandMatrix> {
    Ok(Simulator::new(model, half_window)?.sample(rng))
}

/// Mean per-antenna mutual information over `config.trials` independent
/// windows.
pub fn estimate(model: &ChannelModel, config: &McConfig) -> Result<McEstimate> {
    if config.trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    let sim = Simulator::new(model, config.half_window)?;
    let samples = (0..config.trials)
        .map(|i| sim.trial(config.seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(McEstimate::from_samples(samples, true))
}

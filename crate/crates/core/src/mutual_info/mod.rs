//! Deterministic-equivalent mutual information per receive antenna (nats).
//!
//! With `(𝝋, 𝝋̃)` the solution at `z = -1` and `ζ`, `ζ̃` the corresponding
//! convolutions,
//!
//! ```text
//! 𝓘 = (1/N) ∫ log det((1 + ζ̃) I_N + (𝐀𝐀*)(f)/(1 + ζ)) df
//!   + (T/N) ∫ log(1 + ζ) df
//!   - (T/N) ∫∫ σ² 𝜸(f - v) 𝝋̃(v) 𝝋(f) dv df
//! ```
//!
//! An independent route integrates `1/t - p(-t)` over `t ∈ [1, ∞)`.

mod mp;

use alloc::vec::Vec;

use num_traits::Float;

use crate::channel::ChannelModel;
use crate::deq::{solve, stieltjes_p, zetas, DeqState, SolverDiagnostics, SolverOptions};
use crate::{Error, Result, C64};

pub use mp::{mp_mutual_information, mp_stieltjes, MpLaw};

#[derive(Debug, Clone, PartialEq)]
pub struct MutualInfoResult {
    /// `term_logdet + term_log_scalar - term_cross`.
    pub total: f64,
    pub term_logdet: f64,
    pub term_log_scalar: f64,
    pub term_cross: f64,
    pub state: DeqState,
    pub diagnostics: SolverDiagnostics,
}

/// Solves at `z = -1` and evaluates the three integrals on the grid.
pub fn deq_mutual_information(
    model: &ChannelModel,
    opts: &SolverOptions,
) -> Result<MutualInfoResult> {
    let (state, diagnostics) = solve(model, C64::new(-1.0, 0.0), opts)?;
    let (term_logdet, term_log_scalar, term_cross) = terms(&state, model);
    Ok(MutualInfoResult {
        total: term_logdet + term_log_scalar - term_cross,
        term_logdet,
        term_log_scalar,
        term_cross,
        state,
        diagnostics,
    })
}

fn terms(state: &DeqState, model: &ChannelModel) -> (f64, f64, f64) {
    let grid = model.grid();
    let n = model.n_rx() as f64;
    let ratio = model.n_tx() as f64 / n;
    let (zeta, zeta_t) = zetas(state, model);

    let logdet: Vec<f64> = (0..grid.len())
        .map(|j| {
            let shift = 1.0 + zeta_t[j].re;
            let scale = 1.0 + zeta[j].re;
            model
                .rx_eigenvalues(j)
                .iter()
                .map(|&l| (shift + l / scale).ln())
                .sum()
        })
        .collect();
    let log_scalar: Vec<f64> = zeta.iter().map(|v| v.re.ln_1p()).collect();
    let cross: Vec<f64> = state
        .phi
        .iter()
        .zip(&zeta_t)
        .map(|(p, zt)| (p * zt).re)
        .collect();

    (
        grid.quadrature(&logdet) / n,
        ratio * grid.quadrature(&log_scalar),
        ratio * grid.quadrature(&cross),
    )
}

/// `(1/N) ∫ log det(I_N + (𝐀𝐀*)(f)) df` for a model without random part.
pub fn deterministic_only_mutual_info(model: &ChannelModel) -> Result<f64> {
    if model.sigma_sq() != 0.0 {
        return Err(Error::invalid("sigma_sq", "must be zero for the deterministic formula"));
    }
    let grid = model.grid();
    let logdet: Vec<f64> = (0..grid.len())
        .map(|j| model.rx_eigenvalues(j).iter().map(|l| l.ln_1p()).sum())
        .collect();
    Ok(grid.quadrature(&logdet) / model.n_rx() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureEstimate {
    /// Trapezoid value of `∫_1^{t_max} (1/t - p(-t)) dt`.
    pub value: f64,
    /// Upper bound `3(a² + σ²)/t_max` on the neglected tail (lower bound 0).
    pub tail_upper: f64,
    /// `(t, 1/t - p(-t))` at each ladder point.
    pub nodes: Vec<(f64, f64)>,
}

impl QuadratureEstimate {
    /// Interval that contains the full integral up to quadrature error.
    pub fn interval(&self) -> (f64, f64) {
        (self.value, self.value + self.tail_upper)
    }
}

/// `∫_1^∞ (1/t - p(-t)) dt`, on `n_t` log-spaced points of `[1, t_max]`
/// with the trapezoid rule in `log t` plus Gregory end corrections.
pub fn mutual_info_via_quadrature(
    model: &ChannelModel,
    t_max: f64,
    n_t: usize,
    opts: &SolverOptions,
) -> Result<QuadratureEstimate> {
    if !(t_max >= 10.0) || !t_max.is_finite() {
        return Err(Error::invalid("t_max", "must be at least 10"));
    }
    if n_t < 16 {
        return Err(Error::invalid("n_t", "need at least 16 ladder points"));
    }
    let span = t_max.ln();
    let step = span / (n_t - 1) as f64;
    let nodes = (0..n_t)
        .map(|k| {
            let t = (k as f64 * step).exp();
            let (state, _) = solve(model, C64::new(-t, 0.0), opts)?;
            let p = stieltjes_p(&state, model).re;
            Ok((t, 1.0 / t - p))
        })
        .collect::<Result<Vec<_>>>()?;

    // dt = t ds
    let h: Vec<f64> = nodes.iter().map(|&(t, g)| t * g).collect();
    let value = gregory_trapezoid(&h, step);
    let a = model.spectral_norm_sum();
    Ok(QuadratureEstimate {
        value,
        tail_upper: 3.0 * (a * a + model.sigma_sq()) / t_max,
        nodes,
    })
}

/// Trapezoid rule on equispaced samples with Gregory end corrections through
/// second differences (fourth order for smooth integrands). Needs at least
/// three samples.
pub(crate) fn gregory_trapezoid(f: &[f64], step: f64) -> f64 {
    let n = f.len() - 1;
    let trapezoid = f.iter().sum::<f64>() - 0.5 * (f[0] + f[n]);
    let first = (f[n] - f[n - 1]) - (f[1] - f[0]);
    let second = (f[n] - 2.0 * f[n - 1] + f[n - 2]) + (f[2] - 2.0 * f[1] + f[0]);
    step * (trapezoid - first / 12.0 - second / 24.0)
}

#[cfg(test)]
mod tests;

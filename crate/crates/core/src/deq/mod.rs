//! Coupled fixed-point system for `𝝋(f,z)` and `𝝋̃(f,z)`.
//!
//! For `z` off `[0, ∞)` the pair solves
//!
//! ```text
//! 𝝋(f,z)  = tr S(f,z) / T,   S  = [-z(1 + ζ̃) I_N + (𝐀𝐀*)(f) / (1 + ζ)]⁻¹
//! 𝝋̃(f,z) = tr S̃(f,z) / T,  S̃ = [-z(1 + ζ) I_T + (𝐀*𝐀)(f) / (1 + ζ̃)]⁻¹
//! ζ(f)  = σ² ∫ 𝜸(u - f) 𝝋(u,z) du
//! ζ̃(f) = σ² ∫ 𝜸(f - u) 𝝋̃(u,z) du
//! ```
//!
//! The solver iterates the map `h_z` from `𝝋 = -(N/T)/z`, `𝝋̃ = -1/z`.
//! Both inverses are diagonal in the eigenbasis of the Gram matrices, so each
//! application costs `O(F·(N+T))` plus the two circular convolutions.

mod stieltjes;

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::channel::ChannelModel;
use crate::{Error, Result, C64};

pub use stieltjes::{
    check_point, check_stieltjes_properties, stieltjes_p, LadderPoint, PointCheck,
    StieltjesReport,
};

/// Iterate of the fixed-point map at a single `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeqState {
    pub z: C64,
    pub phi: Vec<C64>,
    pub phi_tilde: Vec<C64>,
}

impl DeqState {
    /// Starting point `𝝋 = -(N/T)/z`, `𝝋̃ = -1/z`.
    pub fn initial(model: &ChannelModel, z: C64) -> Self {
        let f = model.grid().len();
        let inv = -z.inv();
        DeqState {
            z,
            phi: alloc::vec![inv * model.c(); f],
            phi_tilde: alloc::vec![inv; f],
        }
    }

    /// Sup-norm distance over both components.
    pub fn distance(&self, other: &DeqState) -> f64 {
        sup_diff(&self.phi, &other.phi).max(sup_diff(&self.phi_tilde, &other.phi_tilde))
    }
}

fn sup_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target for the sup-norm change of one undamped application of `h_z`.
    pub tol: f64,
    pub max_iter: usize,
    /// `next = (1 - d) h_z(cur) + d cur`.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            max_iter: 100_000,
            damping: 0.0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::invalid("damping", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    /// Sup-norm change of the last undamped application of `h_z`.
    pub final_residual: f64,
    /// Ratios of successive residuals.
    pub contraction_estimates: Vec<f64>,
    /// Damping in effect when the iteration stopped.
    pub damping: f64,
}

/// Damping switched in when the residual grows this many times in a row.
const OSCILLATION_RUN: usize = 3;
const FALLBACK_DAMPING: f64 = 0.5;

/// Circular convolutions with the Doppler spectrum on the grid.
pub(crate) struct Convolver<'a> {
    spectrum: &'a [f64],
    constant: Option<f64>,
}

impl<'a> Convolver<'a> {
    pub(crate) fn new(spectrum: &'a [f64]) -> Self {
        let first = spectrum[0];
        let constant = spectrum.iter().all(|&s| s == first).then_some(first);
        Convolver { spectrum, constant }
    }

    /// `(𝜸(f) ⋆ x)(f_j) = (1/F) Σ_l 𝜸(f_j - f_l) x_l`.
    pub(crate) fn forward(&self, x: &[C64]) -> Vec<C64> {
        self.convolve(x, |j, l, f| (j + f - l) % f)
    }

    /// `(𝜸(-f) ⋆ x)(f_j) = (1/F) Σ_l 𝜸(f_l - f_j) x_l`.
    pub(crate) fn reflected(&self, x: &[C64]) -> Vec<C64> {
        self.convolve(x, |j, l, f| (l + f - j) % f)
    }

    fn convolve(&self, x: &[C64], index: impl Fn(usize, usize, usize) -> usize) -> Vec<C64> {
        let f = self.spectrum.len();
        debug_assert_eq!(x.len(), f);
        if let Some(g) = self.constant {
            let mean = x.iter().sum::<C64>() / f as f64;
            return alloc::vec![mean * g; f];
        }
        (0..f)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(l, v)| v * self.spectrum[index(j, l, f)])
                    .sum::<C64>()
                    / f as f64
            })
            .collect()
    }
}

/// `ζ = σ² 𝜸(-f) ⋆ 𝝋` and `ζ̃ = σ² 𝜸(f) ⋆ 𝝋̃`.
pub(crate) fn zetas(state: &DeqState, model: &ChannelModel) -> (Vec<C64>, Vec<C64>) {
    let sigma_sq = model.sigma_sq();
    let f = model.grid().len();
    if sigma_sq == 0.0 {
        let zero = alloc::vec![C64::new(0.0, 0.0); f];
        return (zero.clone(), zero);
    }
    let conv = Convolver::new(model.doppler().spectrum());
    let scale = |v: Vec<C64>| v.into_iter().map(|x| x * sigma_sq).collect::<Vec<_>>();
    (
        scale(conv.reflected(&state.phi)),
        scale(conv.forward(&state.phi_tilde)),
    )
}

/// One application of `h_z`.
pub fn apply_map(state: &DeqState, model: &ChannelModel) -> Result<DeqState> {
    let f = model.grid().len();
    if state.phi.len() != f || state.phi_tilde.len() != f {
        return Err(Error::invalid("state", "state and model use different grids"));
    }
    let z = state.z;
    let t = model.n_tx() as f64;
    let (zeta, zeta_t) = zetas(state, model);

    let mut phi = Vec::with_capacity(f);
    let mut phi_tilde = Vec::with_capacity(f);
    for j in 0..f {
        let one_zeta = C64::new(1.0, 0.0) + zeta[j];
        let one_zeta_t = C64::new(1.0, 0.0) + zeta_t[j];
        if one_zeta.norm() == 0.0 || one_zeta_t.norm() == 0.0 {
            return Err(Error::Singular(j));
        }
        let trace_inv = |shift: C64, scale: C64, eigs: &[f64]| -> Result<C64> {
            eigs.iter().try_fold(C64::new(0.0, 0.0), |acc, &lambda| {
                let d = shift + lambda / scale;
                if d.norm() == 0.0 {
                    Err(Error::Singular(j))
                } else {
                    Ok(acc + d.inv())
                }
            })
        };
        let tr = trace_inv(-z * one_zeta_t, one_zeta, model.rx_eigenvalues(j))?;
        let tr_t = trace_inv(-z * one_zeta, one_zeta_t, model.tx_eigenvalues(j))?;
        if !(tr.re.is_finite() && tr.im.is_finite() && tr_t.re.is_finite() && tr_t.im.is_finite())
        {
            return Err(Error::Singular(j));
        }
        phi.push(tr / t);
        phi_tilde.push(tr_t / t);
    }
    Ok(DeqState { z, phi, phi_tilde })
}

/// Accepts `z` with `Im z > 0`, or real `z < 0`.
pub(crate) fn check_z(z: C64) -> Result<()> {
    let ok = z.re.is_finite()
        && z.im.is_finite()
        && (z.im > 0.0 || (z.im == 0.0 && z.re < 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::invalid("z", "must satisfy Im z > 0 or be real and negative"))
    }
}

/// Solves the system at `z` starting from [`DeqState::initial`].
pub fn solve(
    model: &ChannelModel,
    z: C64,
    opts: &SolverOptions,
) -> Result<(DeqState, SolverDiagnostics)> {
    check_z(z)?;
    solve_from(model, DeqState::initial(model, z), opts)
}

/// Solves the system starting from an arbitrary state.
pub fn solve_from(
    model: &ChannelModel,
    initial: DeqState,
    opts: &SolverOptions,
) -> Result<(DeqState, SolverDiagnostics)> {
    opts.validate()?;
    check_z(initial.z)?;

    let mut cur = initial;
    let mut damping = opts.damping;
    let mut diag = SolverDiagnostics::default();
    let mut prev_residual = f64::NAN;
    let mut increases = 0;

    for iter in 1..=opts.max_iter {
        let image = apply_map(&cur, model)?;
        let residual = image.distance(&cur);
        if !residual.is_finite() {
            return Err(Error::NotConverged {
                iterations: iter,
                residual,
            });
        }
        if prev_residual > 0.0 {
            diag.contraction_estimates.push(residual / prev_residual);
        }
        diag.iterations = iter;
        diag.final_residual = residual;

        if residual < opts.tol {
            diag.damping = damping;
            check_invariants(&image, model)?;
            return Ok((image, diag));
        }

        increases = if residual > prev_residual { increases + 1 } else { 0 };
        if increases >= OSCILLATION_RUN && damping < FALLBACK_DAMPING {
            damping = FALLBACK_DAMPING;
            increases = 0;
        }
        prev_residual = residual;

        cur = if damping > 0.0 {
            let mix = |new: &[C64], old: &[C64]| {
                new.iter()
                    .zip(old)
                    .map(|(n, o)| n * (1.0 - damping) + o * damping)
                    .collect()
            };
            DeqState {
                z: cur.z,
                phi: mix(&image.phi, &cur.phi),
                phi_tilde: mix(&image.phi_tilde, &cur.phi_tilde),
            }
        } else {
            image
        };
    }

    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual: diag.final_residual,
    })
}

/// Sign and magnitude constraints every solution satisfies: positivity of
/// `Im 𝝋`, `Im 𝝋̃`, `Im z𝝋`, `Im z𝝋̃` and the `c/Im z`, `1/Im z` bounds on
/// the upper half-plane; real positive values left of the origin.
pub fn check_invariants(state: &DeqState, model: &ChannelModel) -> Result<()> {
    let z = state.z;
    let all = state.phi.iter().chain(&state.phi_tilde);
    if all.clone().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvariantViolation("non-finite value".into()));
    }

    if z.im == 0.0 {
        for (name, values) in [("phi", &state.phi), ("phi_tilde", &state.phi_tilde)] {
            if let Some(v) = values
                .iter()
                .find(|v| !(v.re > 0.0) || v.im.abs() > 1e-12 * v.norm())
            {
                return Err(Error::InvariantViolation(format!(
                    "{name} = {v} is not real positive at z = {z}"
                )));
            }
        }
        return Ok(());
    }

    let y = z.im;
    let bounds = [("phi", &state.phi, model.c() / y), ("phi_tilde", &state.phi_tilde, 1.0 / y)];
    for (name, values, bound) in bounds {
        for v in values.iter() {
            let zv = z * v;
            // roundoff allowance on quantities that vanish for degenerate models
            let slack = 1e-12 * z.norm() * v.norm();
            if v.im < -1e-12 * v.norm() || zv.im < -slack {
                return Err(Error::InvariantViolation(format!(
                    "{name} = {v} leaves the upper half-plane at z = {z}"
                )));
            }
            if v.norm() > bound + 1e-12 * (1.0 + bound) {
                return Err(Error::InvariantViolation(format!(
                    "|{name}| = {} exceeds {bound} at z = {z}",
                    v.norm()
                )));
            }
        }
    }
    Ok(())
}

/// Left side of the contraction-region inequality,
/// `max(c,1) σ² (a²|z|²/(Im z)⁴ + |z|/(Im z)²)` with `a = Σ‖A(k)‖`.
pub fn contraction_region_lhs(model: &ChannelModel, z: C64) -> f64 {
    let y = z.im;
    let a = model.spectral_norm_sum();
    let r = z.norm();
    model.c().max(1.0) * model.sigma_sq() * (a * a * r * r / y.powi(4) + r / (y * y))
}

/// Whether `z` lies in the region where `h_z` provably halves successive
/// differences.
pub fn in_contraction_region(model: &ChannelModel, z: C64) -> bool {
    z.im > 0.0 && contraction_region_lhs(model, z) < 0.5
}

//! Marchenko–Pastur law: the limiting spectrum when the channel is centered.

use core::f64::consts::PI;

use num_traits::Float;

use crate::deq::check_z;
use crate::quad::adaptive_simpson;
use crate::{Error, Result, C64};

const QUAD_TOL: f64 = 1e-13;

/// Marchenko–Pastur law with ratio `c = N/T` and scale `σ²`: density
/// `sqrt((λ₊ - λ)(λ - λ₋)) / (2π c σ² λ)` on `[λ₋, λ₊]` plus an atom of mass
/// `max(1 - 1/c, 0)` at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpLaw {
    pub sigma_sq: f64,
    pub c: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub atom_at_zero: f64,
}

impl MpLaw {
    pub fn new(sigma_sq: f64, c: f64) -> Result<Self> {
        if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
            return Err(Error::invalid("sigma_sq", "must be positive and finite"));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invalid("c", "must be positive and finite"));
        }
        let sc = c.sqrt();
        Ok(MpLaw {
            sigma_sq,
            c,
            lambda_minus: sigma_sq * (1.0 - sc) * (1.0 - sc),
            lambda_plus: sigma_sq * (1.0 + sc) * (1.0 + sc),
            atom_at_zero: (1.0 - 1.0 / c).max(0.0),
        })
    }

    pub fn density(&self, lambda: f64) -> f64 {
        if lambda <= self.lambda_minus || lambda >= self.lambda_plus || lambda <= 0.0 {
            return 0.0;
        }
        ((self.lambda_plus - lambda) * (lambda - self.lambda_minus)).sqrt()
            / (2.0 * PI * self.c * self.sigma_sq * lambda)
    }

    /// `∫ g(λ) density(λ) dλ` through `λ = m + r cos θ`, which removes the
    /// square-root edges (and the `1/λ` pole when `λ₋ = 0`).
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let m = 0.5 * (self.lambda_plus + self.lambda_minus);
        let r = 0.5 * (self.lambda_plus - self.lambda_minus);
        let hard_edge = self.lambda_minus == 0.0;
        let integrand = |theta: f64| {
            let cos = theta.cos();
            let lambda = (m + r * cos).max(0.0);
            // r² sin²θ / λ, written without cancellation at λ = 0
            let weight = if hard_edge {
                r * (1.0 - cos)
            } else {
                r * r * (1.0 - cos) * (1.0 + cos) / lambda
            };
            g(lambda) * weight
        };
        let v = adaptive_simpson(integrand, 0.0, PI, QUAD_TOL)?;
        Ok(v / (2.0 * PI * self.c * self.sigma_sq))
    }

    /// Mass of the continuous part.
    pub fn density_mass(&self) -> Result<f64> {
        self.integrate(|_| 1.0)
    }

    /// `∫ log(1 + λ) dMP(λ)`; the atom contributes nothing.
    pub fn mutual_information(&self) -> Result<f64> {
        self.integrate(|l| l.ln_1p())
    }
}

/// `∫ log(1 + λ) dMP(λ)` for scale `σ²` and ratio `c`.
pub fn mp_mutual_information(sigma_sq: f64, c: f64) -> Result<f64> {
    MpLaw::new(sigma_sq, c)?.mutual_information()
}

/// Solution `(α, α̃)` of `α = c/(-z - zσ²α̃)`, `α̃ = 1/(-z - zσ²α)`, i.e. the
/// root of `zσ²α² + (z - σ²(1-c))α + c = 0` with `Im α > 0` (`Im z > 0`) or
/// `α > 0` (`z < 0`).
pub fn mp_stieltjes(sigma_sq: f64, c: f64, z: C64) -> Result<(C64, C64)> {
    check_z(z)?;
    if !(sigma_sq >= 0.0) || !sigma_sq.is_finite() {
        return Err(Error::invalid("sigma_sq", "must be finite and nonnegative"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid("c", "must be positive and finite"));
    }
    if sigma_sq == 0.0 {
        return Ok((-c / z, -1.0 / z));
    }

    let a = z * sigma_sq;
    let b = z - sigma_sq * (1.0 - c);
    let root = (b * b - a * c * 4.0).sqrt();
    let q = if (b + root).norm() >= (b - root).norm() {
        -(b + root) / 2.0
    } else {
        -(b - root) / 2.0
    };
    let candidates = [q / a, c / q];

    let alpha = if z.im == 0.0 {
        let pick = candidates
            .iter()
            .copied()
            .max_by(|x, y| x.re.total_cmp(&y.re))
            .unwrap();
        C64::new(pick.re, 0.0)
    } else {
        let score = |v: &C64| v.im.min((z * v).im);
        candidates
            .iter()
            .copied()
            .max_by(|x, y| score(x).total_cmp(&score(y)))
            .unwrap()
    };
    let alpha_tilde = -1.0 / (z * (1.0 + alpha * sigma_sq));
    Ok((alpha, alpha_tilde))
}

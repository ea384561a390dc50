use alloc::vec::Vec;

use num_traits::Float;

use super::{solve, DeqState, SolverOptions};
use crate::channel::ChannelModel;
use crate::{Result, C64};

/// `p(z) = (1/N) ∫ tr S(f,z) df = (T/N) ∫ 𝝋(f,z) df`.
pub fn stieltjes_p(state: &DeqState, model: &ChannelModel) -> C64 {
    model.grid().quadrature_complex(&state.phi) / model.c()
}

/// Per-point outcome of the Stieltjes-transform checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCheck {
    pub z: C64,
    pub p: C64,
    pub im_p_positive: bool,
    pub im_zp_positive: bool,
    /// `|p| ≤ 1/Im z`.
    pub p_bounded: bool,
    /// `Im 𝝋 > 0` and `Im z𝝋 > 0` on every grid point.
    pub phi_positive: bool,
    pub phi_tilde_positive: bool,
    /// `|𝝋| ≤ c/Im z` on every grid point.
    pub phi_bounded: bool,
    pub phi_tilde_bounded: bool,
}

impl PointCheck {
    pub fn passed(&self) -> bool {
        self.im_p_positive
            && self.im_zp_positive
            && self.p_bounded
            && self.phi_positive
            && self.phi_tilde_positive
            && self.phi_bounded
            && self.phi_tilde_bounded
    }
}

/// Checks a state at `Im z > 0` against the properties of Stieltjes
/// transforms of measures carried by `[0, ∞)`. Positivity is strict.
pub fn check_point(state: &DeqState, model: &ChannelModel) -> PointCheck {
    let z = state.z;
    let y = z.im;
    let p = stieltjes_p(state, model);
    let positive = |v: &[C64]| v.iter().all(|x| x.im > 0.0 && (z * x).im > 0.0);
    let bounded = |v: &[C64], b: f64| v.iter().all(|x| x.norm() <= b + 1e-12);
    PointCheck {
        z,
        p,
        im_p_positive: p.im > 0.0,
        im_zp_positive: (z * p).im > 0.0,
        p_bounded: p.norm() <= 1.0 / y + 1e-12,
        phi_positive: positive(&state.phi),
        phi_tilde_positive: positive(&state.phi_tilde),
        phi_bounded: bounded(&state.phi, model.c() / y),
        phi_tilde_bounded: bounded(&state.phi_tilde, 1.0 / y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderPoint {
    pub y: f64,
    /// `|-iy p(iy) - 1|`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StieltjesReport {
    pub points: Vec<PointCheck>,
    pub ladder: Vec<LadderPoint>,
    /// The ladder deviations strictly decrease as `y` grows.
    pub ladder_decreasing: bool,
}

impl StieltjesReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(PointCheck::passed) && self.ladder_decreasing
    }
}

/// Solves at every sample point and at `z = iy` for each `y` of the ladder
/// (sorted ascending), and collects the checks. Solver failures are errors;
/// property failures are data in the report.
pub fn check_stieltjes_properties(
    model: &ChannelModel,
    points: &[C64],
    ladder: &[f64],
    opts: &SolverOptions,
) -> Result<StieltjesReport> {
    let points = points
        .iter()
        .map(|&z| solve(model, z, opts).map(|(s, _)| check_point(&s, model)))
        .collect::<Result<Vec<_>>>()?;

    let mut ys: Vec<f64> = ladder.to_vec();
    ys.sort_by(|a, b| a.total_cmp(b));
    let ladder = ys
        .iter()
        .map(|&y| {
            let z = C64::new(0.0, y);
            solve(model, z, opts).map(|(s, _)| LadderPoint {
                y,
                deviation: (C64::new(0.0, -y) * stieltjes_p(&s, model) - 1.0).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ladder_decreasing = ladder.windows(2).all(|w| w[1].deviation < w[0].deviation);

    Ok(StieltjesReport {
        points,
        ladder,
        ladder_decreasing,
    })
}

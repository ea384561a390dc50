//! Large-system mutual information of time-correlated, frequency-selective,
//! non-centered MIMO channels.
//!
//! The channel is modeled as a band random operator whose blocks combine a
//! deterministic line-of-sight part with a Gaussian part that is correlated
//! across time (Doppler) and spread across `2L+1` delay taps. As the antenna
//! counts grow, the per-antenna mutual information is approximated by a
//! deterministic quantity obtained from a pair of coupled fixed-point
//! equations over the normalized frequency `f ∈ [0, 1)`.
//!
//! The crate is `no_std` (with `alloc`) and covers:
//!
//! * [`channel`]: Doppler spectra, power profiles, LOS taps, frequency grids.
//! * [`deq`]: the fixed-point solver and the Stieltjes transform `p(z)`.
//! * [`mutual_info`]: the deterministic-equivalent mutual information, the
//!   quadrature cross-check and the Marchenko–Pastur oracles.
//! * [`montecarlo`]: finite-window simulation of the band matrix.
#![no_std]
// Float math comes from num_traits::Float; whenever std is linked into the
// build its inherent methods win and those imports become unused.
#![allow(unused_imports)]
// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod deq;
mod error;
mod fft;
mod linalg;
pub mod montecarlo;
pub mod mutual_info;
pub mod quad;

pub use error::{Error, Result};

/// Double precision complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

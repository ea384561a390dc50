//! Channel models and their frequency-domain representations.
//!
//! A [`ChannelModel`] gathers everything the solver and the simulator need:
//! antenna counts, the Doppler covariance and spectrum, the multipath power
//! profile, the line-of-sight taps, and the transfer function sampled on a
//! shared [`FrequencyGrid`].

mod doppler;
mod grid;
mod los;
mod model;
mod profile;

pub use doppler::{DopplerKind, DopplerModel, COVARIANCE_CUTOFF};
pub use grid::{FrequencyGrid, DEFAULT_GRID_SIZE};
pub use los::{transfer_function, LosTaps};
pub use model::{ChannelModel, RICEAN_K_INFINITE};
pub use profile::PowerProfile;

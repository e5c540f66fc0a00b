//! Near-field XL-MIMO channel simulation and beam-training evaluation.
//!
//! The crate generates spatially non-stationary spherical-wavefront multipath
//! channels for large linear arrays, builds far-field (DFT) and near-field
//! (polar-domain) codebooks, runs exhaustive beam training and sweeps beam
//! gain over distance and achievable rate over transmit SNR.

pub mod channel;
pub mod codebook;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod steering;
pub mod stochastic;
pub mod training;

pub use channel::{ChannelRealization, Path, PathKind, SnsMask, VisibilityRegion, WavefrontModel};
pub use codebook::{Codebook, CodebookKind, Codeword};
pub use error::{NfError, Result};
pub use geometry::{ArrayGeometry, Layout, PolarPoint, SPEED_OF_LIGHT};
pub use steering::{SteeringModel, SteeringVector};
pub use stochastic::{ChannelModel, Drop, ScenarioConfig};
pub use training::TrainingOutcome;

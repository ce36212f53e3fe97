//! Distortion analysis for transmitting correlated Gaussian sources over a
//! Gaussian multiple-access channel or orthogonal channels.

pub mod af;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod gauss;
pub mod lt;
pub mod mc;
pub mod model;
pub mod optim;
pub mod orthogonal;
pub mod power;
pub mod sb;
pub mod side_info;

pub use error::{Error, Result};
pub use model::{ChannelSpec, Scheme, SchemeResult, SourceModel};

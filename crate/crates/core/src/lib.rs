pub mod error;
pub mod barrier;
pub mod domain;
pub mod exterior;
pub mod geometry;
pub mod msolver;
mod serde_inf;

pub use error::{Error, Result};
pub use geometry::{CurvePath, MetricKind, MetricModel, Point, RadialProfile, Vector};

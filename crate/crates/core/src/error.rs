use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({}, {}) lies outside the metric chart", .0.x, .0.y)]
    OutsideChart(Point),

    #[error("path left the metric chart at parameter {param}")]
    ChartExit { param: f64 },

    #[error("{what} did not converge (best estimate {best}, bracket [{lower}, {upper}])")]
    NonConvergence {
        what: &'static str,
        best: f64,
        lower: f64,
        upper: f64,
    },

    #[error("point ({}, {}) is not in the domain", .0.x, .0.y)]
    OutsideDomain(Point),

    #[error("distance {rho} exceeds the barrier tube width {eps}")]
    OutOfTube { rho: f64, eps: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("out of range: {0}")]
    Range(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! First-order ("semiclassical") quantisation of Poisson, connection and
//! metric data on a coordinate chart.
//!
//! Everything is evaluated pointwise: fields are turned into third-order
//! [`Jet`]s at a chart point, tensors are dense arrays of jets, and the
//! deformation parameter `λ` is carried as an exact grading (`λ² = 0`) rather
//! than as a small number.
//!
//! The numeric core is generic over the real scalar ([`Real`]); the aliases
//! at the crate root fix it to `f64` for everyday use.

pub mod evolution;
pub mod expr;
pub mod geometries;
pub mod geometry;
pub mod jet;
pub mod lambda;
pub mod report;
pub mod scalar;
pub mod semiquant;
pub mod tensor;

use thiserror::Error;

pub use expr::{parse, FieldExpr};
pub use jet::{Jet, Univariate};
pub use lambda::LambdaScalar;
pub use scalar::Real;
pub use tensor::{QTensor, Tensor};

pub type Jet64 = jet::Jet<f64>;
pub type Jet32 = jet::Jet<f32>;
pub type Lambda64 = lambda::LambdaScalar<f64>;
pub type Lambda32 = lambda::LambdaScalar<f32>;
pub type Tensor64 = tensor::Tensor<f64>;
pub type QTensor64 = tensor::QTensor<f64>;
pub type Geometry64 = geometry::GeometryData<f64>;
pub type PointGeometry64 = geometry::PointGeometry<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular scalar: classical part of divisor vanishes")]
    SingularScalar,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate metric at point {0:?}")]
    DegenerateMetric(Vec<f64>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown geometry `{0}`")]
    UnknownGeometry(String),
    #[error("construction routes for {what} disagree by {residual:e}")]
    Inconsistent { what: String, residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

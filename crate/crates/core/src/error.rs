use std::fmt;

use thiserror::Error;

/// Which metric axiom a distance table broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricAxiom {
    Diagonal,
    Symmetry,
    Separation,
    Triangle,
    NotFinite,
}

impl fmt::Display for MetricAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MetricAxiom::Diagonal => "nonzero diagonal",
            MetricAxiom::Symmetry => "asymmetric distance",
            MetricAxiom::Separation => "zero distance between distinct points",
            MetricAxiom::Triangle => "triangle inequality",
            MetricAxiom::NotFinite => "negative or non-finite distance",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum NhsError {
    #[error("space must contain at least one point")]
    EmptySpace,
    #[error("weight of point {index} is {weight}, must be positive and finite")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("metric violation ({axiom}) at points {points:?}")]
    MetricViolation {
        axiom: MetricAxiom,
        points: Vec<usize>,
    },
    #[error("dimension mismatch: expected {expected}, found {found} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("all candidate radii coincide; cannot fit a growth exponent")]
    DegenerateRadii,
    #[error("ball ({inner_center}, {inner_radius}) is not contained in ({outer_center}, {outer_radius})")]
    NotNested {
        inner_center: usize,
        inner_radius: f64,
        outer_center: usize,
        outer_radius: f64,
    },
    #[error("invalid exponent {0}")]
    InvalidExponent(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("function has zero Campanato norm")]
    ZeroNorm,
    #[error("symbol b has zero Campanato norm")]
    ZeroNormB,
    #[error("theta is not nondecreasing near t = {0}")]
    NonMonotoneTheta(f64),
    #[error("Morrey norm of f is {0}, expected 1")]
    NotNormalized(f64),
    #[error("point index {index} out of range for a space of {len} points")]
    PointOutOfRange { index: usize, len: usize },
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("configuration error: {0}")]
    Spec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = NhsError> = std::result::Result<T, E>;

//! Morrey and Campanato norms, their parameter functions and the
//! experiments built on them.

mod experiments;
mod families;
mod norms;

use serde::{Deserialize, Serialize};

use crate::error::{NhsError, Result};
use crate::mmspace::PointCloudSpace;

pub use experiments::*;
pub use families::*;
pub use norms::*;

/// Function values aligned with the point order of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFunction {
    pub values: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::new(vec![c; n])
    }

    pub fn check_len(&self, space: &PointCloudSpace) -> Result<()> {
        if self.values.len() == space.len() {
            Ok(())
        } else {
            Err(NhsError::DimensionMismatch {
                what: "function values vs points",
                expected: space.len(),
                found: self.values.len(),
            })
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `c · f + d`.
    pub fn affine(&self, c: f64, d: f64) -> Self {
        Self::new(self.values.iter().map(|v| c * v + d).collect())
    }

    pub fn abs(&self) -> Self {
        Self::new(self.values.iter().map(|v| v.abs()).collect())
    }

    /// Constant on every point (all atoms carry positive weight).
    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

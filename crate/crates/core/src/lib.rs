//! Campanato, Morrey and Marcinkiewicz-type quantities on finite weighted
//! metric measure spaces.

pub mod error;
pub mod geometry;
pub mod mmspace;
pub mod lab;
pub mod operators;
pub mod report;
pub mod spaces;

pub use error::{NhsError, Result};
pub use geometry::{Ball, BallFamily, CoefficientValue, PairFamily};
pub use mmspace::{build_space, DominatingFunction, GeometryProfile, PointCloudSpace, SpaceData};
pub use report::CheckReport;

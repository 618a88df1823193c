//! Kernels, Marcinkiewicz integrals, maximal operators and the pointwise
//! estimates between them.

pub mod checks;
pub mod kernel;
pub mod marcinkiewicz;
pub mod maximal;

pub use checks::*;
pub use kernel::*;
pub use marcinkiewicz::*;
pub use maximal::*;

//! Exact polyhedral verification of effective cones of M̄0,5 and M̄0,6 bounded by
//! negative curves.

pub mod catalog;
pub mod error;
pub mod face;
pub mod kernel;
pub mod nefmin;
pub mod oracle;
pub mod report;

pub use error::{CatalogError, EngineError, KernelError};
pub use kernel::{BasisId, FarkasAnswer, InequalitySystem, Scalar, Vector};

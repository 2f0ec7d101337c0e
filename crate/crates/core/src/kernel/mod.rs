//! Exact rational linear algebra and polyhedral primitives.

pub mod dd;
pub mod farkas;
pub mod linalg;
pub mod rref;
pub mod scalar;
pub mod vector;

pub use dd::{extreme_rays, extreme_rays_with, facets, facets_with, DdOptions, FacetDescription};
pub use farkas::{cone_member, cone_member_raw, verify_answer, RawAnswer};
pub use rref::{rref_positive, PositiveRow};
pub use scalar::{format_scalar, int, parse_scalar, Scalar};
pub use vector::{dot, pair, BasisId, FarkasAnswer, Form, InequalitySystem, Side, Vector};

//! Exact construction of half-open zonotopes and oriented toric hyperplane
//! stratifications for a finite list of integer vectors, with verifiers for
//! the correspondence between the two.
//!
//! Everything is computed in exact arbitrary-precision arithmetic.

pub mod error;
pub mod instance;
pub mod linalg;
pub mod polyhedra;
pub mod restrict;
pub mod strata;
pub mod toric;
pub mod zonotope;

pub use error::{Error, Result};
pub use instance::Instance;
pub use strata::Stratum;
pub use zonotope::{GeneratorRealization, ZonotopeFace, ZonotopePoint};

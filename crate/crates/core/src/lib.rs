pub mod error;
pub mod linalg;
pub mod star_algebra;
pub mod tro;
pub mod derivation;
pub mod random;
pub mod structure_maps;

pub use error::{Error, Result};

/// Default relative tolerance for rank decisions and residual checks.
pub const DEFAULT_TOL: f64 = 1e-9;

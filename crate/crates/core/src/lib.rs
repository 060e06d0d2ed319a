//! Explicit decay bounds for matrix semigroups `e^{tA}` built from resolvent
//! information about the generator `A`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] holds the dense complex kernels (singular values, matrix
//!   exponential, eigenvalues) every other module relies on.
//! * [`resolvent`] certifies `r(ω)`, the reciprocal of the largest resolvent
//!   norm on the half-plane `Re z ≥ ω`.
//! * [`bounds`] turns `r(ω)` and a majorant `m(t)` into bound curves.
//! * [`split`] handles Riesz projections and the bound on the remainder
//!   `e^{tA}(I - Π₊)`.
//! * [`recursion`] extends finite-horizon majorants by repeated application of
//!   the main estimate.
//! * [`gallery`] builds the test operators.
//! * [`io`] reads and writes the matrix/CSV formats.

pub mod bounds;
pub mod error;
pub mod gallery;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod quad;
pub mod recursion;
pub mod resolvent;
pub mod split;

pub use bounds::{BoundCurve, BoundMethod, WeightSpec};
pub use error::{Error, ErrorKind, Result};
pub use gallery::DiscretizationSpec;
pub use linalg::{GrowthBound, OperatorMatrix};
pub use num_complex::Complex64 as C64;
pub use recursion::RecursionState;
pub use resolvent::{CertifiedInterval, ResolventProfile};
pub use split::{Contour, SpectralSplit};

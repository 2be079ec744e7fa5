//! Exact verification, refutation and search of covering systems of F_q[x].
//!
//! - [`ff`]: arithmetic in GF(q).
//! - [`polyring`]: polynomials over GF(q), residue enumeration, factoring.
//! - [`covering`]: the covering-system model and exhaustive verification.
//! - [`distortion`]: the exact distortion-method pipeline and its
//!   non-covering certificate.
//! - [`bounds`]: certified enclosures for the explicit constants and the
//!   field-size threshold beyond which no covering system exists.
//! - [`search`]: backtracking search for covering systems.

pub mod bounds;
pub mod covering;
pub mod distortion;
pub mod error;
pub mod ff;
pub mod polyring;
pub mod rational;
pub mod search;
mod text;

pub use error::{Error, Result};
pub use ff::{FieldCtx, FieldElem};
pub use polyring::{Factorization, Poly, ResidueSpace, DEFAULT_CAP};

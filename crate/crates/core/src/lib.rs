//! Decision procedure for symplectic packing by ellipsoids.
//!
//! The pipeline: approximate arbitrary ellipsoids by enclosing "simple" ones
//! (integer pairwise-coprime weights, via prime approximation), compare the
//! volume ledger against the manifold volume, build the weighted blow-up
//! class and evaluate the Kähler-cone criterion, then emit a feasibility
//! certificate. Companion modules provide the weighted-projective-space
//! cohomology ring, a seeded Monte Carlo volume oracle, and a numerical
//! plurisubharmonic gluing lab.

pub mod blowup;
pub mod coprime;
pub mod error;
pub mod packing;
pub mod psh;
pub mod scalar;
pub mod volume;
pub mod wps;

pub use error::{Error, Result};
pub use scalar::Scalar;

//! Exact exterior calculus for conservation-law structures: forms over the
//! rationals, bundle-level chart calculus, pointwise exterior differential
//! systems, the Gauss-map integral-element construction and the
//! energy-momentum tensor equivalence.

pub mod bundle;
pub mod eds;
pub mod emt;
pub mod error;
pub mod exterior;
pub mod gie;
pub mod linalg;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;

//! Successive refinement with cribbing decoders: rate regions, optimal tradeoff
//! curves, the dual multiple access channel regions, and a Monte Carlo
//! simulator of the random-binning schemes.

pub mod error;
pub mod mac;
pub mod prob;
pub mod region;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Real;

/// Joint pmf in double precision.
pub type Pmf = prob::JointPmf<f64>;
/// Joint pmf in single precision.
pub type Pmf32 = prob::JointPmf<f32>;
pub type Distortion = prob::DistortionSpec<f64>;
pub type Region = region::RegionSpec<f64>;
/// Inequality system with float coefficients.
pub type System = mac::IneqSystem<f64>;
/// Inequality system with exact rational coefficients.
pub type ExactSystem = mac::IneqSystem<num_rational::BigRational>;

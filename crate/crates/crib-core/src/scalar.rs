//! Scalar abstraction shared by the probability and region code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for probabilities and information measures.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Largest deviation of a total mass from one that is silently renormalized.
    fn renormalize_slack() -> Self {
        Self::lit(1e-6).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Tolerance for "sums to one" and "is zero" checks after renormalization.
    fn tolerance() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(16.0))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

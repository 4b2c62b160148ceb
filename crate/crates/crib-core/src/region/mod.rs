//! Rate regions for successive refinement with cribbing decoders, and the
//! search for optimal (R0, R1) tradeoff curves.

mod bernoulli;
mod search;
mod sr;

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::prob::CribFunction;
use crate::scalar::Real;

pub use bernoulli::{bernoulli_example, closed_form_corners, BernoulliExample, BernoulliFamily, ExampleCorners};
pub use search::{frontier, r0_zero_min_rate, FeasibleParameterization, FrontierSearch, SearchPoint};
pub use sr::{
    cascade_transform, conferencing_corner_points, conferencing_region, equitz_cover_region, setting_region,
    sr_corner_points, sr_region,
};

/// How much of Decoder 1's reconstruction Decoder 2 sees when producing symbol i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CribbingMode {
    /// The whole block.
    #[serde(rename = "noncausal", alias = "non-causal")]
    NonCausal,
    /// Symbols before i.
    StrictlyCausal,
    /// Symbols up to and including i.
    Causal,
}

impl CribbingMode {
    pub const ALL: [CribbingMode; 3] = [CribbingMode::NonCausal, CribbingMode::StrictlyCausal, CribbingMode::Causal];

    pub fn label(self) -> &'static str {
        match self {
            CribbingMode::NonCausal => "noncausal",
            CribbingMode::StrictlyCausal => "strictly-causal",
            CribbingMode::Causal => "causal",
        }
    }
}

impl fmt::Display for CribbingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// What Decoder 2 observes: the reconstruction itself or a deterministic function of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CribbingVariant {
    Perfect,
    DetFn(CribFunction),
}

impl CribbingVariant {
    pub fn label(&self) -> &'static str {
        match self {
            CribbingVariant::Perfect => "perfect",
            CribbingVariant::DetFn(_) => "detfn",
        }
    }

    /// The crib map on an alphabet of the given size (identity when perfect).
    pub fn function(&self, recon1_size: usize) -> CribFunction {
        match self {
            CribbingVariant::Perfect => CribFunction::identity(recon1_size),
            CribbingVariant::DetFn(g) => g.clone(),
        }
    }
}

/// A cooperation setting whose region is evaluated per joint distribution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    Cribbing { mode: CribbingMode, variant: CribbingVariant },
    NoCribbing,
}

impl Setting {
    pub fn perfect(mode: CribbingMode) -> Self {
        Setting::Cribbing { mode, variant: CribbingVariant::Perfect }
    }

    pub fn label(&self) -> String {
        match self {
            Setting::Cribbing { mode, variant } => format!("{}/{}", mode.label(), variant.label()),
            Setting::NoCribbing => "no-cribbing".to_string(),
        }
    }
}

/// A rate that may be unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rate<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Rate<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Rate::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Rate::Finite(v) => Some(v),
            Rate::Infinite => None,
        }
    }

    /// True when `self >= v`.
    pub fn at_least(self, v: T) -> bool {
        match self {
            Rate::Finite(r) => r >= v,
            Rate::Infinite => true,
        }
    }
}

impl<T: Real> Serialize for Rate<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rate::Finite(v) => s.serialize_f64(v.as_f64()),
            Rate::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<T: Real> fmt::Display for Rate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Finite(v) => write!(f, "{:.6}", v.as_f64()),
            Rate::Infinite => f.write_str("inf"),
        }
    }
}

/// Lower bounds on rates for one joint distribution; all bounds are clipped at zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionSpec<T> {
    pub sum_rate_lb: T,
    pub r0_lb: T,
    /// Bound on R0 + R12 when the decoders confer over a link of rate R12.
    pub r0_plus_r12_lb: Option<T>,
}

impl<T: Real> RegionSpec<T> {
    /// Membership with an unbounded conferencing link.
    pub fn contains(&self, r0: T, r1: Rate<T>) -> bool {
        let tol = T::tolerance();
        r0 >= T::zero()
            && r0 + tol >= self.r0_lb
            && match r1 {
                Rate::Finite(r1) => r1 >= T::zero() && r0 + r1 + tol >= self.sum_rate_lb,
                Rate::Infinite => true,
            }
    }

    pub fn contains_with_link(&self, r0: T, r1: Rate<T>, r12: Rate<T>) -> bool {
        let link_ok = match (self.r0_plus_r12_lb, r12) {
            (Some(lb), Rate::Finite(r12)) => r0 + r12 + T::tolerance() >= lb,
            _ => true,
        };
        link_ok && self.contains(r0, r1)
    }
}

/// One extreme point of a two-dimensional region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerPoint<T> {
    pub label: String,
    pub r0: T,
    pub r1: T,
}

/// A point on an optimal tradeoff curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub r0: f64,
    pub r1_min: f64,
}

/// How a frontier was computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub method: String,
    pub grid_step: f64,
    pub grid_cells: usize,
    pub refine_tol: f64,
    pub starts_per_point: usize,
    pub aux_size: Option<usize>,
}

/// Optimal (R0, R1) tradeoff at fixed distortions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Frontier {
    pub setting: Setting,
    pub d1: f64,
    pub d2: f64,
    /// Sorted by strictly increasing R0, with R1 nonincreasing.
    pub points: Vec<FrontierPoint>,
    /// Smallest feasible R0; at this common rate R1 is finite but below it no
    /// private rate suffices. `None` when the budgets are infeasible.
    pub r0_min: Option<f64>,
    /// Minimum of R0 + R1 with no restriction on R0.
    pub sum_rate_min: Option<f64>,
    pub provenance: Provenance,
}

impl Frontier {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum R1 at a given R0, interpolating the sampled sum-rate curve.
    pub fn r1_at(&self, r0: f64) -> Rate<f64> {
        let first = match self.points.first() {
            Some(p) => p,
            None => return Rate::Infinite,
        };
        if r0 < first.r0 - 1e-12 {
            return Rate::Infinite;
        }
        let last = self.points.last().unwrap();
        if r0 >= last.r0 {
            return Rate::Finite((last.r0 + last.r1_min - r0).max(0.0));
        }
        let k = self.points.partition_point(|p| p.r0 <= r0).max(1);
        let (a, b) = (self.points[k - 1], self.points[k]);
        let t = (r0 - a.r0) / (b.r0 - a.r0);
        let sum = (a.r0 + a.r1_min) * (1.0 - t) + (b.r0 + b.r1_min) * t;
        Rate::Finite((sum - r0).max(0.0))
    }
}

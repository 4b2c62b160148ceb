//! Finite joint distributions and the information measures computed from them.

mod crib;
mod distortion;
mod joint;

pub use crib::CribFunction;
pub use distortion::{DistortionMatrix, DistortionSpec};
pub use joint::{binary_entropy, entropy_of, JointPmf, Variable};

/// Variable names used by the source coding side.
pub mod names {
    pub const SOURCE: &str = "X";
    pub const RECON1: &str = "Xh1";
    pub const RECON2: &str = "Xh2";
    pub const CRIB: &str = "Zh1";
    pub const AUX: &str = "U";
}

/// Variable names used by the channel coding side.
pub mod mac_names {
    pub const OUTPUT: &str = "Y";
    pub const INPUT1: &str = "X1";
    pub const INPUT2: &str = "X2";
    pub const CRIB: &str = "Z1";
    pub const AUX: &str = "U";
}

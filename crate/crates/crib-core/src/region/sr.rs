use serde::Serialize;

use super::{CornerPoint, CribbingMode, CribbingVariant, Frontier, Rate, RegionSpec, Setting};
use crate::error::{Error, Result};
use crate::prob::names::{AUX, CRIB, RECON1, RECON2, SOURCE};
use crate::prob::JointPmf;
use crate::scalar::Real;

/// Largest H(Xh2 | U, crib) accepted as "Xh2 is a function of (U, crib)".
const FUNCTIONAL_TOL: f64 = 1e-9;

fn require<T: Real>(p: &JointPmf<T>, names: &[&str]) -> Result<()> {
    for n in names {
        p.index_of(n)?;
    }
    Ok(())
}

/// Returns the joint with the crib variable available, and the name to use for it.
fn with_crib<T: Real>(p: &JointPmf<T>, variant: &CribbingVariant) -> Result<(JointPmf<T>, &'static str)> {
    match variant {
        CribbingVariant::Perfect => Ok((p.clone(), RECON1)),
        CribbingVariant::DetFn(g) => {
            let base = if p.has_var(CRIB) {
                let keep: Vec<&str> = p.var_names().into_iter().filter(|n| *n != CRIB).collect();
                p.marginal(&keep)?
            } else {
                p.clone()
            };
            Ok((base.extend_with_function(RECON1, g, CRIB)?, CRIB))
        }
    }
}

struct Terms<T> {
    sum: T,
    r0_raw: T,
}

fn terms<T: Real>(p: &JointPmf<T>, mode: CribbingMode, variant: &CribbingVariant) -> Result<Terms<T>> {
    require(p, &[SOURCE, RECON1, RECON2])?;
    let (q, z) = with_crib(p, variant)?;
    match mode {
        CribbingMode::NonCausal => Ok(Terms {
            sum: q.mutual_information(&[SOURCE], &[RECON1, RECON2], &[])?,
            r0_raw: q.mutual_information(&[SOURCE], &[z, RECON2], &[])? - q.entropy(&[z])?,
        }),
        CribbingMode::StrictlyCausal => Ok(Terms {
            sum: q.mutual_information(&[SOURCE], &[RECON1, RECON2], &[])?,
            r0_raw: q.mutual_information(&[SOURCE], &[z, RECON2], &[])? - q.conditional_entropy(&[z], &[RECON2])?,
        }),
        CribbingMode::Causal => {
            require(p, &[AUX])?;
            let residual = q.conditional_entropy(&[RECON2], &[AUX, z])?;
            if residual.as_f64() > FUNCTIONAL_TOL {
                return Err(Error::Structural(format!(
                    "{RECON2} is not a deterministic function of ({AUX}, {z}): H = {residual}"
                )));
            }
            Ok(Terms {
                sum: q.mutual_information(&[SOURCE], &[RECON1, AUX], &[])?,
                r0_raw: q.mutual_information(&[SOURCE], &[z, AUX], &[])? - q.conditional_entropy(&[z], &[AUX])?,
            })
        }
    }
}

/// Region of one joint distribution under cribbing.
pub fn sr_region<T: Real>(p: &JointPmf<T>, mode: CribbingMode, variant: &CribbingVariant) -> Result<RegionSpec<T>> {
    let t = terms(p, mode, variant)?;
    Ok(RegionSpec {
        sum_rate_lb: t.sum,
        r0_lb: t.r0_raw.max(T::zero()),
        r0_plus_r12_lb: None,
    })
}

/// Region without any cooperation between the decoders.
pub fn equitz_cover_region<T: Real>(p: &JointPmf<T>) -> Result<RegionSpec<T>> {
    require(p, &[SOURCE, RECON1, RECON2])?;
    Ok(RegionSpec {
        sum_rate_lb: p.mutual_information(&[SOURCE], &[RECON1, RECON2], &[])?,
        r0_lb: p.mutual_information(&[SOURCE], &[RECON2], &[])?,
        r0_plus_r12_lb: None,
    })
}

/// Region when Decoder 1 can send Decoder 2 a message over a link of rate R12.
pub fn conferencing_region<T: Real>(p: &JointPmf<T>) -> Result<RegionSpec<T>> {
    let ec = equitz_cover_region(p)?;
    Ok(RegionSpec {
        sum_rate_lb: ec.sum_rate_lb,
        r0_lb: T::zero(),
        r0_plus_r12_lb: Some(ec.r0_lb),
    })
}

pub fn setting_region<T: Real>(p: &JointPmf<T>, setting: &Setting) -> Result<RegionSpec<T>> {
    match setting {
        Setting::Cribbing { mode, variant } => sr_region(p, *mode, variant),
        Setting::NoCribbing => equitz_cover_region(p),
    }
}

/// The two corner points (sum rate alone, then the smallest common rate).
pub fn sr_corner_points<T: Real>(
    p: &JointPmf<T>,
    mode: CribbingMode,
    variant: &CribbingVariant,
) -> Result<Vec<CornerPoint<T>>> {
    let r = sr_region(p, mode, variant)?;
    Ok(vec![
        CornerPoint { label: "sum".into(), r0: r.sum_rate_lb, r1: T::zero() },
        CornerPoint { label: "common".into(), r0: r.r0_lb, r1: r.sum_rate_lb - r.r0_lb },
    ])
}

/// Corner points of the conferencing region at link rate `r12`.
pub fn conferencing_corner_points<T: Real>(p: &JointPmf<T>, r12: Rate<T>) -> Result<Vec<CornerPoint<T>>> {
    require(p, &[SOURCE, RECON1, RECON2])?;
    let sum = p.mutual_information(&[SOURCE], &[RECON1, RECON2], &[])?;
    let i2 = p.mutual_information(&[SOURCE], &[RECON2], &[])?;
    let i1_given_2 = p.mutual_information(&[SOURCE], &[RECON1], &[RECON2])?;
    let (r0, r1) = match r12 {
        Rate::Finite(c) => ((i2 - c).max(T::zero()), sum.min(i1_given_2 + c)),
        Rate::Infinite => (T::zero(), sum),
    };
    Ok(vec![
        CornerPoint { label: "sum".into(), r0: sum, r1: T::zero() },
        CornerPoint { label: "common".into(), r0, r1 },
    ])
}

/// A point of the equivalent cascade problem: link rate R12 and first-stage rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CascadePoint {
    pub r12: f64,
    pub r1_cascade: f64,
}

/// Maps (R0, R1) to (R12, R1') = (R0, R0 + R1).
pub fn cascade_transform(f: &Frontier) -> Vec<CascadePoint> {
    f.points
        .iter()
        .map(|p| CascadePoint { r12: p.r0, r1_cascade: p.r0 + p.r1_min })
        .collect()
}

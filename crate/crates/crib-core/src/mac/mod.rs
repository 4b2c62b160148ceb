//! Multiple access channel with a common message and cribbing encoders: capacity
//! region formulas, corner points, and the corner-point duality with the
//! source coding regions.

mod fm;

use serde::Serialize;

pub use fm::{split_rate_projection, split_rate_system, fm_eliminate, Field, IneqSystem, Inequality, Projection, ProjectionReport};

use crate::error::{Error, Result};
use crate::prob::mac_names::{AUX, CRIB, INPUT1, INPUT2, OUTPUT};
use crate::prob::names::{AUX as SR_AUX, RECON1, RECON2, SOURCE};
use crate::prob::{CribFunction, JointPmf, Variable};
use crate::region::{
    conferencing_corner_points, sr_corner_points, CornerPoint, CribbingMode, CribbingVariant, Rate,
};
use crate::scalar::Real;

const FUNCTIONAL_TOL: f64 = 1e-9;
const DUALITY_TOL: f64 = 1e-9;

/// Auxiliary structure for causal cribbing: P(u | x1) and x2 = f(u, z1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausalStructure<T> {
    pub aux_size: usize,
    /// Row-major [x1][u].
    pub aux_given_x1: Vec<T>,
    /// Row-major [u][z1].
    pub f: Vec<usize>,
}

/// Channel P(y | x1, x2), input distribution P(x1, x2) and crib map z1 = g(x1).
#[derive(Clone, Debug, PartialEq)]
pub struct MacInstance<T> {
    /// Row-major [x1][x2][y].
    channel: Vec<T>,
    output_size: usize,
    input: JointPmf<T>,
    crib: CribFunction,
    causal: Option<CausalStructure<T>>,
}

impl<T: Real> MacInstance<T> {
    pub fn new(
        channel: Vec<T>,
        output_size: usize,
        input: JointPmf<T>,
        crib: CribFunction,
        causal: Option<CausalStructure<T>>,
    ) -> Result<Self> {
        let input = input.permute(&[INPUT1, INPUT2])?;
        let (n1, n2) = (input.vars()[0].size, input.vars()[1].size);
        if output_size == 0 || channel.len() != n1 * n2 * output_size {
            return Err(Error::InvalidDistribution("channel table has the wrong size".into()));
        }
        for (row, chunk) in channel.chunks(output_size).enumerate() {
            let s: T = chunk.iter().copied().sum();
            if chunk.iter().any(|p| !p.is_finite() || *p < T::zero()) || (s - T::one()).abs() > T::tolerance() {
                return Err(Error::InvalidDistribution(format!("channel row {row} is not a distribution")));
            }
        }
        if crib.domain_size() != n1 {
            return Err(Error::Usage("crib map domain differs from the first input alphabet".into()));
        }
        let m = Self { channel, output_size, input, crib, causal };
        if let Some(c) = &m.causal {
            if c.aux_given_x1.len() != n1 * c.aux_size || c.f.len() != c.aux_size * m.crib.image_size() {
                return Err(Error::Structural("causal structure tables have the wrong size".into()));
            }
            if c.f.iter().any(|&v| v >= n2) {
                return Err(Error::Structural("f maps outside the second input alphabet".into()));
            }
            let induced = m.joint()?.marginal(&[INPUT1, INPUT2])?;
            let diff = induced.max_abs_diff(&m.input)?;
            if diff.as_f64() > FUNCTIONAL_TOL {
                return Err(Error::Structural(format!(
                    "P(x1, x2) induced by P(u|x1) and f differs from the input distribution by {diff}"
                )));
            }
        }
        Ok(m)
    }

    /// Dual instance of a source coding joint: P(y|x1,x2) = P(x|xh1,xh2), P(x1,x2) = P(xh1,xh2).
    /// In causal mode the auxiliary structure is read off the joint's `U`.
    pub fn from_sr_joint(p: &JointPmf<T>, crib: CribFunction, mode: CribbingMode) -> Result<Self> {
        let pair = p.marginal(&[RECON1, RECON2])?;
        let triple = p.marginal(&[RECON1, RECON2, SOURCE])?;
        let (n1, n2) = (pair.vars()[0].size, pair.vars()[1].size);
        let ny = triple.vars()[2].size;
        let mut channel = Vec::with_capacity(n1 * n2 * ny);
        for a in 0..n1 {
            for b in 0..n2 {
                let q = pair.prob(&[a, b]);
                for y in 0..ny {
                    channel.push(if q > T::zero() { triple.prob(&[a, b, y]) / q } else { T::one() / T::lit(ny as f64) });
                }
            }
        }
        let input = pair.rename(&[(RECON1, INPUT1), (RECON2, INPUT2)])?;
        let causal = if mode == CribbingMode::Causal {
            let au = p.marginal(&[RECON1, SR_AUX])?;
            let nu = au.vars()[1].size;
            let mut aux_given_x1 = Vec::with_capacity(n1 * nu);
            for a in 0..n1 {
                let pa: T = (0..nu).map(|u| au.prob(&[a, u])).sum();
                for u in 0..nu {
                    aux_given_x1.push(if pa > T::zero() { au.prob(&[a, u]) / pa } else { T::one() / T::lit(nu as f64) });
                }
            }
            let nz = crib.image_size();
            let mut f = vec![0; nu * nz];
            let auy = p.marginal(&[RECON1, SR_AUX, RECON2])?;
            for u in 0..nu {
                for z in 0..nz {
                    // any xh2 with positive mass for (u, some xh1 with g(xh1) = z)
                    let hit = (0..n1)
                        .filter(|&a| crib.apply(a) == z)
                        .flat_map(|a| (0..n2).map(move |b| (a, b)))
                        .find(|&(a, b)| auy.prob(&[a, u, b]) > T::zero());
                    if let Some((_, b)) = hit {
                        f[u * nz + z] = b;
                    }
                }
            }
            Some(CausalStructure { aux_size: nu, aux_given_x1, f })
        } else {
            None
        };
        Self::new(channel, ny, input, crib, causal)
    }

    pub fn input(&self) -> &JointPmf<T> {
        &self.input
    }

    pub fn crib(&self) -> &CribFunction {
        &self.crib
    }

    pub fn causal(&self) -> Option<&CausalStructure<T>> {
        self.causal.as_ref()
    }

    /// Joint over (X1, X2, Z1, [U], Y).
    pub fn joint(&self) -> Result<JointPmf<T>> {
        let (n1, n2) = (self.input.vars()[0].size, self.input.vars()[1].size);
        let nz = self.crib.image_size();
        let ny = self.output_size;
        let mut vars = vec![Variable::new(INPUT1, n1), Variable::new(INPUT2, n2), Variable::new(CRIB, nz)];
        match &self.causal {
            None => {
                vars.push(Variable::new(OUTPUT, ny));
                JointPmf::from_fn(vars, |i| {
                    let (a, b, z, y) = (i[0], i[1], i[2], i[3]);
                    if self.crib.apply(a) != z {
                        return T::zero();
                    }
                    self.input.prob(&[a, b]) * self.channel[(a * n2 + b) * ny + y]
                })
            }
            Some(c) => {
                vars.push(Variable::new(AUX, c.aux_size));
                vars.push(Variable::new(OUTPUT, ny));
                let p1 = self.input.marginal(&[INPUT1])?;
                JointPmf::from_fn(vars, |i| {
                    let (a, b, z, u, y) = (i[0], i[1], i[2], i[3], i[4]);
                    if self.crib.apply(a) != z || c.f[u * nz + z] != b {
                        return T::zero();
                    }
                    p1.prob(&[a]) * c.aux_given_x1[a * c.aux_size + u] * self.channel[(a * n2 + b) * ny + y]
                })
            }
        }
    }
}

/// Upper bounds of a MAC region.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct MacRegion<T> {
    /// Bound on R0 + R1.
    pub sum_ub: T,
    /// Bound on R1.
    pub r1_ub: Rate<T>,
    /// |I(Y; X1, U) - I(Y; X1, X2)| in causal mode.
    pub identity_gap: Option<T>,
}

impl<T: Real> MacRegion<T> {
    pub fn contains(&self, r0: T, r1: T) -> bool {
        let tol = T::tolerance();
        r0 >= -tol && r1 >= -tol && r0 + r1 <= self.sum_ub + tol && self.r1_ub.at_least(r1 - tol)
    }
}

/// Capacity region with cribbing encoders and a common message.
pub fn mac_region<T: Real>(m: &MacInstance<T>, mode: CribbingMode) -> Result<MacRegion<T>> {
    let j = m.joint()?;
    let sum = j.mutual_information(&[OUTPUT], &[INPUT1, INPUT2], &[])?;
    let (r1, gap) = match mode {
        CribbingMode::NonCausal => (
            j.mutual_information(&[OUTPUT], &[INPUT1], &[INPUT2, CRIB])? + j.entropy(&[CRIB])?,
            None,
        ),
        CribbingMode::StrictlyCausal => (
            j.mutual_information(&[OUTPUT], &[INPUT1], &[INPUT2, CRIB])?
                + j.conditional_entropy(&[CRIB], &[INPUT2])?,
            None,
        ),
        CribbingMode::Causal => {
            if m.causal.is_none() {
                return Err(Error::Structural("causal mode needs an auxiliary structure".into()));
            }
            let res = j.conditional_entropy(&[INPUT2], &[AUX, CRIB])?;
            if res.as_f64() > FUNCTIONAL_TOL {
                return Err(Error::Structural(format!("X2 is not a function of (U, Z1): H = {res}")));
            }
            let via_u = j.mutual_information(&[OUTPUT], &[INPUT1, AUX], &[])?;
            (
                j.mutual_information(&[OUTPUT], &[INPUT1], &[AUX, CRIB])? + j.conditional_entropy(&[CRIB], &[AUX])?,
                Some((via_u - sum).abs()),
            )
        }
    };
    Ok(MacRegion { sum_ub: sum, r1_ub: Rate::Finite(r1), identity_gap: gap })
}

/// Region when Encoder 1 can send Encoder 2 a message at rate R12.
pub fn mac_conferencing_region<T: Real>(m: &MacInstance<T>, r12: Rate<T>) -> Result<MacRegion<T>> {
    let j = m.joint()?;
    let sum = j.mutual_information(&[OUTPUT], &[INPUT1, INPUT2], &[])?;
    let r1_ub = match r12 {
        Rate::Finite(c) => Rate::Finite(j.mutual_information(&[OUTPUT], &[INPUT1], &[INPUT2])? + c),
        Rate::Infinite => Rate::Infinite,
    };
    Ok(MacRegion { sum_ub: sum, r1_ub, identity_gap: None })
}

/// Corner points (sum rate alone, then the common-rate corner) of the cribbing region.
pub fn mac_corner_points<T: Real>(m: &MacInstance<T>, mode: CribbingMode) -> Result<Vec<CornerPoint<T>>> {
    let j = m.joint()?;
    let sum = j.mutual_information(&[OUTPUT], &[INPUT1, INPUT2], &[])?;
    let (first, r0) = match mode {
        CribbingMode::NonCausal => (sum, j.mutual_information(&[OUTPUT], &[INPUT2, CRIB], &[])? - j.entropy(&[CRIB])?),
        CribbingMode::StrictlyCausal => (
            sum,
            j.mutual_information(&[OUTPUT], &[INPUT2, CRIB], &[])? - j.conditional_entropy(&[CRIB], &[INPUT2])?,
        ),
        CribbingMode::Causal => {
            if m.causal.is_none() {
                return Err(Error::Structural("causal mode needs an auxiliary structure".into()));
            }
            (
                j.mutual_information(&[OUTPUT], &[INPUT1, AUX], &[])?,
                j.mutual_information(&[OUTPUT], &[AUX, CRIB], &[])? - j.conditional_entropy(&[CRIB], &[AUX])?,
            )
        }
    };
    let r0 = r0.max(T::zero());
    Ok(vec![
        CornerPoint { label: "sum".into(), r0: first, r1: T::zero() },
        CornerPoint { label: "common".into(), r0, r1: first - r0 },
    ])
}

/// Corner points of the conferencing region at link rate `r12`.
pub fn mac_conferencing_corner_points<T: Real>(m: &MacInstance<T>, r12: Rate<T>) -> Result<Vec<CornerPoint<T>>> {
    let j = m.joint()?;
    let sum = j.mutual_information(&[OUTPUT], &[INPUT1, INPUT2], &[])?;
    let i2 = j.mutual_information(&[OUTPUT], &[INPUT2], &[])?;
    let i1 = j.mutual_information(&[OUTPUT], &[INPUT1], &[INPUT2])?;
    let (r0, r1) = match r12 {
        Rate::Finite(c) => ((i2 - c).max(T::zero()), sum.min(i1 + c)),
        Rate::Infinite => (T::zero(), sum),
    };
    Ok(vec![
        CornerPoint { label: "sum".into(), r0: sum, r1: T::zero() },
        CornerPoint { label: "common".into(), r0, r1 },
    ])
}

/// One coordinate compared between the two sides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerComparison {
    pub corner: String,
    pub coordinate: String,
    pub source_coding: f64,
    pub channel_coding: f64,
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    pub mode: String,
    pub comparisons: Vec<CornerComparison>,
    pub max_diff: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

fn check_matched<T: Real>(sr_joint: &JointPmf<T>, mac: &MacInstance<T>, with_aux: bool) -> Result<()> {
    let mut mac_vars = vec![INPUT1, INPUT2, OUTPUT];
    let mut sr_vars = vec![RECON1, RECON2, SOURCE];
    if with_aux {
        mac_vars.push(AUX);
        sr_vars.push(SR_AUX);
    }
    let renamed = mac
        .joint()?
        .marginal(&mac_vars)?
        .rename(&[(INPUT1, RECON1), (INPUT2, RECON2), (OUTPUT, SOURCE)])?;
    let sr = sr_joint.marginal(&sr_vars)?;
    let diff = sr.max_abs_diff(&renamed)?.as_f64();
    if diff > DUALITY_TOL {
        return Err(Error::Usage(format!(
            "source and channel joints are not images of each other (max difference {diff:.3e})"
        )));
    }
    Ok(())
}

fn compare<T: Real>(sr: &[CornerPoint<T>], mac: &[CornerPoint<T>]) -> (Vec<CornerComparison>, f64) {
    let mut out = Vec::new();
    let mut max = 0.0f64;
    for (a, b) in sr.iter().zip(mac) {
        for (coord, x, y) in [("R0", a.r0, b.r0), ("R1", a.r1, b.r1)] {
            let (x, y) = (x.as_f64(), y.as_f64());
            let diff = (x - y).abs();
            max = max.max(diff);
            out.push(CornerComparison {
                corner: a.label.clone(),
                coordinate: coord.into(),
                source_coding: x,
                channel_coding: y,
                diff,
            });
        }
    }
    (out, max)
}

/// Compares the corner points of the source coding region of `sr_joint` with those
/// of the MAC region of `mac`, coordinate by coordinate.
pub fn duality_check<T: Real>(sr_joint: &JointPmf<T>, mac: &MacInstance<T>, mode: CribbingMode) -> Result<DualityReport> {
    check_matched(sr_joint, mac, mode == CribbingMode::Causal)?;
    let variant = CribbingVariant::DetFn(mac.crib().clone());
    let sr = sr_corner_points(sr_joint, mode, &variant)?;
    let mc = mac_corner_points(mac, mode)?;
    let (comparisons, max_diff) = compare(&sr, &mc);
    let mut notes = Vec::new();
    if mode == CribbingMode::StrictlyCausal {
        notes.push(
            "strictly causal MAC sum-rate corner uses I(Y;X1,X2); I(Y;X1,U) is not defined here \
             since this mode has no auxiliary"
                .into(),
        );
    }
    Ok(DualityReport { mode: mode.label().into(), comparisons, max_diff, passed: max_diff <= DUALITY_TOL, notes })
}

/// Same comparison for the conferencing regions at link rate `r12`.
pub fn duality_check_conferencing<T: Real>(
    sr_joint: &JointPmf<T>,
    mac: &MacInstance<T>,
    r12: Rate<T>,
) -> Result<DualityReport> {
    check_matched(sr_joint, mac, false)?;
    let sr = conferencing_corner_points(sr_joint, r12)?;
    let mc = mac_conferencing_corner_points(mac, r12)?;
    let (comparisons, max_diff) = compare(&sr, &mc);
    let notes = vec!["common-rate corner read as ({I(.;2) - R12}+, min(I(.;1,2), I(.;1|2) + R12))".into()];
    Ok(DualityReport { mode: "conferencing".into(), comparisons, max_diff, passed: max_diff <= DUALITY_TOL, notes })
}

/// Binary adder channel Y = X1 + X2 with independent uniform inputs.
pub fn adder_channel<T: Real>(crib: CribFunction) -> Result<MacInstance<T>> {
    let mut channel = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for y in 0..3 {
                channel.push(if a + b == y { T::one() } else { T::zero() });
            }
        }
    }
    let q = T::lit(0.25);
    let input = JointPmf::new(vec![Variable::new(INPUT1, 2), Variable::new(INPUT2, 2)], vec![q; 4])?;
    MacInstance::new(channel, 3, input, crib, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::BernoulliFamily;
    use approx::assert_abs_diff_eq;

    #[test]
    fn adder_channel_regions() {
        let m = adder_channel::<f64>(CribFunction::identity(2)).unwrap();
        let r = mac_region(&m, CribbingMode::NonCausal).unwrap();
        assert_abs_diff_eq!(r.sum_ub, 1.5, epsilon = 1e-12);
        let c = mac_corner_points(&m, CribbingMode::NonCausal).unwrap();
        assert_abs_diff_eq!(c[0].r0, 1.5, epsilon = 1e-12);
        let conf = mac_conferencing_region(&m, Rate::Finite(0.25)).unwrap();
        assert_abs_diff_eq!(conf.r1_ub.finite().unwrap(), 1.25, epsilon = 1e-12);
        let free = mac_conferencing_region(&m, Rate::Infinite).unwrap();
        assert_eq!(free.r1_ub, Rate::Infinite);
    }

    #[test]
    fn noiseless_pair_channel() {
        let mut channel = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for y in 0..4 {
                    channel.push(if y == 2 * a + b { 1.0 } else { 0.0 });
                }
            }
        }
        let input = JointPmf::new(vec![Variable::new("X1", 2), Variable::new("X2", 2)], vec![0.25; 4]).unwrap();
        let m = MacInstance::new(channel, 4, input, CribFunction::identity(2), None).unwrap();
        assert_abs_diff_eq!(mac_region(&m, CribbingMode::NonCausal).unwrap().sum_ub, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_crib_reduces_to_plain_bounds() {
        let m = adder_channel::<f64>(CribFunction::constant(2)).unwrap();
        let j = m.joint().unwrap();
        let r = mac_region(&m, CribbingMode::NonCausal).unwrap();
        let plain = j.mutual_information(&["Y"], &["X1"], &["X2"]).unwrap();
        assert_abs_diff_eq!(r.r1_ub.finite().unwrap(), plain, epsilon = 1e-12);
        let c = mac_corner_points(&m, CribbingMode::NonCausal).unwrap();
        assert_abs_diff_eq!(c[1].r0, j.mutual_information(&["Y"], &["X2"], &[]).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn corners_lie_in_region() {
        let m = adder_channel::<f64>(CribFunction::identity(2)).unwrap();
        for mode in [CribbingMode::NonCausal, CribbingMode::StrictlyCausal] {
            let r = mac_region(&m, mode).unwrap();
            for c in mac_corner_points(&m, mode).unwrap() {
                assert!(r.contains(c.r0, c.r1), "{mode}: {c:?} outside {r:?}");
            }
        }
    }

    #[test]
    fn bernoulli_joint_duality() {
        let fam = BernoulliFamily::new(0.05, 0.1).unwrap();
        let p = fam.joint(0.95 * 0.9).unwrap();
        let g = CribFunction::identity(2);
        for mode in [CribbingMode::NonCausal, CribbingMode::StrictlyCausal] {
            let m = MacInstance::from_sr_joint(&p, g.clone(), mode).unwrap();
            let rep = duality_check(&p, &m, mode).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
        let m = MacInstance::from_sr_joint(&p, g, CribbingMode::NonCausal).unwrap();
        let rep = duality_check_conferencing(&p, &m, Rate::Finite(0.2)).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn mismatched_pair_rejected() {
        let fam = BernoulliFamily::new(0.05, 0.1).unwrap();
        let p = fam.joint(0.86).unwrap();
        let q = fam.joint(0.88).unwrap();
        let m = MacInstance::from_sr_joint(&q, CribFunction::identity(2), CribbingMode::NonCausal).unwrap();
        assert!(duality_check(&p, &m, CribbingMode::NonCausal).is_err());
    }

    #[test]
    fn causal_identity_holds() {
        // U uniform on 4 strategies, X2 = strategy(Z1), channel = BSC on X1 xor X2
        let n1 = 2;
        let input_x1 = [0.4, 0.6];
        let aux_given_x1: Vec<f64> = vec![0.1, 0.2, 0.3, 0.4, 0.25, 0.25, 0.25, 0.25];
        let f = vec![0, 0, 0, 1, 1, 0, 1, 1];
        let mut pin = vec![0.0; 4];
        for a in 0..n1 {
            for u in 0..4 {
                pin[a * 2 + f[u * 2 + a]] += input_x1[a] * aux_given_x1[a * 4 + u];
            }
        }
        let input = JointPmf::new(vec![Variable::new("X1", 2), Variable::new("X2", 2)], pin).unwrap();
        let mut channel = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let y = a ^ b;
                channel.extend([if y == 0 { 0.9 } else { 0.1 }, if y == 1 { 0.9 } else { 0.1 }]);
            }
        }
        let causal = CausalStructure { aux_size: 4, aux_given_x1, f };
        let m = MacInstance::new(channel, 2, input, CribFunction::identity(2), Some(causal)).unwrap();
        let r = mac_region(&m, CribbingMode::Causal).unwrap();
        assert!(r.identity_gap.unwrap() < 1e-9);
        for c in mac_corner_points(&m, CribbingMode::Causal).unwrap() {
            assert!(r.contains(c.r0, c.r1));
        }
    }
}

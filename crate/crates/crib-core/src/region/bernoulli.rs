//! Binary symmetric example: uniform binary source, Hamming distortions, and the
//! one-parameter family of symmetric test channels meeting both budgets with equality.

use serde::Serialize;

use super::{Frontier, FrontierPoint, Provenance, Setting};
use crate::error::{Error, Result};
use crate::prob::{binary_entropy, entropy_of, JointPmf, Variable};
use crate::region::CribbingMode;

const P1_TOL: f64 = 1e-13;

/// Test channels P(xh1, xh2 | x=0) = [p1, p2, p3, p4] (in the order 00, 01, 10, 11),
/// mirrored for x = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernoulliFamily {
    pub d1: f64,
    pub d2: f64,
}

impl BernoulliFamily {
    pub fn new(d1: f64, d2: f64) -> Result<Self> {
        if !(d1 > 0.0 && d1 < 0.5 && d2 > 0.0 && d2 < 0.5) {
            return Err(Error::Usage(format!("distortions must lie in (0, 0.5), got ({d1}, {d2})")));
        }
        if d1 > d2 {
            return Err(Error::Usage(format!("the example needs D1 <= D2, got ({d1}, {d2})")));
        }
        Ok(Self { d1, d2 })
    }

    pub fn p1_range(&self) -> (f64, f64) {
        let (d1, d2) = (self.d1, self.d2);
        (1.0 - d1 - d2, (1.0 - d1).min(1.0 - d2).min(2.0 - d1 - d2))
    }

    pub fn p_vector(&self, p1: f64) -> [f64; 4] {
        let (d1, d2) = (self.d1, self.d2);
        [p1, 1.0 - d1 - p1, 1.0 - d2 - p1, p1 + d1 + d2 - 1.0].map(|v| v.max(0.0))
    }

    pub fn joint(&self, p1: f64) -> Result<JointPmf<f64>> {
        let v = self.p_vector(p1);
        let vars = vec![Variable::new("X", 2), Variable::new("Xh1", 2), Variable::new("Xh2", 2)];
        JointPmf::from_fn(vars, |i| {
            let cell = i[1] * 2 + i[2];
            0.5 * if i[0] == 0 { v[cell] } else { v[3 - cell] }
        })
    }

    /// I(X; Xh1, Xh2).
    pub fn sum_rate(&self, p1: f64) -> f64 {
        let [a, b, c, d] = self.p_vector(p1);
        let s = (a + d) / 2.0;
        let t = (b + c) / 2.0;
        entropy_of(&[s, t, t, s]) - entropy_of(&[a, b, c, d])
    }

    /// H(Xh1 | Xh2).
    pub fn h1_given_2(&self, p1: f64) -> f64 {
        let [a, b, c, d] = self.p_vector(p1);
        entropy_of(&[a + d, b + c])
    }

    /// I(X; Xh2).
    pub fn i2(&self, p1: f64) -> f64 {
        let [a, b, c, d] = self.p_vector(p1);
        1.0 - entropy_of(&[a + c, b + d])
    }

    /// Common-rate bound before clipping at zero.
    pub fn r0_raw(&self, setting: &Setting, p1: f64) -> Result<f64> {
        match setting {
            Setting::NoCribbing => Ok(self.i2(p1)),
            Setting::Cribbing { mode: CribbingMode::NonCausal, .. } => Ok(self.sum_rate(p1) - 1.0),
            Setting::Cribbing { mode: CribbingMode::StrictlyCausal, .. } => {
                Ok(self.sum_rate(p1) - self.h1_given_2(p1))
            }
            Setting::Cribbing { mode: CribbingMode::Causal, .. } => {
                Err(Error::Usage("the one-parameter example covers noncausal, strictly causal and no cribbing".into()))
            }
        }
    }

    /// Smallest common rate reachable in the family (clipped at zero).
    pub fn r0_min(&self, setting: &Setting) -> Result<f64> {
        self.r0_raw(setting, 0.0)?;
        let (lo, hi) = self.p1_range();
        let (_, v) = golden_min(|p| self.r0_raw(setting, p).unwrap(), lo, hi);
        Ok(v.max(0.0))
    }

    /// min I(X; Xh1, Xh2) over the family subject to the common-rate bound not exceeding `r0`.
    pub fn min_sum_rate(&self, setting: &Setting, r0: f64) -> Result<Option<f64>> {
        let f = |p: f64| self.r0_raw(setting, p).unwrap();
        self.r0_raw(setting, 0.0)?;
        let (lo, hi) = self.p1_range();
        let (pstar, vstar) = golden_min(f, lo, hi);
        if vstar > r0 + 1e-12 {
            return Ok(None);
        }
        // Both bounds are convex in p1, so the feasible set is an interval around pstar.
        let a = if f(lo) <= r0 { lo } else { bisect(|p| f(p) <= r0, lo, pstar) };
        let b = if f(hi) <= r0 { hi } else { bisect(|p| f(p) <= r0, hi, pstar) };
        let (_, s) = golden_min(|p| self.sum_rate(p), a.min(b), a.max(b));
        Ok(Some(s))
    }
}

/// Golden-section search for a unimodal function on [a, b].
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > P1_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    candidates.into_iter().fold((a, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
}

/// Boundary between `bad` (predicate false) and `good` (predicate true), returned on the good side.
fn bisect(ok: impl Fn(f64) -> bool, mut bad: f64, mut good: f64) -> f64 {
    while (good - bad).abs() > P1_TOL {
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// The labelled extreme points of the three tradeoff curves.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleCorners {
    /// Noncausal curve at R0 = 0: (0, R1).
    pub a: (f64, f64),
    /// Smallest R0 with strictly causal cribbing (R1 unbounded there).
    pub b_r0: f64,
    /// Smallest R0 without cribbing (R1 unbounded there).
    pub c_r0: f64,
    /// Noncausal curve at R1 = 0: (R0, 0).
    pub d: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliExample {
    pub d1: f64,
    pub d2: f64,
    pub noncausal: Frontier,
    pub strictly_causal: Frontier,
    pub no_cribbing: Frontier,
    pub corners: ExampleCorners,
}

fn family_frontier(fam: &BernoulliFamily, setting: Setting, r0_points: usize) -> Result<Frontier> {
    let r0_min = fam.r0_min(&setting)?;
    let (lo, hi) = fam.p1_range();
    let (_, s_free) = golden_min(|p| fam.sum_rate(p), lo, hi);
    let mut r0s: Vec<f64> = (0..r0_points)
        .map(|k| s_free * k as f64 / (r0_points.max(2) - 1) as f64)
        .filter(|&r| r > r0_min)
        .collect();
    r0s.insert(0, r0_min);
    let mut points = Vec::with_capacity(r0s.len());
    let mut best = f64::INFINITY;
    for r0 in r0s {
        if let Some(s) = fam.min_sum_rate(&setting, r0)? {
            best = best.min(s);
            if points.last().is_some_and(|p: &FrontierPoint| p.r0 >= r0) {
                continue;
            }
            points.push(FrontierPoint { r0, r1_min: (best - r0).max(0.0) });
        }
    }
    Ok(Frontier {
        setting,
        d1: fam.d1,
        d2: fam.d2,
        points,
        r0_min: Some(r0_min),
        sum_rate_min: Some(s_free),
        provenance: Provenance {
            method: "one-parameter family".into(),
            grid_step: 0.0,
            grid_cells: r0_points,
            refine_tol: P1_TOL,
            starts_per_point: 1,
            aux_size: None,
        },
    })
}

/// The three tradeoff curves (noncausal, strictly causal, no cribbing) and corners A-D.
pub fn bernoulli_example(d1: f64, d2: f64, r0_points: usize) -> Result<BernoulliExample> {
    let fam = BernoulliFamily::new(d1, d2)?;
    let noncausal = family_frontier(&fam, Setting::perfect(CribbingMode::NonCausal), r0_points)?;
    let strictly_causal = family_frontier(&fam, Setting::perfect(CribbingMode::StrictlyCausal), r0_points)?;
    let no_cribbing = family_frontier(&fam, Setting::NoCribbing, r0_points)?;
    let a_r1 = fam.min_sum_rate(&noncausal.setting, 0.0)?.unwrap_or(f64::INFINITY);
    let d_r0 = noncausal.sum_rate_min.unwrap_or(f64::INFINITY);
    let corners = ExampleCorners {
        a: (0.0, a_r1),
        b_r0: strictly_causal.r0_min.unwrap_or(f64::INFINITY),
        c_r0: no_cribbing.r0_min.unwrap_or(f64::INFINITY),
        d: (d_r0, 0.0),
    };
    Ok(BernoulliExample { d1, d2, noncausal, strictly_causal, no_cribbing, corners })
}

/// Closed forms of the four corners: (A_R1, B_R0, C_R0, D_R0).
pub fn closed_form_corners(d1: f64, d2: f64) -> (f64, f64, f64, f64) {
    let h1 = binary_entropy(d1);
    let h2 = binary_entropy(d2);
    (1.0 - h1, 1.0 - h1 - h2, 1.0 - h2, 1.0 - h1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{sr_region, CribbingVariant};
    use approx::assert_abs_diff_eq;

    #[test]
    fn corners_match_closed_forms() {
        let ex = bernoulli_example(0.05, 0.1, 129).unwrap();
        assert_abs_diff_eq!(ex.corners.a.1, 0.713603, epsilon = 1e-6);
        assert_abs_diff_eq!(ex.corners.b_r0, 0.244607, epsilon = 1e-6);
        assert_abs_diff_eq!(ex.corners.c_r0, 0.531004, epsilon = 1e-6);
        assert_abs_diff_eq!(ex.corners.d.0, 0.713603, epsilon = 1e-6);
        let (a, b, c, d) = closed_form_corners(0.05, 0.1);
        assert_abs_diff_eq!(ex.corners.b_r0, b, epsilon = 1e-9);
        assert_abs_diff_eq!(ex.corners.a.1, a, epsilon = 1e-9);
        assert_abs_diff_eq!(ex.corners.c_r0, c, epsilon = 1e-9);
        assert_abs_diff_eq!(ex.corners.d.0, d, epsilon = 1e-9);
    }

    #[test]
    fn family_meets_budgets_with_equality() {
        let fam = BernoulliFamily::new(0.05, 0.1).unwrap();
        let (lo, hi) = fam.p1_range();
        for k in 0..=10 {
            let p1 = lo + (hi - lo) * k as f64 / 10.0;
            let v = fam.p_vector(p1);
            assert_abs_diff_eq!(v[2] + v[3], 0.05, epsilon = 1e-12);
            assert_abs_diff_eq!(v[1] + v[3], 0.1, epsilon = 1e-12);
            let p = fam.joint(p1).unwrap();
            let m = p.marginal(&["Xh2"]).unwrap();
            assert_abs_diff_eq!(m.probs()[0], 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_forms_agree_with_table_evaluation() {
        let fam = BernoulliFamily::new(0.05, 0.1).unwrap();
        let (lo, hi) = fam.p1_range();
        for k in 0..=8 {
            let p1 = lo + (hi - lo) * k as f64 / 8.0;
            let p = fam.joint(p1).unwrap();
            let sc = sr_region(&p, CribbingMode::StrictlyCausal, &CribbingVariant::Perfect).unwrap();
            assert_abs_diff_eq!(sc.sum_rate_lb, fam.sum_rate(p1), epsilon = 1e-12);
            assert_abs_diff_eq!(sc.r0_lb, (fam.sum_rate(p1) - fam.h1_given_2(p1)).max(0.0), epsilon = 1e-12);
            assert_abs_diff_eq!(p.entropy(&["Xh1"]).unwrap(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.mutual_information(&["X"], &["Xh2"], &[]).unwrap(), fam.i2(p1), epsilon = 1e-12);
        }
    }

    #[test]
    fn strictly_causal_curve_values() {
        let fam = BernoulliFamily::new(0.05, 0.1).unwrap();
        let sc = Setting::perfect(CribbingMode::StrictlyCausal);
        let s = |r0: f64| fam.min_sum_rate(&sc, r0).unwrap().unwrap() - r0;
        assert_abs_diff_eq!(s(0.3), 0.443661, epsilon = 2e-6);
        assert_abs_diff_eq!(s(0.4), 0.313659, epsilon = 2e-6);
        assert!(fam.min_sum_rate(&sc, 0.2).unwrap().is_none());
    }

    #[test]
    fn frontiers_are_monotone_and_nested() {
        let ex = bernoulli_example(0.1, 0.2, 65).unwrap();
        for f in [&ex.noncausal, &ex.strictly_causal, &ex.no_cribbing] {
            for w in f.points.windows(2) {
                assert!(w[0].r0 < w[1].r0);
                assert!(w[0].r1_min >= w[1].r1_min - 1e-12);
            }
        }
        for p in &ex.no_cribbing.points {
            let sc = ex.strictly_causal.r1_at(p.r0).finite().unwrap();
            let nc = ex.noncausal.r1_at(p.r0).finite().unwrap();
            assert!(nc <= sc + 1e-9 && sc <= p.r1_min + 1e-9);
        }
    }

    #[test]
    fn reversed_budgets_rejected() {
        assert!(matches!(bernoulli_example(0.2, 0.1, 9), Err(Error::Usage(_))));
    }
}

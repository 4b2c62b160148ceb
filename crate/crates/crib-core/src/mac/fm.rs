//! Fourier–Motzkin elimination over an ordered field, with redundancy removal
//! against a bounding box.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_rational::BigRational;
use num_traits::{FromPrimitive, NumOps, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Scalars for elimination: exact rationals or floats with a tolerance.
pub trait Field: Clone + PartialOrd + Debug + Display + Zero + One + NumOps + Neg<Output = Self> {
    /// Slack allowed in comparisons; zero for exact fields.
    fn tol() -> Self;
    fn abs_val(&self) -> Self;
    fn of_f64(v: f64) -> Option<Self>;
    fn as_f64(&self) -> f64;

    fn is_zero_tol(&self) -> bool {
        self.abs_val() <= Self::tol()
    }
}

impl Field for f64 {
    fn tol() -> Self {
        1e-9
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn of_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Field for BigRational {
    fn tol() -> Self {
        BigRational::zero()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn of_f64(v: f64) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(v)
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `coeffs · v <= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality<S> {
    pub coeffs: Vec<S>,
    pub rhs: S,
    /// Which input rows were combined to produce this one.
    pub label: String,
}

impl<S: Field> Inequality<S> {
    pub fn new(coeffs: Vec<S>, rhs: S, label: impl Into<String>) -> Self {
        Self { coeffs, rhs, label: label.into() }
    }

    fn lhs(&self, v: &[S]) -> S {
        self.coeffs.iter().zip(v).fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
    }

    pub fn holds(&self, v: &[S]) -> bool {
        self.lhs(v) <= self.rhs.clone() + S::tol()
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Field::is_zero_tol)
    }

    /// Scaled so the first nonzero coefficient has magnitude one.
    fn normalized(&self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero_tol()) {
            None => self.clone(),
            Some(c) => {
                let s = c.abs_val();
                Self {
                    coeffs: self.coeffs.iter().map(|a| a.clone() / s.clone()).collect(),
                    rhs: self.rhs.clone() / s,
                    label: self.label.clone(),
                }
            }
        }
    }

    fn same_as(&self, other: &Self) -> bool {
        let close = |a: &S, b: &S| (a.clone() - b.clone()).is_zero_tol();
        close(&self.rhs, &other.rhs) && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| close(a, b))
    }

    fn render(&self, vars: &[String]) -> String {
        let mut terms = Vec::new();
        for (c, v) in self.coeffs.iter().zip(vars) {
            if c.is_zero_tol() {
                continue;
            }
            let body = if (c.clone() - S::one()).is_zero_tol() {
                v.clone()
            } else if (c.clone() + S::one()).is_zero_tol() {
                format!("-{v}")
            } else {
                format!("{c}*{v}")
            };
            terms.push(body);
        }
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ").replace("+ -", "- ") };
        format!("{lhs} <= {}", self.rhs)
    }
}

/// A conjunction of linear inequalities over named variables.
#[derive(Clone, Debug, PartialEq)]
pub struct IneqSystem<S> {
    pub vars: Vec<String>,
    pub rows: Vec<Inequality<S>>,
}

impl<S: Field> IneqSystem<S> {
    pub fn new(vars: Vec<String>, rows: Vec<Inequality<S>>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.coeffs.len() != vars.len()) {
            return Err(Error::Usage(format!("row `{}` has the wrong number of coefficients", r.label)));
        }
        Ok(Self { vars, rows })
    }

    pub fn holds(&self, v: &[S]) -> bool {
        self.rows.iter().all(|r| r.holds(v))
    }

    pub fn render(&self) -> Vec<String> {
        self.rows.iter().map(|r| format!("[{}] {}", r.label, r.render(&self.vars))).collect()
    }
}

/// Result of an elimination.
#[derive(Clone, Debug)]
pub struct Projection<S> {
    pub system: IneqSystem<S>,
    /// Rows dropped as implied by the rest over the bounding box.
    pub redundant: Vec<Inequality<S>>,
    pub transcript: Vec<String>,
}

/// Serializable summary of a projection.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub vars: Vec<String>,
    pub inequalities: Vec<String>,
    pub redundant: Vec<String>,
    pub transcript: Vec<String>,
}

impl<S: Field> Projection<S> {
    pub fn report(&self) -> ProjectionReport {
        let sys = &self.system;
        ProjectionReport {
            vars: sys.vars.clone(),
            inequalities: sys.render(),
            redundant: self.redundant.iter().map(|r| format!("[{}] {}", r.label, r.render(&sys.vars))).collect(),
            transcript: self.transcript.clone(),
        }
    }
}

/// Eliminates `eliminate` in the given order. Rows implied by the others over
/// `[0, bound]^k` are removed at the end; `bound` defaults to the sum of |rhs|.
pub fn fm_eliminate<S: Field>(sys: &IneqSystem<S>, eliminate: &[&str], bound: Option<S>) -> Result<Projection<S>> {
    let bound = bound.unwrap_or_else(|| {
        let b = sys.rows.iter().fold(S::zero(), |acc, r| acc + r.rhs.abs_val());
        if b < S::one() {
            S::one()
        } else {
            b
        }
    });
    let mut vars = sys.vars.clone();
    let mut rows = sys.rows.clone();
    let mut transcript = Vec::new();
    let mut redundant = Vec::new();
    for name in eliminate {
        let k = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            let c = &r.coeffs[k];
            if c.is_zero_tol() {
                zero.push(r);
            } else if *c > S::zero() {
                pos.push(r);
            } else {
                neg.push(r);
            }
        }
        let mut next: Vec<Inequality<S>> = Vec::new();
        let mut dups: Vec<Inequality<S>> = Vec::new();
        let push = |r: Inequality<S>, next: &mut Vec<Inequality<S>>, dups: &mut Vec<Inequality<S>>| {
            let mut r = r.normalized();
            r.coeffs.remove(k);
            if r.is_trivial() && r.rhs >= -S::tol() {
                return;
            }
            if next.iter().any(|o| o.same_as(&r)) {
                dups.push(r);
            } else {
                next.push(r);
            }
        };
        let nz = zero.len();
        for r in zero {
            push(r, &mut next, &mut dups);
        }
        for p in &pos {
            for n in &neg {
                let a = p.coeffs[k].clone();
                let b = -n.coeffs[k].clone();
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| x.clone() * b.clone() + y.clone() * a.clone())
                    .collect();
                let rhs = p.rhs.clone() * b.clone() + n.rhs.clone() * a.clone();
                push(Inequality::new(coeffs, rhs, format!("{}+{}", p.label, n.label)), &mut next, &mut dups);
            }
        }
        vars.remove(k);
        transcript.push(format!(
            "eliminate {name}: {} upper, {} lower, {nz} free -> {} rows",
            pos.len(),
            neg.len(),
            next.len()
        ));
        rows = next;
        for d in &dups {
            transcript.push(format!("drop [{}] {}: duplicate", d.label, d.render(&vars)));
        }
        redundant.extend(dups);
    }

    let mut i = 0;
    while i < rows.len() {
        let others: Vec<&Inequality<S>> = rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).collect();
        match box_max(&others, &rows[i].coeffs, vars.len(), &bound) {
            Some(m) if m <= rows[i].rhs.clone() + S::tol() => {
                let r = rows.remove(i);
                transcript.push(format!("drop [{}] {}: implied by the others", r.label, r.render(&vars)));
                redundant.push(r);
            }
            _ => i += 1,
        }
    }
    Ok(Projection { system: IneqSystem { vars, rows }, redundant, transcript })
}

/// Maximum of `obj · v` over the rows intersected with `[0, bound]^k`, by vertex
/// enumeration; `None` when that set is empty.
fn box_max<S: Field>(rows: &[&Inequality<S>], obj: &[S], k: usize, bound: &S) -> Option<S> {
    let mut cons: Vec<(Vec<S>, S)> = rows.iter().map(|r| (r.coeffs.clone(), r.rhs.clone())).collect();
    for j in 0..k {
        let mut e = vec![S::zero(); k];
        e[j] = -S::one();
        cons.push((e.clone(), S::zero()));
        e[j] = S::one();
        cons.push((e, bound.clone()));
    }
    if k == 0 {
        return cons.iter().all(|(_, b)| *b >= -S::tol()).then(S::zero);
    }
    let mut best: Option<S> = None;
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        if let Some(v) = solve(&pick.iter().map(|&i| cons[i].clone()).collect::<Vec<_>>()) {
            if cons.iter().all(|(a, b)| dot(a, &v) <= b.clone() + S::tol()) {
                let val = dot(obj, &v);
                if best.as_ref().map_or(true, |b| val > *b) {
                    best = Some(val);
                }
            }
        }
        if !next_combination(&mut pick, cons.len()) {
            break;
        }
    }
    best
}

fn dot<S: Field>(a: &[S], v: &[S]) -> S {
    a.iter().zip(v).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solves the square system with the rows held as equalities.
fn solve<S: Field>(rows: &[(Vec<S>, S)]) -> Option<Vec<S>> {
    let k = rows.len();
    let mut m: Vec<Vec<S>> = rows
        .iter()
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k)
            .filter(|&r| !m[r][col].is_zero_tol())
            .max_by(|&a, &b| m[a][col].abs_val().partial_cmp(&m[b][col].abs_val()).unwrap_or(std::cmp::Ordering::Equal))?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for c in col..=k {
            m[col][c] = m[col][c].clone() / p.clone();
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=k {
                    m[r][c] = m[r][c].clone() - f.clone() * m[col][c].clone();
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[k].clone()).collect())
}

/// The noncausal split-rate system over (R0, R1, R1p, R1pp), where R1 = R1p + R1pp:
/// R1p <= H(Z1), R0 + R1p + R1pp <= I(Y;X1,X2), R0 + R1pp <= I(Y;X1,X2|Z1),
/// R1pp <= I(Y;X1|X2,Z1).
pub fn split_rate_system<S: Field>(h_z1: S, i_all: S, i_given_z1: S, i_x1_given: S) -> IneqSystem<S> {
    let vars = ["R0", "R1", "R1p", "R1pp"].map(String::from).to_vec();
    let row = |c: [i32; 4], rhs: S, label: &str| {
        Inequality::new(c.iter().map(|&x| S::of_f64(x as f64).unwrap()).collect(), rhs, label)
    };
    let rows = vec![
        row([0, 0, 1, 0], h_z1, "a"),
        row([1, 0, 1, 1], i_all, "b"),
        row([1, 0, 0, 1], i_given_z1, "c"),
        row([0, 0, 0, 1], i_x1_given, "d"),
        row([0, 1, -1, -1], S::zero(), "e"),
        row([0, -1, 1, 1], S::zero(), "f"),
    ];
    IneqSystem { vars, rows }
}

/// Eliminates the split rates from the system of a MAC instance (noncausal cribbing).
pub fn split_rate_projection<T: crate::Real>(m: &super::MacInstance<T>) -> Result<Projection<f64>> {
    use crate::prob::mac_names::{CRIB, INPUT1, INPUT2, OUTPUT};
    let j = m.joint()?;
    let sys = split_rate_system(
        j.entropy(&[CRIB])?.as_f64(),
        j.mutual_information(&[OUTPUT], &[INPUT1, INPUT2], &[])?.as_f64(),
        j.mutual_information(&[OUTPUT], &[INPUT1, INPUT2], &[CRIB])?.as_f64(),
        j.mutual_information(&[OUTPUT], &[INPUT1], &[INPUT2, CRIB])?.as_f64(),
    );
    fm_eliminate(&sys, &["R1p", "R1pp"], None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn eliminates_split_rates_exactly() {
        let sys = split_rate_system(q(1), q(3), q(5) / q(2), q(1));
        let p = fm_eliminate(&sys, &["R1p", "R1pp"], None).unwrap();
        assert_eq!(p.system.vars, vec!["R0", "R1"]);
        let rendered = p.system.render();
        assert_eq!(p.system.rows.len(), 2, "{rendered:?}");
        assert!(rendered.iter().any(|r| r.ends_with("R0 + R1 <= 3")), "{rendered:?}");
        assert!(rendered.iter().any(|r| r.ends_with("R1 <= 2")), "{rendered:?}");
        assert_eq!(p.redundant.len(), 1);
        assert_eq!(p.redundant[0].coeffs, vec![q(1), q(1)]);
        assert_eq!(p.redundant[0].rhs, q(7) / q(2));
    }

    #[test]
    fn float_matches_rational() {
        let sys = split_rate_system(0.5, 1.5, 1.25, 0.75);
        let p = fm_eliminate(&sys, &["R1p", "R1pp"], None).unwrap();
        assert_eq!(p.system.rows.len(), 2);
        assert!(p.system.holds(&[0.2, 1.25]));
        assert!(!p.system.holds(&[0.2, 1.26]));
    }

    #[test]
    fn infeasible_zero_row_kept() {
        let sys = IneqSystem::new(
            vec!["x".into(), "y".into()],
            vec![Inequality::new(vec![1.0, 0.0], -1.0, "a"), Inequality::new(vec![-1.0, 1.0], 0.0, "b")],
        )
        .unwrap();
        let p = fm_eliminate(&sys, &["y"], None).unwrap();
        assert_eq!(p.system.rows.len(), 1);
        let sys = IneqSystem::new(
            vec!["x".into()],
            vec![Inequality::new(vec![1.0], -1.0, "a"), Inequality::new(vec![-1.0], 0.0, "b")],
        )
        .unwrap();
        let p = fm_eliminate(&sys, &["x"], None).unwrap();
        assert_eq!(p.system.rows.len(), 1);
        assert!(p.system.rows[0].rhs < 0.0);
    }

    #[test]
    fn middle_row_flagged_at_equality() {
        let sys = split_rate_system(q(1), q(3), q(2), q(1));
        let p = fm_eliminate(&sys, &["R1p", "R1pp"], None).unwrap();
        assert_eq!(p.system.rows.len(), 2);
        assert_eq!(p.redundant.len(), 1);
        assert_eq!(p.redundant[0].label, "c+a+e");
    }

    #[test]
    fn empty_elimination_keeps_system() {
        let sys = IneqSystem::new(
            vec!["x".into(), "y".into()],
            vec![Inequality::new(vec![1.0, 1.0], 1.0, "a"), Inequality::new(vec![1.0, -1.0], 0.5, "b")],
        )
        .unwrap();
        let p = fm_eliminate(&sys, &[], None).unwrap();
        assert_eq!(p.system, sys);
    }

    #[test]
    fn full_projection_is_empty() {
        let sys = IneqSystem::new(vec!["x".into()], vec![Inequality::new(vec![1.0], 1.0, "a")]).unwrap();
        let p = fm_eliminate(&sys, &["x"], None).unwrap();
        assert!(p.system.rows.is_empty() && p.system.vars.is_empty());
    }

    #[test]
    fn unknown_variable() {
        let sys = split_rate_system(1.0, 1.0, 1.0, 1.0);
        assert!(matches!(fm_eliminate(&sys, &["W"], None), Err(Error::UnknownVariable(_))));
    }
}

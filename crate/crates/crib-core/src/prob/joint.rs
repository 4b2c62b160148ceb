use serde::{Deserialize, Serialize};

use super::crib::CribFunction;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A named finite random variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub size: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Self { name: name.into(), size }
    }
}

/// Joint pmf over named variables, stored row-major with the last variable varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "PmfRepr<T>",
    into = "PmfRepr<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub struct JointPmf<T> {
    vars: Vec<Variable>,
    probs: Vec<T>,
    strides: Vec<usize>,
}

fn strides_for(vars: &[Variable]) -> Vec<usize> {
    let mut strides = vec![1; vars.len()];
    for i in (0..vars.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * vars[i + 1].size;
    }
    strides
}

/// Serialized form: variables (last fastest) and the flat row-major table.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PmfRepr<T> {
    vars: Vec<Variable>,
    probs: Vec<T>,
}

impl<T: Real> TryFrom<PmfRepr<T>> for JointPmf<T> {
    type Error = Error;

    fn try_from(r: PmfRepr<T>) -> Result<Self> {
        Self::new(r.vars, r.probs)
    }
}

impl<T> From<JointPmf<T>> for PmfRepr<T> {
    fn from(p: JointPmf<T>) -> Self {
        Self { vars: p.vars, probs: p.probs }
    }
}

/// Advances a mixed-radix counter; returns false after the last index.
pub(crate) fn next_index(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

impl<T: Real> JointPmf<T> {
    /// Validates and (if off by at most the renormalization slack) renormalizes the table.
    pub fn new(vars: Vec<Variable>, probs: Vec<T>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidDistribution("no variables".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.size == 0 {
                return Err(Error::InvalidDistribution(format!("variable `{}` has an empty alphabet", v.name)));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidDistribution(format!("duplicate variable `{}`", v.name)));
            }
        }
        let cells: usize = vars.iter().map(|v| v.size).product();
        if probs.len() != cells {
            return Err(Error::InvalidDistribution(format!(
                "expected {cells} probabilities, got {}",
                probs.len()
            )));
        }
        let mut total = T::zero();
        for &p in &probs {
            if !p.is_finite() || p < T::zero() {
                return Err(Error::InvalidDistribution(format!("entry {p} is negative or not finite")));
            }
            total = total + p;
        }
        if (total - T::one()).abs() > T::renormalize_slack() {
            return Err(Error::InvalidDistribution(format!("total mass {total} is not 1")));
        }
        let probs = probs.into_iter().map(|p| p / total).collect();
        let strides = strides_for(&vars);
        Ok(Self { vars, probs, strides })
    }

    pub fn from_fn(vars: Vec<Variable>, f: impl Fn(&[usize]) -> T) -> Result<Self> {
        let shape: Vec<usize> = vars.iter().map(|v| v.size).collect();
        let mut probs = Vec::with_capacity(shape.iter().product());
        let mut idx = vec![0; shape.len()];
        loop {
            probs.push(f(&idx));
            if !next_index(&mut idx, &shape) {
                break;
            }
        }
        Self::new(vars, probs)
    }

    /// Draws a pmf uniformly from the simplex over the given variables.
    pub fn random<R: rand::Rng + ?Sized>(vars: Vec<Variable>, rng: &mut R) -> Result<Self> {
        let cells: usize = vars.iter().map(|v| v.size).product();
        let w: Vec<f64> = (0..cells).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = w.iter().sum();
        Self::new(vars, w.iter().map(|x| T::lit(x / total)).collect())
    }

    /// Single-variable pmf.
    pub fn single(name: &str, probs: Vec<T>) -> Result<Self> {
        let n = probs.len();
        Self::new(vec![Variable::new(name, n)], probs)
    }

    /// Builds P(prior vars) * P(new var | prior vars) from a conditional table laid out
    /// with the new variable fastest.
    pub fn with_conditional(&self, var: Variable, cond: &[T]) -> Result<Self> {
        let k = var.size;
        if cond.len() != self.probs.len() * k {
            return Err(Error::InvalidDistribution("conditional table has the wrong size".into()));
        }
        for (row, chunk) in cond.chunks(k).enumerate() {
            let s: T = chunk.iter().copied().sum();
            if self.probs[row] > T::zero() && (s - T::one()).abs() > T::renormalize_slack() {
                return Err(Error::InvalidDistribution(format!("conditional row {row} sums to {s}")));
            }
        }
        let mut vars = self.vars.clone();
        vars.push(var);
        let probs = self
            .probs
            .iter()
            .enumerate()
            .flat_map(|(row, &p)| cond[row * k..(row + 1) * k].iter().map(move |&c| p * c))
            .collect();
        Self::new(vars, probs)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn shape(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.size).collect()
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn has_var(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.name == name)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn size_of(&self, name: &str) -> Result<usize> {
        Ok(self.vars[self.index_of(name)?].size)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn prob(&self, idx: &[usize]) -> T {
        self.probs[self.flat_index(idx)]
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.index_of(n)?;
            if out.contains(&i) {
                return Err(Error::Usage(format!("variable `{n}` listed twice")));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Marginal over `keep`, with variables in the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<Self> {
        let pos = self.positions(keep)?;
        if pos.is_empty() {
            return Err(Error::Usage("marginal over no variables".into()));
        }
        let vars: Vec<Variable> = pos.iter().map(|&i| self.vars[i].clone()).collect();
        let out_strides = strides_for(&vars);
        let mut probs = vec![T::zero(); vars.iter().map(|v| v.size).product()];
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        let mut flat = 0;
        loop {
            let o: usize = pos.iter().zip(&out_strides).map(|(&i, s)| idx[i] * s).sum();
            probs[o] = probs[o] + self.probs[flat];
            flat += 1;
            if !next_index(&mut idx, &shape) {
                break;
            }
        }
        Ok(Self { vars, probs, strides: out_strides })
    }

    /// Reorders the variables.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.vars.len() {
            return Err(Error::Usage("permutation must list every variable".into()));
        }
        self.marginal(order)
    }

    pub fn rename(&self, map: &[(&str, &str)]) -> Result<Self> {
        let mut vars = self.vars.clone();
        for (from, to) in map {
            let i = self.index_of(from)?;
            vars[i].name = to.to_string();
        }
        Self::new(vars, self.probs.clone())
    }

    /// Joint entropy in bits of the listed variables (empty list gives 0).
    pub fn entropy(&self, names: &[&str]) -> Result<T> {
        if names.is_empty() {
            return Ok(T::zero());
        }
        Ok(entropy_of(self.marginal(names)?.probs()))
    }

    /// H(target | given).
    pub fn conditional_entropy(&self, target: &[&str], given: &[&str]) -> Result<T> {
        disjoint(&[target, given])?;
        let all: Vec<&str> = target.iter().chain(given).copied().collect();
        let h = self.entropy(&all)? - self.entropy(given)?;
        Ok(h.max(T::zero()))
    }

    /// I(a; b | given); the three lists must be pairwise disjoint.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<T> {
        disjoint(&[a, b, given])?;
        let ag: Vec<&str> = a.iter().chain(given).copied().collect();
        let bg: Vec<&str> = b.iter().chain(given).copied().collect();
        let abg: Vec<&str> = a.iter().chain(b).chain(given).copied().collect();
        let i = self.entropy(&ag)? + self.entropy(&bg)? - self.entropy(&abg)? - self.entropy(given)?;
        Ok(i.max(T::zero()))
    }

    /// Appends `new_name = g(source)`.
    pub fn extend_with_function(&self, source: &str, g: &CribFunction, new_name: &str) -> Result<Self> {
        let s = self.index_of(source)?;
        if self.has_var(new_name) {
            return Err(Error::Usage(format!("variable `{new_name}` already present")));
        }
        if g.domain_size() != self.vars[s].size {
            return Err(Error::Usage(format!(
                "function domain {} does not match alphabet of `{source}` ({})",
                g.domain_size(),
                self.vars[s].size
            )));
        }
        let k = g.image_size();
        let shape = self.shape();
        let mut probs = Vec::with_capacity(self.probs.len() * k);
        let mut idx = vec![0; shape.len()];
        let mut flat = 0;
        loop {
            let z = g.apply(idx[s]);
            for j in 0..k {
                probs.push(if j == z { self.probs[flat] } else { T::zero() });
            }
            flat += 1;
            if !next_index(&mut idx, &shape) {
                break;
            }
        }
        let mut vars = self.vars.clone();
        vars.push(Variable::new(new_name, k));
        Self::new(vars, probs)
    }

    /// Largest absolute cell difference against another pmf over the same variables.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        let order = self.var_names();
        let other = other.permute(&order)?;
        if other.shape() != self.shape() {
            return Err(Error::Usage("alphabet sizes differ".into()));
        }
        Ok(self
            .probs
            .iter()
            .zip(other.probs())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> Result<JointPmf<U>> {
        JointPmf::new(self.vars.clone(), self.probs.iter().map(|p| U::lit(p.as_f64())).collect())
    }
}

fn disjoint(groups: &[&[&str]]) -> Result<()> {
    for (i, g) in groups.iter().enumerate() {
        for other in &groups[i + 1..] {
            if let Some(n) = g.iter().find(|n| other.contains(n)) {
                return Err(Error::Usage(format!("variable `{n}` appears in overlapping sets")));
            }
        }
        for (j, n) in g.iter().enumerate() {
            if g[..j].contains(n) {
                return Err(Error::Usage(format!("variable `{n}` listed twice")));
            }
        }
    }
    Ok(())
}

/// Shannon entropy in bits of an unnormalized-safe probability vector.
pub fn entropy_of<T: Real>(probs: &[T]) -> T {
    probs
        .iter()
        .filter(|&&p| p > T::zero())
        .fold(T::zero(), |h, &p| h - p * p.log2())
}

/// Binary entropy function in bits.
pub fn binary_entropy<T: Real>(p: T) -> T {
    entropy_of(&[p, T::one() - p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bsc(q: f64) -> JointPmf<f64> {
        JointPmf::new(
            vec![Variable::new("A", 2), Variable::new("B", 2)],
            vec![0.5 * (1.0 - q), 0.5 * q, 0.5 * q, 0.5 * (1.0 - q)],
        )
        .unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_abs_diff_eq!(binary_entropy(0.5f64), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(binary_entropy(0.0f64), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.11f64), 0.499916, epsilon = 1e-6);
    }

    #[test]
    fn bsc_mutual_information() {
        let p = bsc(0.1);
        let i = p.mutual_information(&["A"], &["B"], &[]).unwrap();
        assert_abs_diff_eq!(i, 1.0 - binary_entropy(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(p.conditional_entropy(&["B"], &["A"]).unwrap(), binary_entropy(0.1), epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_tables() {
        let v = || vec![Variable::new("A", 2)];
        assert!(JointPmf::new(v(), vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(v(), vec![-0.1, 1.1]).is_err());
        assert!(JointPmf::new(v(), vec![0.5, 0.5, 0.0]).is_err());
        assert!(JointPmf::new(vec![Variable::new("A", 2), Variable::new("A", 2)], vec![0.25; 4]).is_err());
        let p = JointPmf::new(v(), vec![0.5, 0.5 + 5e-7]).unwrap();
        assert_abs_diff_eq!(p.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unknown_and_overlapping_names() {
        let p = bsc(0.2);
        assert!(matches!(p.entropy(&["C"]), Err(Error::UnknownVariable(_))));
        assert!(matches!(p.mutual_information(&["A"], &["A"], &[]), Err(Error::Usage(_))));
        assert!(matches!(p.conditional_entropy(&["A"], &["A"]), Err(Error::Usage(_))));
    }

    #[test]
    fn marginal_order_follows_request() {
        let p = JointPmf::from_fn(
            vec![Variable::new("A", 2), Variable::new("B", 3)],
            |i| (1 + i[0] * 3 + i[1]) as f64 / 21.0,
        )
        .unwrap();
        let q = p.marginal(&["B", "A"]).unwrap();
        assert_eq!(q.var_names(), vec!["B", "A"]);
        assert_abs_diff_eq!(q.prob(&[2, 1]), p.prob(&[1, 2]));
        assert_abs_diff_eq!(p.marginal(&["B"]).unwrap().prob(&[0]), 5.0 / 21.0, epsilon = 1e-15);
    }

    #[test]
    fn deterministic_extension_has_zero_conditional_entropy() {
        let p = bsc(0.3);
        let g = CribFunction::new(vec![0, 0]).unwrap();
        let q = p.extend_with_function("A", &g, "Z").unwrap();
        assert_abs_diff_eq!(q.conditional_entropy(&["Z"], &["A"]).unwrap(), 0.0);
        assert_abs_diff_eq!(q.entropy(&["Z"]).unwrap(), 0.0);
        let id = CribFunction::identity(2);
        let r = p.extend_with_function("A", &id, "Z").unwrap();
        assert_abs_diff_eq!(r.entropy(&["Z"]).unwrap(), r.entropy(&["A"]).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let p: JointPmf<f32> = bsc(0.1).cast().unwrap();
        let i = p.mutual_information(&["A"], &["B"], &[]).unwrap();
        assert!((i as f64 - (1.0 - binary_entropy(0.1f64))).abs() < 1e-5);
    }
}

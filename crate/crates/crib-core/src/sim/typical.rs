//! Joint typicality tests on symbol sequences, by exact counting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::JointPmf;

/// Which deviation of the empirical joint type from the target is tolerated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Typicality {
    /// |N(a)/n - p(a)| <= eps * p(a) for every tuple a.
    Robust,
    /// |N(a)/n - p(a)| <= eps for every tuple a.
    #[default]
    Strong,
}

impl Typicality {
    pub fn label(self) -> &'static str {
        match self {
            Typicality::Robust => "robust",
            Typicality::Strong => "strong",
        }
    }
}

/// How far a candidate is from the typical set, and from the exact target type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Score {
    pub excess: u32,
    pub deviation: f64,
}

impl Score {
    pub fn typical(&self) -> bool {
        self.excess == 0
    }
}

/// Admissible count range for every cell of a joint pmf at block length n.
/// Cells of zero probability must not occur under either definition.
#[derive(Clone, Debug)]
pub struct TypicalSet {
    sizes: Vec<usize>,
    n: usize,
    expected: Vec<f64>,
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl TypicalSet {
    pub fn new(p: &JointPmf<f64>, n: usize, eps: f64, kind: Typicality) -> Self {
        let nf = n as f64;
        let mut lo = Vec::with_capacity(p.probs().len());
        let mut hi = Vec::with_capacity(p.probs().len());
        for &q in p.probs() {
            let (a, b) = if q <= 0.0 {
                (0.0, 0.0)
            } else {
                match kind {
                    Typicality::Robust => (nf * q * (1.0 - eps), nf * q * (1.0 + eps)),
                    Typicality::Strong => (nf * (q - eps), nf * (q + eps)),
                }
            };
            lo.push((a - 1e-9).ceil().max(0.0) as u32);
            hi.push((b + 1e-9).floor().min(nf) as u32);
        }
        Self {
            sizes: p.vars().iter().map(|v| v.size).collect(),
            n,
            expected: p.probs().iter().map(|q| q * nf).collect(),
            lo,
            hi,
        }
    }

    pub fn block_len(&self) -> usize {
        self.n
    }

    fn counts(&self, seqs: &[&[u8]]) -> Vec<u32> {
        let mut counts = vec![0u32; self.lo.len()];
        for i in 0..self.n {
            let mut cell = 0;
            for (s, &k) in seqs.iter().zip(&self.sizes) {
                cell = cell * k + s[i] as usize;
            }
            counts[cell] += 1;
        }
        counts
    }

    /// Count by which cell `a` falls outside its range. Symbols in a cell of zero
    /// probability weigh n + 1 each, more than any deviation among possible cells.
    fn cell_excess(&self, a: usize, c: u32) -> u32 {
        if self.expected[a] <= 0.0 {
            c * (self.n as u32 + 1)
        } else {
            self.lo[a].saturating_sub(c) + c.saturating_sub(self.hi[a])
        }
    }

    /// Weighted distance of the sequences from the admissible ranges; zero iff typical.
    pub fn excess(&self, seqs: &[&[u8]]) -> u32 {
        self.counts(seqs).iter().enumerate().map(|(a, &c)| self.cell_excess(a, c)).sum()
    }

    pub fn contains(&self, seqs: &[&[u8]]) -> bool {
        let c = self.counts(seqs);
        c.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&c, (&lo, &hi))| c >= lo && c <= hi)
    }

    /// Excess and deviation in one pass.
    pub fn score(&self, seqs: &[&[u8]]) -> Score {
        let c = self.counts(seqs);
        let mut excess = 0;
        let mut deviation = 0.0;
        for (a, &k) in c.iter().enumerate() {
            excess += self.cell_excess(a, k);
            deviation += (k as f64 - self.expected[a]).abs();
        }
        Score { excess, deviation }
    }

    /// L1 distance between the empirical counts and n * p.
    pub fn deviation(&self, seqs: &[&[u8]]) -> f64 {
        self.counts(seqs).iter().zip(&self.expected).map(|(&c, e)| (c as f64 - e).abs()).sum()
    }

    /// Largest value of sum_a N(a) w(a) / n over count vectors inside the ranges.
    pub fn max_average(&self, w: &[f64]) -> Option<f64> {
        let lo_total: u64 = self.lo.iter().map(|&v| v as u64).sum();
        let hi_total: u64 = self.hi.iter().map(|&v| v as u64).sum();
        let n = self.n as u64;
        if lo_total > n || hi_total < n {
            return None;
        }
        let mut order: Vec<usize> = (0..w.len()).collect();
        order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
        let mut left = n - lo_total;
        let mut total: f64 = self.lo.iter().zip(w).map(|(&c, v)| c as f64 * v).sum();
        for a in order {
            let add = left.min((self.hi[a] - self.lo[a]) as u64);
            total += add as f64 * w[a];
            left -= add;
        }
        Some(total / self.n as f64)
    }
}

/// True iff the sequences (one per variable of `joint`, in order) are jointly typical.
pub fn is_typical(seqs: &[&[usize]], joint: &JointPmf<f64>, eps: f64, kind: Typicality) -> Result<bool> {
    if seqs.len() != joint.vars().len() {
        return Err(Error::Usage(format!("{} sequences for {} variables", seqs.len(), joint.vars().len())));
    }
    let n = seqs.first().map_or(0, |s| s.len());
    if seqs.iter().any(|s| s.len() != n) {
        return Err(Error::Usage("sequences have different lengths".into()));
    }
    for (s, v) in seqs.iter().zip(joint.vars()) {
        if s.iter().any(|&a| a >= v.size) {
            return Err(Error::Usage(format!("symbol outside the alphabet of `{}`", v.name)));
        }
        if v.size > u8::MAX as usize + 1 {
            return Err(Error::Usage(format!("alphabet of `{}` is too large", v.name)));
        }
    }
    let bytes: Vec<Vec<u8>> = seqs.iter().map(|s| s.iter().map(|&a| a as u8).collect()).collect();
    let refs: Vec<&[u8]> = bytes.iter().map(Vec::as_slice).collect();
    Ok(TypicalSet::new(joint, n, eps, kind).contains(&refs))
}

//! Lazily generated random codebooks with double binning.
//!
//! Every codeword is a pure function of (trial seed, block, layer, index): the
//! generator is a ChaCha stream per (block, layer), positioned at the word offset
//! of the codeword, so codewords are produced on demand in any order.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::plan::Plan;
use super::DecodePolicy;

const LAYER_TOP: u64 = 0;
const LAYER_CRIB: u64 = 1;
const LAYER_REFINE: u64 = 2;
const LAYER_ROW_PERM: u64 = 3;
const LAYER_COL_PERM: u64 = 4;
/// Word spacing between permutations; far more than any shuffle consumes.
const PERM_STRIDE: u128 = 1 << 26;

/// Which layer an encoding attempt failed at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncFail {
    /// No typical top-layer codeword (row for double binning, U for block Markov).
    Top,
    /// No typical codeword in the binned layer.
    Crib,
    /// No typical refinement codeword on top of the chosen crib codeword.
    Refine,
}

/// Indices chosen by the encoder. On failure the least atypical candidate is kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoding {
    /// Top-layer codeword the binned layer is generated on.
    pub parent: usize,
    /// Row of the binned layer (equals `parent` for double binning).
    pub row: usize,
    pub index: usize,
    pub column: usize,
    pub in_bin: usize,
    pub refine: usize,
    pub failure: Option<EncFail>,
}

/// Rows whose bin in the announced column holds the crib.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decode2 {
    Unique(usize),
    NoRow,
    Ambiguous(Vec<usize>),
}

impl Decode2 {
    pub fn from_rows(rows: Vec<usize>) -> Self {
        match rows.len() {
            0 => Decode2::NoRow,
            1 => Decode2::Unique(rows[0]),
            _ => Decode2::Ambiguous(rows),
        }
    }

    pub fn rows(&self) -> Vec<usize> {
        match self {
            Decode2::Unique(r) => vec![*r],
            Decode2::NoRow => vec![],
            Decode2::Ambiguous(r) => r.clone(),
        }
    }

    /// The row Decoder 2 acts on: the unique or smallest matching row, else row 0.
    pub fn chosen(&self) -> usize {
        match self {
            Decode2::Unique(r) => *r,
            Decode2::NoRow => 0,
            Decode2::Ambiguous(r) => r[0],
        }
    }
}

/// Codebook of one block of one trial.
pub struct Codebook<'a> {
    plan: &'a Plan,
    base: ChaCha8Rng,
    block: u64,
    /// Rows of the binned layer per top codeword: 1 for double binning.
    rows_per_parent: usize,
    row_perms: RefCell<HashMap<usize, Rc<(Vec<u32>, Vec<u32>)>>>,
    col_perms: RefCell<HashMap<usize, Rc<(Vec<u32>, Vec<u32>)>>>,
}

impl<'a> Codebook<'a> {
    pub fn new(plan: &'a Plan, trial_seed: u64, block: usize) -> Self {
        let rows_per_parent = if plan.is_block_markov() { plan.top_count() } else { 1 };
        Self {
            plan,
            base: ChaCha8Rng::seed_from_u64(trial_seed),
            block: block as u64,
            rows_per_parent,
            row_perms: RefCell::new(HashMap::new()),
            col_perms: RefCell::new(HashMap::new()),
        }
    }

    pub fn plan(&self) -> &Plan {
        self.plan
    }

    fn stream(&self, layer: u64, word: u128) -> ChaCha8Rng {
        let mut r = self.base.clone();
        r.set_stream(16 + self.block * 8 + layer);
        r.set_word_pos(word);
        r
    }

    fn draw<'c>(&self, layer: u64, flat: usize, cdf: impl Fn(usize) -> &'c [f64], out: &mut Vec<u8>) {
        let n = self.plan.n;
        let mut r = self.stream(layer, flat as u128 * n as u128 * 2);
        out.clear();
        for i in 0..n {
            let u: f64 = r.random();
            let c = cdf(i);
            let s = c.iter().position(|&v| u < v).unwrap_or(c.len() - 1);
            out.push(s as u8);
        }
    }

    /// Top-layer codeword m (the second reconstruction, or U).
    pub fn top(&self, m: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.plan.n);
        let cdf = &self.plan.tables.top;
        self.draw(LAYER_TOP, m, |_| cdf.as_slice(), &mut out);
        out
    }

    fn cell(&self, parent: usize, row: usize) -> usize {
        if self.rows_per_parent == 1 {
            row
        } else {
            parent * self.rows_per_parent + row
        }
    }

    /// Codeword `index` of the binned layer in (parent, row), drawn given the top codeword.
    pub fn crib_codeword(&self, parent: usize, row: usize, index: usize, top: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.plan.n);
        let flat = self.cell(parent, row) * self.plan.crib_count() + index;
        let t = &self.plan.tables.crib_given_top;
        self.draw(LAYER_CRIB, flat, |i| t[top[i] as usize].as_slice(), &mut out);
        out
    }

    /// Refinement codeword k on top of a crib codeword (deterministic-function cribbing).
    pub fn refine_codeword(&self, crib_flat: usize, k: usize, top: &[u8], crib: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.plan.n);
        let flat = crib_flat * self.plan.refine_count() + k;
        let t = self.plan.tables.refine.as_ref().expect("refinement layer");
        let nc = self.plan.tables.crib_size;
        self.draw(LAYER_REFINE, flat, |i| t[top[i] as usize * nc + crib[i] as usize].as_slice(), &mut out);
        out
    }

    fn perm(&self, layer: u64, id: usize, len: usize) -> (Vec<u32>, Vec<u32>) {
        let mut r = self.stream(layer, id as u128 * PERM_STRIDE);
        let mut p: Vec<u32> = (0..len as u32).collect();
        p.shuffle(&mut r);
        let mut inv = vec![0u32; len];
        for (pos, &v) in p.iter().enumerate() {
            inv[v as usize] = pos as u32;
        }
        (p, inv)
    }

    fn row_perm(&self, cell: usize) -> Rc<(Vec<u32>, Vec<u32>)> {
        self.row_perms
            .borrow_mut()
            .entry(cell)
            .or_insert_with(|| Rc::new(self.perm(LAYER_ROW_PERM, cell, self.plan.crib_count())))
            .clone()
    }

    fn col_perm(&self, parent: usize) -> Rc<(Vec<u32>, Vec<u32>)> {
        let id = if self.rows_per_parent == 1 { 0 } else { parent };
        self.col_perms
            .borrow_mut()
            .entry(id)
            .or_insert_with(|| Rc::new(self.perm(LAYER_COL_PERM, id, self.plan.column_count())))
            .clone()
    }

    fn dense(&self) -> bool {
        self.plan.crib_count() >= self.plan.column_count()
    }

    /// (column, in-bin index) of codeword `index` in (parent, row).
    pub fn locate(&self, parent: usize, row: usize, index: usize) -> (usize, usize) {
        let (n, m) = (self.plan.crib_count(), self.plan.column_count());
        if self.dense() {
            let per = n / m;
            let pos = self.row_perm(self.cell(parent, row)).1[index] as usize;
            (pos / per, pos % per)
        } else {
            let t = (row * n + index) % m;
            (self.col_perm(parent).0[t] as usize, 0)
        }
    }

    /// Codeword indices in bin (row, column) of `parent`, ordered by in-bin index.
    pub fn bin(&self, parent: usize, row: usize, column: usize) -> Vec<usize> {
        let (n, m) = (self.plan.crib_count(), self.plan.column_count());
        if self.dense() {
            let per = n / m;
            let p = self.row_perm(self.cell(parent, row));
            p.0[column * per..(column + 1) * per].iter().map(|&v| v as usize).collect()
        } else {
            let t = self.col_perm(parent).1[column] as usize;
            let i = (t + m - (row * n) % m) % m;
            if i < n {
                vec![i]
            } else {
                vec![]
            }
        }
    }

    fn rows_of(&self, _parent: usize) -> usize {
        self.plan.top_count()
    }

    /// Top codeword for `x` in this block (forward encoding picks it one block ahead).
    pub fn select_top(&self, x: &[u8]) -> (usize, bool) {
        self.plan.select(self.plan.top_count(), |m| self.plan.sets.top.score(&[x, &self.top(m)]))
    }

    /// Encodes `x`. Double binning picks the row; block Markov passes `row` (the next
    /// block's top index) and `parent` (this block's top index).
    pub fn encode(&self, x: &[u8], parent: Option<usize>, row: Option<usize>) -> Encoding {
        let plan = self.plan;
        let mut failure = None;
        let parent = match parent {
            Some(p) => p,
            None => {
                let (m, ok) = plan.select(plan.top_count(), |m| {
                    let u = self.top(m);
                    plan.sets.top.score(&[x, &u])
                });
                if !ok {
                    failure = Some(EncFail::Top);
                }
                m
            }
        };
        let row = row.unwrap_or(parent);
        let top = self.top(parent);
        let (index, ok) = plan.select(plan.crib_count(), |i| {
            let c = self.crib_codeword(parent, row, i, &top);
            plan.sets.crib.score(&[x, &c, &top])
        });
        if !ok && failure.is_none() {
            failure = Some(EncFail::Crib);
        }
        let mut refine = 0;
        if plan.tables.refine.is_some() {
            let crib = self.crib_codeword(parent, row, index, &top);
            let flat = self.cell(parent, row) * plan.crib_count() + index;
            let (k, ok) = plan.select(plan.refine_count(), |k| {
                let r = self.refine_codeword(flat, k, &top, &crib);
                plan.sets.refine.as_ref().unwrap().score(&[x, &r, &top])
            });
            if !ok && failure.is_none() {
                failure = Some(EncFail::Refine);
            }
            refine = k;
        }
        let (column, in_bin) = self.locate(parent, row, index);
        Encoding { parent, row, index, column, in_bin, refine, failure }
    }

    /// Decoder 1's reconstruction for an encoding.
    pub fn reconstruction1(&self, e: &Encoding) -> Vec<u8> {
        let top = self.top(e.parent);
        let crib = self.crib_codeword(e.parent, e.row, e.index, &top);
        if self.plan.tables.refine.is_some() {
            let flat = self.cell(e.parent, e.row) * self.plan.crib_count() + e.index;
            self.refine_codeword(flat, e.refine, &top, &crib)
        } else {
            crib
        }
    }

    /// Rows of `parent` whose bin in `column` holds `crib`. With joint typicality
    /// decoding a row also needs (crib, conditioning codeword) typical, where the
    /// conditioning codeword is the row's own for double binning and the parent's
    /// for block Markov.
    pub fn decode2(&self, parent: usize, crib: &[u8], column: usize, policy: DecodePolicy) -> Decode2 {
        let plan = self.plan;
        let bm = plan.is_block_markov();
        let parent_top = if bm { Some(self.top(parent)) } else { None };
        if policy == DecodePolicy::JointTypicality {
            if let Some(u) = &parent_top {
                if !plan.sets.decode.contains(&[crib, u]) {
                    return Decode2::NoRow;
                }
            }
        }
        let mut rows = Vec::new();
        for h in 0..self.rows_of(parent) {
            let bin = self.bin(parent, h, column);
            if bin.is_empty() {
                continue;
            }
            let (p, top) = if bm { (parent, parent_top.clone().unwrap()) } else { (h, self.top(h)) };
            let hit = bin.iter().any(|&i| self.crib_codeword(p, h, i, &top) == crib);
            if hit && (bm || policy == DecodePolicy::BinLookup || plan.sets.decode.contains(&[crib, &top])) {
                rows.push(h);
            }
        }
        Decode2::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{config, scaled};
    use super::*;
    use crate::region::CribbingMode;

    /// Every codeword of (parent, row) is found in exactly one bin at the position
    /// `locate` reports, and bin sizes differ by at most one.
    fn audit(cb: &Codebook<'_>, parent: usize, row: usize) {
        let plan = cb.plan();
        let (n, m) = (plan.crib_count(), plan.column_count());
        let mut seen = vec![0u32; n];
        let mut sizes = Vec::with_capacity(m);
        for col in 0..m {
            let bin = cb.bin(parent, row, col);
            sizes.push(bin.len());
            for (l, &i) in bin.iter().enumerate() {
                seen[i] += 1;
                assert_eq!(cb.locate(parent, row, i), (col, l));
            }
        }
        assert!(seen.iter().all(|&k| k == 1));
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        assert!(hi - lo <= 1, "occupancy {lo}..{hi}");
    }

    #[test]
    fn bins_partition_double_binning() {
        let plan = Plan::new(&scaled(CribbingMode::NonCausal, 1.15, 8)).unwrap();
        let cb = Codebook::new(&plan, 17, 0);
        for row in 0..plan.top_count() {
            audit(&cb, row, row);
        }
    }

    #[test]
    fn bins_partition_block_markov() {
        let plan = Plan::new(&scaled(CribbingMode::StrictlyCausal, 1.15, 8)).unwrap();
        let cb = Codebook::new(&plan, 17, 3);
        for parent in [0, plan.top_count() - 1] {
            for row in 0..plan.top_count() {
                audit(&cb, parent, row);
            }
        }
    }

    #[test]
    fn sparse_columns_hold_one_codeword_per_row() {
        // fewer codewords per row than columns
        let plan = Plan::new(&config(CribbingMode::NonCausal, 0.9, 0.1, 8)).unwrap();
        assert!(plan.crib_count() < plan.column_count());
        let cb = Codebook::new(&plan, 4, 0);
        for row in 0..plan.top_count() {
            audit(&cb, row, row);
        }
    }

    #[test]
    fn codewords_are_pure_functions_of_indices() {
        let plan = Plan::new(&scaled(CribbingMode::StrictlyCausal, 1.15, 8)).unwrap();
        let a = Codebook::new(&plan, 99, 2);
        let b = Codebook::new(&plan, 99, 2);
        let top = b.top(5);
        let late = b.crib_codeword(5, 7, 3, &top);
        assert_eq!(a.top(5), top);
        assert_eq!(a.crib_codeword(5, 7, 3, &a.top(5)), late);
        assert_ne!(Codebook::new(&plan, 99, 3).top(5), top);
        assert_ne!(Codebook::new(&plan, 98, 2).top(5), top);
        // codewords follow the conditional distribution: Xh1 equals Xh2 w.p. 0.86
        let mut agree = 0;
        for m in 0..plan.top_count() {
            let t = a.top(m);
            let c = a.crib_codeword(m, 0, 0, &t);
            agree += t.iter().zip(&c).filter(|(x, y)| x == y).count();
        }
        let frac = agree as f64 / (plan.top_count() * plan.n) as f64;
        assert!((frac - 0.86).abs() < 0.03, "{frac}");
    }

    #[test]
    fn decoder_finds_own_row() {
        let plan = Plan::new(&scaled(CribbingMode::NonCausal, 1.15, 8)).unwrap();
        let cb = Codebook::new(&plan, 6, 0);
        for row in (0..plan.top_count()).step_by(7) {
            let top = cb.top(row);
            let i = row % plan.crib_count();
            let crib = cb.crib_codeword(row, row, i, &top);
            let (col, _) = cb.locate(row, row, i);
            assert!(cb.decode2(0, &crib, col, DecodePolicy::BinLookup).rows().contains(&row));
        }
    }

    #[test]
    fn decode_outcomes() {
        assert_eq!(Decode2::from_rows(vec![]).chosen(), 0);
        assert_eq!(Decode2::from_rows(vec![4]), Decode2::Unique(4));
        assert_eq!(Decode2::from_rows(vec![2, 9]).chosen(), 2);
    }
}

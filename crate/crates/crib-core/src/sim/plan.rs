//! Everything about a simulator configuration that does not depend on the trial:
//! codeword distributions, typical sets, codebook sizes and distortion bounds.

use serde::Serialize;

use super::typical::{Score, TypicalSet};
use super::{DecodePolicy, Selection, SimConfig};
use crate::error::{Error, Result};
use crate::prob::names::{AUX, CRIB, RECON1, RECON2, SOURCE};
use crate::prob::JointPmf;
use crate::region::{CribbingMode, CribbingVariant};

pub const MAX_BLOCK_LEN: usize = 16;
/// Largest codebook layer, in bits.
pub const MAX_LAYER_BITS: u32 = 20;
const ROUND_GUARD: f64 = 1e-9;

/// Codebook sizes with the rounding that produced them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sizing {
    /// Factor applied to every layer's mutual information: (R0 + R1) / I_total.
    pub scale: f64,
    /// Mutual information carried by all layers together.
    pub total_information: f64,
    /// n * scale * I(X; top variable) before rounding up.
    pub top_exact: f64,
    pub top_bits: u32,
    pub crib_exact: f64,
    pub crib_bits: u32,
    pub refine_exact: Option<f64>,
    pub refine_bits: Option<u32>,
    /// n * R0 before rounding up.
    pub column_exact: f64,
    pub column_bits: u32,
    /// Codewords of the binned layer generated on one top codeword.
    pub binned_per_parent: u64,
    /// Bits actually spent per block: top + crib + refine (columns are part of these).
    pub bits_used: u32,
    /// n * (R0 + R1).
    pub bits_nominal: f64,
}

/// Conditional sampling tables, as cumulative distributions.
#[derive(Clone, Debug)]
pub struct Tables {
    pub source: Vec<f64>,
    /// P(top).
    pub top: Vec<f64>,
    /// P(crib | top), per top symbol.
    pub crib_given_top: Vec<Vec<f64>>,
    /// P(xh1 | top, crib) at index top * crib_size + crib, for deterministic-function cribbing.
    pub refine: Option<Vec<Vec<f64>>>,
    pub crib_size: usize,
}

#[derive(Clone, Debug)]
pub struct Sets {
    /// (X, top).
    pub top: TypicalSet,
    /// (X, crib, top).
    pub crib: TypicalSet,
    /// (X, Xh1, top).
    pub refine: Option<TypicalSet>,
    /// (crib, top), used by joint typicality decoding.
    pub decode: TypicalSet,
}

#[derive(Clone, Debug)]
pub struct Plan {
    pub n: usize,
    pub blocks: usize,
    pub mode: CribbingMode,
    pub selection: Selection,
    pub policy: DecodePolicy,
    pub tables: Tables,
    pub sets: Sets,
    pub sizing: Sizing,
    /// Crib symbol of each Xh1 symbol.
    pub g: Vec<u8>,
    /// Causal output map f(u, crib) at u * crib_size + crib.
    pub f: Option<Vec<u8>>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
    pub d2_max: f64,
    /// Largest d1 over the encoder's final typical set.
    pub d1_bound: Option<f64>,
    /// Largest d2 over the typical set that fixes Decoder 2's output.
    pub d2_bound: Option<f64>,
}

fn cdf(p: &[f64]) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        let k = p.len() as f64;
        return (1..=p.len()).map(|i| i as f64 / k).collect();
    }
    let mut acc = 0.0;
    let mut out: Vec<f64> = p
        .iter()
        .map(|v| {
            acc += v / total;
            acc
        })
        .collect();
    // the last symbol with mass takes whatever rounding left over
    if let Some(last) = p.iter().rposition(|&v| v > 0.0) {
        for c in &mut out[last..] {
            *c = 1.0;
        }
    }
    out
}

/// Rows of P(b | a) as cdfs, from a two-variable joint ordered (a, b).
fn conditional_cdfs(p: &JointPmf<f64>) -> Vec<Vec<f64>> {
    let s = p.shape();
    p.probs().chunks(s[1]).map(cdf).collect()
}

fn bits(exact: f64) -> u32 {
    (exact - ROUND_GUARD).ceil().max(0.0) as u32
}

fn sizing_error(what: &str, bits: u32) -> Error {
    Error::Sizing(format!("{what} needs 2^{bits} codewords, cap is 2^{MAX_LAYER_BITS}"))
}

impl Plan {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n;
        let bm = cfg.mode != CribbingMode::NonCausal;
        let top_name = if cfg.mode == CribbingMode::Causal { AUX } else { RECON2 };
        let (joint, crib_name) = match &cfg.variant {
            CribbingVariant::Perfect => (cfg.target.clone(), RECON1),
            CribbingVariant::DetFn(g) => (cfg.target.extend_with_function(RECON1, g, CRIB)?, CRIB),
        };
        let x_size = joint.size_of(SOURCE)?;
        let h1_size = joint.size_of(RECON1)?;
        let top_size = joint.size_of(top_name)?;
        let crib_size = joint.size_of(crib_name)?;
        let g = cfg.variant.function(h1_size);
        let refine = crib_name != RECON1;

        let i_top = joint.mutual_information(&[SOURCE], &[top_name], &[])?;
        let i_crib = joint.mutual_information(&[SOURCE], &[crib_name], &[top_name])?;
        let i_refine = if refine { joint.mutual_information(&[SOURCE], &[RECON1], &[crib_name, top_name])? } else { 0.0 };
        let total = i_top + i_crib + i_refine;
        let rate = cfg.r0 + cfg.r1;
        let scale = if total > ROUND_GUARD { rate / total } else { 1.0 };
        let nf = n as f64;
        let top_exact = nf * scale * i_top;
        let crib_exact = nf * scale * i_crib;
        let refine_exact = refine.then(|| nf * scale * i_refine);
        let column_exact = nf * cfg.r0;
        let (top_bits, crib_bits, column_bits) = (bits(top_exact), bits(crib_exact), bits(column_exact));
        let refine_bits = refine_exact.map(bits);
        for (what, b) in [("top layer", top_bits), ("binned layer", crib_bits), ("column index", column_bits)]
            .into_iter()
            .chain(refine_bits.map(|b| ("refinement layer", b)))
        {
            if b > MAX_LAYER_BITS {
                return Err(sizing_error(what, b));
            }
        }
        let per_parent_bits = if bm { top_bits + crib_bits } else { crib_bits };
        if per_parent_bits > MAX_LAYER_BITS {
            return Err(sizing_error("binned layer under one top codeword", per_parent_bits));
        }
        let sizing = Sizing {
            scale,
            total_information: total,
            top_exact,
            top_bits,
            crib_exact,
            crib_bits,
            refine_exact,
            refine_bits,
            column_exact,
            column_bits,
            binned_per_parent: 1u64 << per_parent_bits,
            bits_used: top_bits + crib_bits + refine_bits.unwrap_or(0),
            bits_nominal: nf * rate,
        };

        let source = cdf(joint.marginal(&[SOURCE])?.probs());
        let top_cdf = cdf(joint.marginal(&[top_name])?.probs());
        let crib_given_top = conditional_cdfs(&joint.marginal(&[top_name, crib_name])?);
        let refine_table = if refine {
            let m = joint.marginal(&[top_name, crib_name, RECON1])?;
            Some(m.probs().chunks(h1_size).map(cdf).collect())
        } else {
            None
        };
        let tables = Tables { source, top: top_cdf, crib_given_top, refine: refine_table, crib_size };

        let (eps, kind) = (cfg.eps, cfg.typicality);
        let xt = joint.marginal(&[SOURCE, top_name])?;
        let xct = joint.marginal(&[SOURCE, crib_name, top_name])?;
        let xht = joint.marginal(&[SOURCE, RECON1, top_name])?;
        let sets = Sets {
            top: TypicalSet::new(&xt, n, eps, kind),
            crib: TypicalSet::new(&xct, n, eps, kind),
            refine: refine.then(|| TypicalSet::new(&xht, n, eps, kind)),
            decode: TypicalSet::new(&joint.marginal(&[crib_name, top_name])?, n, eps, kind),
        };

        let f = if cfg.mode == CribbingMode::Causal {
            let m = joint.marginal(&[AUX, crib_name, RECON2])?;
            let h2 = joint.size_of(RECON2)?;
            Some(
                m.probs()
                    .chunks(h2)
                    .map(|row| {
                        let best = (0..h2).fold(0, |b, k| if row[k] > row[b] { k } else { b });
                        best as u8
                    })
                    .collect::<Vec<u8>>(),
            )
        } else {
            None
        };

        let dm = |m: &crate::prob::DistortionMatrix<f64>, k: usize| -> Vec<Vec<f64>> {
            (0..x_size).map(|x| (0..k).map(|y| m.at(x, y)).collect()).collect()
        };
        let d1 = dm(&cfg.distortion.d1, h1_size);
        let h2_size = joint.size_of(RECON2)?;
        let d2 = dm(&cfg.distortion.d2, h2_size);
        let d2_max = cfg.distortion.d2.max_value();

        // weights over the cells of the set that pins each reconstruction
        let d1_set = sets.refine.as_ref().unwrap_or(&sets.crib);
        let d1_w: Vec<f64> = (0..x_size)
            .flat_map(|x| (0..h1_size).flat_map(move |h| (0..top_size).map(move |_| (x, h))))
            .map(|(x, h)| d1[x][h])
            .collect();
        let d1_bound = d1_set.max_average(&d1_w);
        let d2_bound = match &f {
            None => {
                let w: Vec<f64> = (0..x_size).flat_map(|x| (0..top_size).map(move |t| (x, t))).map(|(x, t)| d2[x][t]).collect();
                sets.top.max_average(&w)
            }
            Some(f) => {
                let w: Vec<f64> = (0..x_size)
                    .flat_map(|x| (0..crib_size).flat_map(move |c| (0..top_size).map(move |u| (x, c, u))))
                    .map(|(x, c, u)| d2[x][f[u * crib_size + c] as usize])
                    .collect();
                sets.crib.max_average(&w)
            }
        };

        Ok(Self {
            n,
            blocks: cfg.blocks,
            mode: cfg.mode,
            selection: cfg.selection,
            policy: cfg.policy,
            tables,
            sets,
            sizing,
            g: (0..h1_size).map(|h| g.apply(h) as u8).collect(),
            f,
            d1,
            d2,
            d2_max,
            d1_bound,
            d2_bound,
        })
    }

    pub fn is_block_markov(&self) -> bool {
        self.mode != CribbingMode::NonCausal
    }

    pub fn top_count(&self) -> usize {
        1 << self.sizing.top_bits
    }

    pub fn crib_count(&self) -> usize {
        1 << self.sizing.crib_bits
    }

    pub fn refine_count(&self) -> usize {
        1 << self.sizing.refine_bits.unwrap_or(0)
    }

    pub fn column_count(&self) -> usize {
        1 << self.sizing.column_bits
    }

    /// Picks a candidate among `count` by the selection rule. The flag is false when
    /// none is typical; the one with the least excess is returned then (ties broken by
    /// deviation under `Closest`, then by index).
    pub fn select(&self, count: usize, mut score: impl FnMut(usize) -> Score) -> (usize, bool) {
        let mut closest: Option<(f64, usize)> = None;
        let mut fallback = (u32::MAX, f64::INFINITY, 0);
        for i in 0..count {
            let s = score(i);
            if s.typical() {
                match self.selection {
                    Selection::First => return (i, true),
                    Selection::Closest => {
                        if closest.is_none_or(|(d, _)| s.deviation < d) {
                            closest = Some((s.deviation, i));
                        }
                    }
                }
            } else {
                let better = match self.selection {
                    Selection::First => s.excess < fallback.0,
                    Selection::Closest => (s.excess, s.deviation) < (fallback.0, fallback.1),
                };
                if better {
                    fallback = (s.excess, s.deviation, i);
                }
            }
        }
        match closest {
            Some((_, i)) => (i, true),
            None => (fallback.2, false),
        }
    }

    /// Crib block Decoder 2 sees for Decoder 1's output.
    pub fn crib_of(&self, xh1: &[u8]) -> Vec<u8> {
        xh1.iter().map(|&h| self.g[h as usize]).collect()
    }

    pub fn distortion1(&self, x: &[u8], xh1: &[u8]) -> f64 {
        x.iter().zip(xh1).map(|(&a, &b)| self.d1[a as usize][b as usize]).sum::<f64>() / self.n as f64
    }

    pub fn distortion2(&self, x: &[u8], xh2: &[u8]) -> f64 {
        x.iter().zip(xh2).map(|(&a, &b)| self.d2[a as usize][b as usize]).sum::<f64>() / self.n as f64
    }

    /// Decoder 2's causal output symbol by symbol.
    pub fn causal_output(&self, u: &[u8], crib: &[u8]) -> Vec<u8> {
        let f = self.f.as_ref().expect("causal map");
        let k = self.tables.crib_size;
        u.iter().zip(crib).map(|(&a, &c)| f[a as usize * k + c as usize]).collect()
    }
}

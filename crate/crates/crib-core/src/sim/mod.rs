//! Monte Carlo simulation of the random binning schemes: double binning for
//! noncausal cribbing, forward encoding with block Markov decoding for strictly
//! causal and causal cribbing.

mod codebook;
mod plan;
mod typical;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::names::{AUX, RECON1, RECON2, SOURCE};
use crate::prob::{DistortionSpec, JointPmf};
use crate::region::{CribbingMode, CribbingVariant};

pub use codebook::{Codebook, Decode2, EncFail, Encoding};
pub use plan::{Plan, Sizing, MAX_BLOCK_LEN, MAX_LAYER_BITS};
pub use typical::{is_typical, Score, TypicalSet, Typicality};

/// How Decoder 2 finds the row from the crib and the column index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodePolicy {
    /// Rows whose bin holds the crib verbatim.
    #[default]
    BinLookup,
    /// As above, and the crib must also be jointly typical with the row's top codeword.
    JointTypicality,
}

/// Which typical candidate the encoder takes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Smallest index.
    First,
    /// Smallest L1 distance of the joint type from the target (smallest index on ties).
    #[default]
    Closest,
}

fn default_eps() -> f64 {
    0.1
}

fn default_blocks() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    pub r0: f64,
    pub r1: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    pub mode: CribbingMode,
    pub variant: CribbingVariant,
    /// Joint over X, Xh1, Xh2 (and U for causal cribbing) the codebooks are drawn from.
    pub target: JointPmf<f64>,
    pub distortion: DistortionSpec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub typicality: Typicality,
    #[serde(default)]
    pub selection: Selection,
    #[serde(default)]
    pub policy: DecodePolicy,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("block length must be at least 1".into()));
        }
        if self.n > MAX_BLOCK_LEN {
            return Err(Error::Sizing(format!("block length {} exceeds the cap {MAX_BLOCK_LEN}", self.n)));
        }
        if self.blocks == 0 {
            return Err(Error::Config("block count must be at least 1".into()));
        }
        match self.mode {
            CribbingMode::NonCausal if self.blocks != 1 => {
                return Err(Error::Config(format!("double binning runs one block, got {}", self.blocks)))
            }
            CribbingMode::StrictlyCausal | CribbingMode::Causal if self.blocks < 2 => {
                return Err(Error::Config("block Markov decoding needs at least 2 blocks".into()))
            }
            _ => {}
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::Config(format!("eps must lie in (0, 0.5), got {}", self.eps)));
        }
        for (name, r) in [("r0", self.r0), ("r1", self.r1)] {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and nonnegative, got {r}")));
            }
        }
        let p = &self.target;
        let mut need = vec![SOURCE, RECON1, RECON2];
        if self.mode == CribbingMode::Causal {
            need.push(AUX);
        }
        for v in &need {
            if !p.has_var(v) {
                return Err(Error::Config(format!("target joint lacks `{v}`")));
            }
        }
        if p.vars().iter().any(|v| v.size > 256) {
            return Err(Error::Config("alphabets above 256 symbols are not simulated".into()));
        }
        let x = p.size_of(SOURCE)?;
        let d = &self.distortion;
        if d.d1.source_size() != x || d.d1.recon_size() != p.size_of(RECON1)? || d.d2.recon_size() != p.size_of(RECON2)? {
            return Err(Error::Config("distortion matrices do not match the target alphabets".into()));
        }
        if let CribbingVariant::DetFn(g) = &self.variant {
            if g.domain_size() != p.size_of(RECON1)? {
                return Err(Error::Config("crib function domain does not match Xh1".into()));
            }
        }
        if self.mode == CribbingMode::Causal {
            let q = match &self.variant {
                CribbingVariant::Perfect => p.clone(),
                CribbingVariant::DetFn(g) => p.extend_with_function(RECON1, g, crate::prob::names::CRIB)?,
            };
            let z = if matches!(self.variant, CribbingVariant::Perfect) { RECON1 } else { crate::prob::names::CRIB };
            let h = q.conditional_entropy(&[RECON2], &[AUX, z])?;
            if h > 1e-9 {
                return Err(Error::Config(format!("{RECON2} is not a function of ({AUX}, {z}): H = {h}")));
            }
        }
        Ok(())
    }
}

/// Outcome of one block of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockRecord {
    pub d1: f64,
    pub d2: f64,
    /// No typical top codeword (E1 / Ee,1).
    pub e1: bool,
    /// No typical codeword in the binned or refinement layer (E2 / Ee,2).
    pub e2: bool,
    /// Decoder 2 did not find the true row (E3 / Ed,1).
    pub e3: bool,
    /// Decoder 2 found a wrong row (E4 / Ed,2).
    pub e4: bool,
    /// Decoded from a wrong top codeword inherited from an earlier block.
    pub tainted: bool,
    /// True and decoded top index of Decoder 2's output.
    pub m: usize,
    pub m_hat: usize,
}

impl BlockRecord {
    fn error(&self) -> bool {
        self.e1 || self.e2 || self.e3 || self.e4 || self.tainted
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// Mean over the counted blocks (all of them for double binning, 2..B otherwise).
    pub d1: f64,
    pub d2: f64,
    /// d2 with the first block charged at the largest distortion.
    pub d2_charged: f64,
    /// Typical-average bound broken in a block without events (must not happen).
    pub bound_violations: u32,
    pub blocks: Vec<BlockRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EventCounts {
    /// Trials for double binning, trials * (B - 1) for block Markov.
    pub units: u64,
    pub e1: u64,
    pub e2: u64,
    pub e3: u64,
    pub e4: u64,
    pub tainted: u64,
    pub encode_failures: u64,
    pub decode_failures: u64,
    pub errors: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EventRates {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub tainted: f64,
    pub encode_failure: f64,
    pub decode_failure: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BlockSummary {
    pub block: usize,
    pub d1: f64,
    pub d2: f64,
    pub e1: u64,
    pub e2: u64,
    pub e3: u64,
    pub e4: u64,
    pub tainted: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub trials: usize,
    pub seed: u64,
    pub sizing: Sizing,
    pub events: EventCounts,
    pub rates: EventRates,
    /// Mean of the per-trial distortions, block 1 excluded under block Markov.
    pub d1: f64,
    pub d2: f64,
    pub d2_charged: f64,
    /// Block 1 under block Markov, reported apart.
    pub first_block: Option<BlockSummary>,
    pub per_block: Vec<BlockSummary>,
    pub d1_bound: Option<f64>,
    pub d2_bound: Option<f64>,
    pub bound_violations: u64,
    pub records: Vec<TrialRecord>,
}

/// Seed of trial `index`, derived from the master seed alone.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(index as u64);
    r.next_u64()
}

fn source_block(plan: &Plan, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let c = &plan.tables.source;
    (0..plan.n)
        .map(|_| {
            let u: f64 = rng.random();
            c.iter().position(|&v| u < v).unwrap_or(c.len() - 1) as u8
        })
        .collect()
}

fn source_rng(seed: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(1);
    r
}

/// Codebook of one block, as a standalone object.
pub fn build_codebook(plan: &Plan, trial_seed: u64, block: usize) -> Codebook<'_> {
    Codebook::new(plan, trial_seed, block)
}

/// Double binning encoder: smallest-index (or closest) typical row, then codeword.
pub fn encode_noncausal(cb: &Codebook<'_>, x: &[u8]) -> Result<Encoding> {
    if x.len() != cb.plan().n {
        return Err(Error::Usage(format!("source block has length {}, expected {}", x.len(), cb.plan().n)));
    }
    Ok(cb.encode(x, None, None))
}

/// Decoder 2 for double binning: the row's top codeword, or the failure event.
pub fn decode2_noncausal(cb: &Codebook<'_>, crib: &[u8], column: usize, policy: DecodePolicy) -> Result<Decode2> {
    if crib.len() != cb.plan().n {
        return Err(Error::Usage(format!("crib has length {}, expected {}", crib.len(), cb.plan().n)));
    }
    if column >= cb.plan().column_count() {
        return Err(Error::Usage(format!("column {column} out of range")));
    }
    Ok(cb.decode2(0, crib, column, policy))
}

fn within(d: f64, bound: Option<f64>) -> bool {
    bound.is_none_or(|b| d <= b + 1e-9)
}

fn check_bounds(plan: &Plan, b: &BlockRecord) -> u32 {
    if b.error() {
        return 0;
    }
    u32::from(!within(b.d1, plan.d1_bound)) + u32::from(!within(b.d2, plan.d2_bound))
}

/// One trial of double binning.
pub fn run_double_binning(plan: &Plan, trial: usize, seed: u64) -> TrialRecord {
    let cb = Codebook::new(plan, seed, 0);
    let x = source_block(plan, &mut source_rng(seed));
    let enc = cb.encode(&x, None, None);
    let xh1 = cb.reconstruction1(&enc);
    let crib = plan.crib_of(&xh1);
    let dec = cb.decode2(0, &crib, enc.column, plan.policy);
    let rows = dec.rows();
    let m_hat = dec.chosen();
    let xh2 = cb.top(m_hat);
    let block = BlockRecord {
        d1: plan.distortion1(&x, &xh1),
        d2: plan.distortion2(&x, &xh2),
        e1: enc.failure == Some(EncFail::Top),
        e2: matches!(enc.failure, Some(EncFail::Crib | EncFail::Refine)),
        e3: !rows.contains(&enc.row),
        e4: rows.iter().any(|&r| r != enc.row),
        tainted: false,
        m: enc.row,
        m_hat,
    };
    let violations = check_bounds(plan, &block);
    TrialRecord {
        trial,
        seed,
        d1: block.d1,
        d2: block.d2,
        d2_charged: block.d2,
        bound_violations: violations,
        blocks: vec![block],
    }
}

/// One trial of forward encoding with block Markov decoding over B blocks.
pub fn run_block_markov(plan: &Plan, trial: usize, seed: u64) -> TrialRecord {
    let nb = plan.blocks;
    let books: Vec<Codebook<'_>> = (0..nb).map(|b| Codebook::new(plan, seed, b)).collect();
    let mut src = source_rng(seed);
    let xs: Vec<Vec<u8>> = (0..nb).map(|_| source_block(plan, &mut src)).collect();

    // m[b] is the top index of block b; the first and the one after the last are fixed
    let mut m = vec![0usize; nb + 1];
    let mut top_ok = vec![true; nb];
    for b in 1..nb {
        let (idx, ok) = books[b].select_top(&xs[b]);
        m[b] = idx;
        top_ok[b] = ok;
    }
    let encs: Vec<Encoding> = (0..nb).map(|b| books[b].encode(&xs[b], Some(m[b]), Some(m[b + 1]))).collect();
    let xh1: Vec<Vec<u8>> = (0..nb).map(|b| books[b].reconstruction1(&encs[b])).collect();
    let cribs: Vec<Vec<u8>> = xh1.iter().map(|h| plan.crib_of(h)).collect();

    let mut blocks = Vec::with_capacity(nb);
    let mut m_hat = 0usize;
    let mut violations = 0;
    for b in 0..nb {
        let (mut e3, mut e4, mut tainted) = (false, false, false);
        if b > 0 {
            let parent = m_hat;
            if parent == m[b - 1] {
                let dec = books[b - 1].decode2(parent, &cribs[b - 1], encs[b - 1].column, plan.policy);
                let rows = dec.rows();
                e3 = !rows.contains(&m[b]);
                e4 = rows.iter().any(|&r| r != m[b]);
                m_hat = dec.chosen();
            } else {
                tainted = true;
                m_hat = books[b - 1].decode2(parent, &cribs[b - 1], encs[b - 1].column, plan.policy).chosen();
            }
        }
        let u = books[b].top(m_hat);
        let xh2 = match plan.mode {
            CribbingMode::Causal => plan.causal_output(&u, &cribs[b]),
            _ => u,
        };
        let rec = BlockRecord {
            d1: plan.distortion1(&xs[b], &xh1[b]),
            d2: plan.distortion2(&xs[b], &xh2),
            e1: !top_ok[b],
            e2: matches!(encs[b].failure, Some(EncFail::Crib | EncFail::Refine)),
            e3,
            e4,
            tainted,
            m: m[b],
            m_hat,
        };
        if b > 0 {
            violations += check_bounds(plan, &rec);
        }
        blocks.push(rec);
    }
    let counted = &blocks[1..];
    let k = counted.len() as f64;
    let d1 = counted.iter().map(|r| r.d1).sum::<f64>() / k;
    let d2_sum = counted.iter().map(|r| r.d2).sum::<f64>();
    TrialRecord {
        trial,
        seed,
        d1,
        d2: d2_sum / k,
        d2_charged: (plan.d2_max + d2_sum) / nb as f64,
        bound_violations: violations,
        blocks,
    }
}

/// One trial with the scheme matching the plan's mode.
pub fn run_trial(plan: &Plan, trial: usize, seed: u64) -> TrialRecord {
    if plan.is_block_markov() {
        run_block_markov(plan, trial, seed)
    } else {
        run_double_binning(plan, trial, seed)
    }
}

fn summarize(idx: usize, records: &[TrialRecord]) -> BlockSummary {
    let t = records.len() as f64;
    let mut s = BlockSummary { block: idx + 1, ..Default::default() };
    for r in records {
        let b = &r.blocks[idx];
        s.d1 += b.d1;
        s.d2 += b.d2;
        s.e1 += u64::from(b.e1);
        s.e2 += u64::from(b.e2);
        s.e3 += u64::from(b.e3);
        s.e4 += u64::from(b.e4);
        s.tainted += u64::from(b.tainted);
    }
    s.d1 /= t;
    s.d2 /= t;
    s
}

/// Runs `trials` independent trials in parallel; the report depends only on the
/// configuration and the master seed.
pub fn simulate(cfg: &SimConfig, trials: usize) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is needed".into()));
    }
    let plan = Plan::new(cfg)?;
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&plan, t, trial_seed(cfg.seed, t)))
        .collect();
    Ok(merge(cfg, &plan, records))
}

fn rate(k: u64, units: u64) -> f64 {
    k as f64 / units as f64
}

fn merge(cfg: &SimConfig, plan: &Plan, records: Vec<TrialRecord>) -> SimReport {
    let bm = plan.is_block_markov();
    let skip = usize::from(bm);
    let mut ev = EventCounts::default();
    for r in &records {
        for b in &r.blocks[skip..] {
            ev.units += 1;
            ev.e1 += u64::from(b.e1);
            ev.e2 += u64::from(b.e2);
            ev.e3 += u64::from(b.e3);
            ev.e4 += u64::from(b.e4);
            ev.tainted += u64::from(b.tainted);
            ev.encode_failures += u64::from(b.e1 || b.e2);
            ev.decode_failures += u64::from(b.e3 || b.e4 || b.tainted);
            ev.errors += u64::from(b.error());
        }
    }
    let u = ev.units;
    let rates = EventRates {
        e1: rate(ev.e1, u),
        e2: rate(ev.e2, u),
        e3: rate(ev.e3, u),
        e4: rate(ev.e4, u),
        tainted: rate(ev.tainted, u),
        encode_failure: rate(ev.encode_failures, u),
        decode_failure: rate(ev.decode_failures, u),
        error: rate(ev.errors, u),
    };
    let t = records.len() as f64;
    let mean = |f: fn(&TrialRecord) -> f64| records.iter().map(f).sum::<f64>() / t;
    let per_block: Vec<BlockSummary> = (0..plan.blocks).map(|b| summarize(b, &records)).collect();
    SimReport {
        config: cfg.clone(),
        trials: records.len(),
        seed: cfg.seed,
        sizing: plan.sizing.clone(),
        events: ev,
        rates,
        d1: mean(|r| r.d1),
        d2: mean(|r| r.d2),
        d2_charged: mean(|r| r.d2_charged),
        first_block: bm.then(|| per_block[0].clone()),
        per_block,
        d1_bound: plan.d1_bound,
        d2_bound: plan.d2_bound,
        bound_violations: records.iter().map(|r| r.bound_violations as u64).sum(),
        records,
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::prob::{CribFunction, Variable};
    use crate::region::{sr_region, BernoulliFamily};

    /// Optimum test channel of the binary example at (0.05, 0.1).
    pub fn bernoulli_joint() -> JointPmf<f64> {
        BernoulliFamily::new(0.05, 0.1).unwrap().joint(0.855).unwrap()
    }

    pub fn config(mode: CribbingMode, r0: f64, r1: f64, n: usize) -> SimConfig {
        SimConfig {
            n,
            blocks: if mode == CribbingMode::NonCausal { 1 } else { 10 },
            r0,
            r1,
            eps: 0.1,
            mode,
            variant: CribbingVariant::Perfect,
            target: bernoulli_joint(),
            distortion: DistortionSpec::hamming(2, 0.05, 0.1).unwrap(),
            seed: 3,
            typicality: Typicality::default(),
            selection: Selection::default(),
            policy: DecodePolicy::default(),
        }
    }

    /// Rates `scale` times the region's bounds for the Bernoulli optimum.
    pub fn scaled(mode: CribbingMode, scale: f64, n: usize) -> SimConfig {
        let r = sr_region(&bernoulli_joint(), mode, &CribbingVariant::Perfect).unwrap();
        config(mode, r.r0_lb * scale, (r.sum_rate_lb - r.r0_lb) * scale, n)
    }

    /// Joint where every reconstruction (and U) equals the source.
    pub fn lossless_joint(with_aux: bool) -> JointPmf<f64> {
        let mut vars = vec![Variable::new("X", 2), Variable::new("Xh1", 2), Variable::new("Xh2", 2)];
        if with_aux {
            vars.push(Variable::new("U", 2));
        }
        JointPmf::from_fn(vars, |i| if i.iter().all(|&v| v == i[0]) { 0.5 } else { 0.0 }).unwrap()
    }

    /// Causal target with U a copy of Xh2, so f(u, crib) = u.
    pub fn causal_copy(p: &JointPmf<f64>) -> JointPmf<f64> {
        p.extend_with_function("Xh2", &CribFunction::identity(2), "U").unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::prob::CribFunction;

    fn same_outputs(a: &TrialRecord, b: &TrialRecord) {
        assert_eq!(a.blocks.len(), b.blocks.len());
        for (x, y) in a.blocks.iter().zip(&b.blocks) {
            assert_eq!((x.m, x.m_hat, x.e1, x.e2, x.e3, x.e4, x.tainted), (y.m, y.m_hat, y.e1, y.e2, y.e3, y.e4, y.tainted));
            assert_eq!((x.d1, x.d2), (y.d1, y.d2));
        }
    }

    #[test]
    fn config_validation() {
        let ok = config(CribbingMode::NonCausal, 0.2, 0.7, 8);
        assert!(ok.validate().is_ok());
        let mut c = ok.clone();
        c.n = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.n = 17;
        assert!(matches!(c.validate(), Err(Error::Sizing(_))));
        let mut c = ok.clone();
        c.blocks = 3;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ok.clone();
        c.eps = 0.5;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ok.clone();
        c.r1 = -1.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = config(CribbingMode::StrictlyCausal, 0.2, 0.7, 8);
        c.blocks = 1;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        // causal needs U
        let c = config(CribbingMode::Causal, 0.2, 0.7, 8);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn oversize_rejected() {
        let c = config(CribbingMode::NonCausal, 0.0, 3.0, 16);
        assert!(matches!(Plan::new(&c), Err(Error::Sizing(_))));
        let c = config(CribbingMode::StrictlyCausal, 0.3, 1.3, 16);
        assert!(matches!(Plan::new(&c), Err(Error::Sizing(_))));
    }

    #[test]
    fn degenerate_codebook() {
        let mut c = config(CribbingMode::NonCausal, 0.0, 0.0, 1);
        c.variant = CribbingVariant::DetFn(CribFunction::constant(2));
        let plan = Plan::new(&c).unwrap();
        assert_eq!((plan.top_count(), plan.crib_count(), plan.refine_count(), plan.column_count()), (1, 1, 1, 1));
        let r = simulate(&c, 3).unwrap();
        assert_eq!(r.events.units, 3);
    }

    #[test]
    fn zero_common_rate_single_column() {
        let plan = Plan::new(&config(CribbingMode::NonCausal, 0.0, 0.9, 8)).unwrap();
        assert_eq!(plan.column_count(), 1);
        let cb = Codebook::new(&plan, 5, 0);
        for i in 0..plan.crib_count() {
            assert_eq!(cb.locate(0, 3, i).0, 0);
        }
        assert_eq!(cb.bin(0, 3, 0).len(), plan.crib_count());
    }

    #[test]
    fn lossless_layer_encodes_to_matching_row() {
        let mut c = config(CribbingMode::NonCausal, 2.0, 0.0, 8);
        c.target = lossless_joint(false);
        let plan = Plan::new(&c).unwrap();
        let cb = Codebook::new(&plan, 9, 0);
        let x: Vec<u8> = vec![0, 1, 1, 0, 1, 0, 0, 1];
        let e = encode_noncausal(&cb, &x).unwrap();
        assert_eq!(e.failure, None);
        assert_eq!(cb.top(e.row), x);
        assert_eq!(cb.reconstruction1(&e), x);
        let d = decode2_noncausal(&cb, &x, e.column, DecodePolicy::BinLookup).unwrap();
        assert_eq!(d, Decode2::Unique(e.row));
        assert!(encode_noncausal(&cb, &x[..4]).is_err());
        assert!(decode2_noncausal(&cb, &x, plan.column_count(), DecodePolicy::BinLookup).is_err());
    }

    #[test]
    fn singleton_bins_decode_uniquely() {
        // one codeword per column across the whole codebook
        let mut c = config(CribbingMode::NonCausal, 1.0, 0.0, 8);
        c.target = lossless_joint(false);
        let plan = Plan::new(&c).unwrap();
        assert!(plan.top_count() * plan.crib_count() <= plan.column_count());
        let cb = Codebook::new(&plan, 2, 0);
        for m in 0..plan.top_count() {
            let top = cb.top(m);
            let crib = cb.crib_codeword(m, m, 0, &top);
            let (col, _) = cb.locate(m, m, 0);
            assert_eq!(cb.decode2(0, &crib, col, DecodePolicy::BinLookup).chosen(), m);
        }
    }

    #[test]
    fn lossless_block_markov() {
        let mut c = config(CribbingMode::StrictlyCausal, 2.0, 0.0, 8);
        c.blocks = 2;
        c.target = lossless_joint(false);
        let r = simulate(&c, 20).unwrap();
        for t in &r.records {
            let b = &t.blocks[1];
            assert_eq!((b.d1, b.d2, b.m_hat), (0.0, 0.0, b.m));
        }
        assert_eq!(r.d2, 0.0);
        assert!(r.d2_charged <= plan_dmax(&c) / 2.0 + 1e-12);
    }

    fn plan_dmax(c: &SimConfig) -> f64 {
        c.distortion.d2.max_value()
    }

    #[test]
    fn seeds_and_parallelism() {
        let c = scaled(CribbingMode::StrictlyCausal, 1.15, 8);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| simulate(&c, 12).unwrap())
        };
        let a = run(1);
        assert_eq!(a, run(4));
        assert_eq!(a, simulate(&c, 12).unwrap());
        let long = simulate(&c, 24).unwrap();
        assert_eq!(&long.records[..12], &a.records[..]);
    }

    #[test]
    fn single_trial_is_one_run() {
        for c in [scaled(CribbingMode::NonCausal, 1.15, 8), scaled(CribbingMode::StrictlyCausal, 1.15, 8)] {
            let r = simulate(&c, 1).unwrap();
            let plan = Plan::new(&c).unwrap();
            let t = run_trial(&plan, 0, trial_seed(c.seed, 0));
            assert_eq!(r.records, vec![t.clone()]);
            assert_eq!((r.d1, r.d2), (t.d1, t.d2));
        }
    }

    #[test]
    fn aggregate_is_mean_of_trials() {
        let r = simulate(&scaled(CribbingMode::StrictlyCausal, 1.15, 8), 16).unwrap();
        let mean = r.records.iter().map(|t| t.d2).sum::<f64>() / 16.0;
        assert!((r.d2 - mean).abs() < 1e-15);
        assert_eq!(r.events.units, 16 * 9);
        assert!(r.events.e1 <= r.events.units && r.rates.error <= 1.0);
        assert_eq!(r.bound_violations, 0);
    }

    #[test]
    fn causal_copy_matches_strictly_causal() {
        let sc = scaled(CribbingMode::StrictlyCausal, 1.15, 10);
        let mut ca = sc.clone();
        ca.mode = CribbingMode::Causal;
        ca.target = causal_copy(&sc.target);
        let (a, b) = (simulate(&sc, 30).unwrap(), simulate(&ca, 30).unwrap());
        for (x, y) in a.records.iter().zip(&b.records) {
            same_outputs(x, y);
        }
    }

    #[test]
    fn identity_crib_function_matches_perfect() {
        for mode in [CribbingMode::NonCausal, CribbingMode::StrictlyCausal] {
            let p = scaled(mode, 1.15, 10);
            let mut d = p.clone();
            d.variant = CribbingVariant::DetFn(CribFunction::identity(2));
            let (a, b) = (simulate(&p, 30).unwrap(), simulate(&d, 30).unwrap());
            for (x, y) in a.records.iter().zip(&b.records) {
                same_outputs(x, y);
            }
        }
    }

    #[test]
    fn first_block_reported_apart() {
        let r = simulate(&scaled(CribbingMode::StrictlyCausal, 1.15, 8), 8).unwrap();
        let first = r.first_block.as_ref().unwrap();
        assert_eq!(first.block, 1);
        assert_eq!(r.per_block.len(), 10);
        assert_eq!(&r.per_block[0], first);
        assert!(simulate(&scaled(CribbingMode::NonCausal, 1.15, 8), 2).unwrap().first_block.is_none());
    }
}

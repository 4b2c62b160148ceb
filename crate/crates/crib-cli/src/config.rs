//! Run configuration: one JSON document, merged with command-line overrides.

use serde::{Deserialize, Serialize};

use crib_core::prob::{CribFunction, DistortionMatrix, DistortionSpec, JointPmf};
use crib_core::region::{CribbingMode, CribbingVariant, FeasibleParameterization};
use crib_core::sim::{DecodePolicy, Selection, Typicality};
use crib_core::{Error, Result};

/// Master seed used when neither the config nor `--seed` gives one.
pub const DEFAULT_SEED: u64 = 20_260_101;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum VariantKind {
    #[default]
    Perfect,
    Detfn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Noncausal,
    StrictlyCausal,
    Causal,
}

impl From<ModeArg> for CribbingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Noncausal => CribbingMode::NonCausal,
            ModeArg::StrictlyCausal => CribbingMode::StrictlyCausal,
            ModeArg::Causal => CribbingMode::Causal,
        }
    }
}

/// Simulator settings. Rates left out are `rate_scale` times the region bounds
/// of the target joint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    pub n: usize,
    /// Defaults to 1 for noncausal cribbing and 10 otherwise.
    pub blocks: Option<usize>,
    pub trials: usize,
    pub eps: f64,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub rate_scale: f64,
    pub typicality: Typicality,
    pub selection: Selection,
    pub policy: DecodePolicy,
    /// Keep per-trial records in the report.
    pub records: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            n: 12,
            blocks: None,
            trials: 200,
            eps: 0.1,
            r0: None,
            r1: None,
            rate_scale: 1.15,
            typicality: Typicality::default(),
            selection: Selection::default(),
            policy: DecodePolicy::default(),
            records: false,
        }
    }
}

/// Explicit channel side for `duality`; without it the channel is derived from the joint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacParams {
    /// Row-major [x1][x2][y].
    pub channel: Vec<f64>,
    pub output_size: usize,
    /// Joint over X1, X2.
    pub input: JointPmf<f64>,
    pub causal: Option<CausalParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalParams {
    pub aux_size: usize,
    /// Row-major [x1][u].
    pub aux_given_x1: Vec<f64>,
    /// Row-major [u][z1].
    pub f: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// P(x).
    pub source: Vec<f64>,
    pub d1: f64,
    pub d2: f64,
    /// Distortion matrices [x][xh]; Hamming when absent.
    pub d1_table: Option<Vec<Vec<f64>>>,
    pub d2_table: Option<Vec<Vec<f64>>>,
    pub mode: CribbingMode,
    pub variant: VariantKind,
    /// g(xh1) for the deterministic function variant.
    pub crib_map: Option<Vec<usize>>,
    /// Joint over X, Xh1, Xh2 (and U for causal cribbing). When absent the
    /// minimum sum rate joint of the search is used.
    pub joint: Option<JointPmf<f64>>,
    /// Conferencing link rate.
    pub r12: Option<f64>,
    pub search: FeasibleParameterization,
    pub sim: SimParams,
    pub mac: Option<MacParams>,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: vec![0.5, 0.5],
            d1: 0.05,
            d2: 0.1,
            d1_table: None,
            d2_table: None,
            mode: CribbingMode::NonCausal,
            variant: VariantKind::Perfect,
            crib_map: None,
            joint: None,
            r12: None,
            search: FeasibleParameterization::default(),
            sim: SimParams::default(),
            mac: None,
            seed: DEFAULT_SEED,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.source.is_empty() {
            return Err(Error::Config("source pmf is empty".into()));
        }
        for (name, d) in [("d1", self.d1), ("d2", self.d2)] {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and nonnegative, got {d}")));
            }
        }
        if self.variant == VariantKind::Detfn && self.crib_map.is_none() {
            return Err(Error::Config("variant detfn needs `crib_map`".into()));
        }
        if let Some(r) = self.r12 {
            if r.is_nan() || r < 0.0 {
                return Err(Error::Config(format!("r12 must be nonnegative, got {r}")));
            }
        }
        let s = &self.sim;
        if s.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(s.rate_scale.is_finite() && s.rate_scale >= 0.0) {
            return Err(Error::Config(format!("rate_scale must be finite and nonnegative, got {}", s.rate_scale)));
        }
        self.source_pmf()?;
        self.distortion()?;
        self.cribbing()?;
        Ok(())
    }

    pub fn source_pmf(&self) -> Result<JointPmf<f64>> {
        JointPmf::single(crib_core::prob::names::SOURCE, self.source.clone())
    }

    pub fn distortion(&self) -> Result<DistortionSpec<f64>> {
        let nx = self.source.len();
        let (n1, n2) = match &self.joint {
            Some(p) => (
                p.size_of(crib_core::prob::names::RECON1)?,
                p.size_of(crib_core::prob::names::RECON2)?,
            ),
            None => (self.search.recon1_size, self.search.recon2_size),
        };
        let table = |t: &Option<Vec<Vec<f64>>>, n: usize| -> Result<DistortionMatrix<f64>> {
            match t {
                Some(rows) => DistortionMatrix::new(rows.clone()),
                None if n == nx => Ok(DistortionMatrix::hamming(nx)),
                None => Err(Error::Config("Hamming distortion needs equal source and reconstruction alphabets".into())),
            }
        };
        DistortionSpec::new(table(&self.d1_table, n1)?, table(&self.d2_table, n2)?, self.d1, self.d2)
    }

    pub fn cribbing(&self) -> Result<CribbingVariant> {
        Ok(match self.variant {
            VariantKind::Perfect => CribbingVariant::Perfect,
            VariantKind::Detfn => {
                let map = self.crib_map.clone().ok_or_else(|| Error::Config("variant detfn needs `crib_map`".into()))?;
                CribbingVariant::DetFn(CribFunction::new(map)?)
            }
        })
    }

    pub fn blocks(&self) -> usize {
        self.sim.blocks.unwrap_or(if self.mode == CribbingMode::NonCausal { 1 } else { 10 })
    }
}

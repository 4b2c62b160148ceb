use serde::Serialize;

use crib_core::mac::{
    split_rate_projection, duality_check, duality_check_conferencing, CausalStructure, DualityReport, MacInstance,
    ProjectionReport,
};
use crib_core::prob::names::{RECON1, RECON2, SOURCE};
use crib_core::prob::{CribFunction, JointPmf};
use crib_core::region::{
    bernoulli_example, closed_form_corners, conferencing_corner_points, conferencing_region, equitz_cover_region,
    sr_corner_points, sr_region, CornerPoint, CribbingMode, CribbingVariant, ExampleCorners, Frontier, FrontierSearch, Rate, RegionSpec, Setting,
};
use crib_core::sim::{simulate, SimConfig, SimReport, MAX_BLOCK_LEN};
use crib_core::{Error, Result};

use crate::config::{Format, RunConfig};
use crate::output;
use crate::Command;

/// Rendered output, and the error to exit with once it has been written.
pub struct Outcome {
    pub text: String,
    pub error: Option<Error>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, error: None }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    if cfg.format == Format::Csv && !matches!(cmd, Command::Frontier | Command::Example) {
        return Err(Error::Config(format!("csv output is only written by frontier and example, not {}", cmd.name())));
    }
    match cmd {
        Command::Region => region(cfg),
        Command::Frontier => frontier_cmd(cfg),
        Command::Simulate => simulate_cmd(cfg),
        Command::Duality => duality(cfg),
        Command::Example => example(cfg),
    }
}

/// The crib as configured; an identity map is the perfect crib.
fn cribbing(cfg: &RunConfig) -> Result<CribbingVariant> {
    Ok(match cfg.cribbing()? {
        CribbingVariant::DetFn(g) if g.is_identity() => CribbingVariant::Perfect,
        v => v,
    })
}

fn search(cfg: &RunConfig, setting: &Setting) -> Result<FrontierSearch> {
    FrontierSearch::new(&cfg.source_pmf()?, &cfg.distortion()?, setting, &cfg.search)
}

#[derive(Serialize)]
struct Target {
    origin: &'static str,
    joint: JointPmf<f64>,
    d1: f64,
    d2: f64,
}

/// The configured joint, or the minimum sum rate joint of the search for the configured setting.
fn target(cfg: &RunConfig, variant: &CribbingVariant) -> Result<Target> {
    let spec = cfg.distortion()?;
    if let Some(p) = &cfg.joint {
        let (d1, d2) = spec.expected(p)?;
        return Ok(Target { origin: "config", joint: p.clone(), d1, d2 });
    }
    let setting = Setting::Cribbing { mode: cfg.mode, variant: variant.clone() };
    let s = search(cfg, &setting)?;
    let best = s.min_sum_rate(None).ok_or_else(|| {
        Error::Infeasible(format!("no joint in the search family meets the budgets ({}, {})", cfg.d1, cfg.d2))
    })?;
    Ok(Target { origin: "search-min-sum-rate", joint: s.joint(&best.params)?, d1: best.d1, d2: best.d2 })
}

#[derive(Serialize)]
struct RegionResult {
    target: Target,
    region: RegionSpec<f64>,
    corners: Vec<CornerPoint<f64>>,
    no_cribbing: RegionSpec<f64>,
    conferencing: RegionSpec<f64>,
    conferencing_corners: Option<Vec<CornerPoint<f64>>>,
    /// I(X; Xh2): the common-rate bound without cribbing.
    i_x_xh2: f64,
}

fn region(cfg: &RunConfig) -> Result<Outcome> {
    let variant = cribbing(cfg)?;
    let t = target(cfg, &variant)?;
    let p = &t.joint;
    let result = RegionResult {
        region: sr_region(p, cfg.mode, &variant)?,
        corners: sr_corner_points(p, cfg.mode, &variant)?,
        no_cribbing: equitz_cover_region(p)?,
        conferencing: conferencing_region(p)?,
        conferencing_corners: cfg.r12.map(|r| conferencing_corner_points(p, Rate::Finite(r))).transpose()?,
        i_x_xh2: p.mutual_information(&[SOURCE], &[RECON2], &[])?,
        target: t,
    };
    Ok(Outcome::ok(output::json(Command::Region.name(), cfg, result)?))
}

#[derive(Serialize)]
struct FrontierResult<'a> {
    frontiers: Vec<&'a Frontier>,
    corners: Option<ExampleCorners>,
}

/// Renders three curves and corners; infeasible budgets still write the (empty) curves.
fn curves_outcome(cmd: Command, cfg: &RunConfig, curves: [&Frontier; 3], corners: Option<ExampleCorners>, extra: Option<serde_json::Value>) -> Result<Outcome> {
    let text = match cfg.format {
        Format::Csv => output::frontier_csv(cmd.name(), cfg, &curves, corners.as_ref())?,
        Format::Json => {
            let mut v = serde_json::to_value(FrontierResult { frontiers: curves.to_vec(), corners })
                .map_err(|e| Error::Numerical(e.to_string()))?;
            if let (Some(extra), Some(obj)) = (extra, v.as_object_mut()) {
                obj.insert("closed_form".into(), extra);
            }
            output::json(cmd.name(), cfg, v)?
        }
    };
    let error = curves
        .iter()
        .any(|f| f.is_empty())
        .then(|| Error::Infeasible(format!("budgets ({}, {}) admit no test channel", cfg.d1, cfg.d2)));
    Ok(Outcome { text, error })
}

fn corners_of(nc: &Frontier, sc: &Frontier, none: &Frontier) -> Option<ExampleCorners> {
    let a = nc.r1_at(0.0).finite().unwrap_or(f64::INFINITY);
    Some(ExampleCorners {
        a: (0.0, a),
        b_r0: sc.r0_min?,
        c_r0: none.r0_min?,
        d: (nc.sum_rate_min?, 0.0),
    })
}

fn frontier_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let variant = cribbing(cfg)?;
    let settings = [
        Setting::Cribbing { mode: CribbingMode::NonCausal, variant: variant.clone() },
        Setting::Cribbing { mode: CribbingMode::StrictlyCausal, variant },
        Setting::NoCribbing,
    ];
    let mut curves = Vec::with_capacity(3);
    for s in &settings {
        curves.push(search(cfg, s)?.frontier());
    }
    let corners = corners_of(&curves[0], &curves[1], &curves[2]);
    curves_outcome(Command::Frontier, cfg, [&curves[0], &curves[1], &curves[2]], corners, None)
}

fn example(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.source.len() != 2 || (cfg.source[0] - 0.5).abs() > 1e-12 {
        return Err(Error::Config("the example is defined for a uniform binary source".into()));
    }
    if cfg.d1_table.is_some() || cfg.d2_table.is_some() {
        return Err(Error::Config("the example uses Hamming distortion".into()));
    }
    let ex = bernoulli_example(cfg.d1, cfg.d2, cfg.search.r0_points)?;
    let (a, b, c, d) = closed_form_corners(cfg.d1, cfg.d2);
    let closed = serde_json::json!({ "a_r1": a, "b_r0": b, "c_r0": c, "d_r0": d });
    curves_outcome(
        Command::Example,
        cfg,
        [&ex.noncausal, &ex.strictly_causal, &ex.no_cribbing],
        Some(ex.corners.clone()),
        Some(closed),
    )
}

#[derive(Serialize)]
struct SimResult {
    target: Target,
    region: RegionSpec<f64>,
    report: SimReport,
}

fn simulate_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let s = &cfg.sim;
    if s.n > MAX_BLOCK_LEN {
        return Err(Error::Sizing(format!("block length {} exceeds the cap {MAX_BLOCK_LEN}", s.n)));
    }
    let variant = cribbing(cfg)?;
    let t = target(cfg, &variant)?;
    let region = sr_region(&t.joint, cfg.mode, &variant)?;
    let r0 = s.r0.unwrap_or(s.rate_scale * region.r0_lb);
    let r1 = s.r1.unwrap_or(s.rate_scale * (region.sum_rate_lb - region.r0_lb));
    let sim = SimConfig {
        n: s.n,
        blocks: cfg.blocks(),
        r0,
        r1,
        eps: s.eps,
        mode: cfg.mode,
        variant,
        target: t.joint.clone(),
        distortion: cfg.distortion()?,
        seed: cfg.seed,
        typicality: s.typicality,
        selection: s.selection,
        policy: s.policy,
    };
    let mut report = simulate(&sim, s.trials)?;
    if !s.records {
        report.records.clear();
    }
    Ok(Outcome::ok(output::json(Command::Simulate.name(), cfg, SimResult { target: t, region, report })?))
}

#[derive(Serialize)]
struct DualityResult {
    target: Target,
    mac_origin: &'static str,
    duality: DualityReport,
    conferencing: Option<DualityReport>,
    /// Split rates eliminated from the noncausal system of the MAC instance.
    projection: ProjectionReport,
    passed: bool,
}

fn mac_instance(cfg: &RunConfig, p: &JointPmf<f64>, crib: CribFunction) -> Result<(MacInstance<f64>, &'static str)> {
    match &cfg.mac {
        Some(m) => {
            let causal = m.causal.as_ref().map(|c| CausalStructure {
                aux_size: c.aux_size,
                aux_given_x1: c.aux_given_x1.clone(),
                f: c.f.clone(),
            });
            Ok((MacInstance::new(m.channel.clone(), m.output_size, m.input.clone(), crib, causal)?, "config"))
        }
        None => Ok((MacInstance::from_sr_joint(p, crib, cfg.mode)?, "derived")),
    }
}

fn duality(cfg: &RunConfig) -> Result<Outcome> {
    let variant = cribbing(cfg)?;
    let t = target(cfg, &variant)?;
    let crib = variant.function(t.joint.size_of(RECON1)?);
    let (mac, mac_origin) = mac_instance(cfg, &t.joint, crib)?;
    let report = duality_check(&t.joint, &mac, cfg.mode)?;
    let conferencing = cfg.r12.map(|r| duality_check_conferencing(&t.joint, &mac, Rate::Finite(r))).transpose()?;
    let projection = split_rate_projection(&mac)?.report();
    let passed = report.passed && conferencing.as_ref().is_none_or(|c| c.passed);
    let worst = report.max_diff.max(conferencing.as_ref().map_or(0.0, |c| c.max_diff));
    let result = DualityResult { target: t, mac_origin, duality: report, conferencing, projection, passed };
    let text = output::json(Command::Duality.name(), cfg, result)?;
    let error = (!passed).then(|| Error::DualityMismatch(format!("corner coordinates differ by up to {worst:.3e}")));
    Ok(Outcome { text, error })
}

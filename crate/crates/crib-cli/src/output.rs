//! JSON envelopes and frontier CSV.

use serde::Serialize;

use crib_core::region::{ExampleCorners, Frontier, Setting};
use crib_core::{Error, Result};

use crate::config::RunConfig;

pub const TOOL: &str = "crib";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a, R> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    result: R,
}

pub fn json<R: Serialize>(command: &'static str, cfg: &RunConfig, result: R) -> Result<String> {
    let env = Envelope { tool: TOOL, version: VERSION, command, config: cfg, result };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| Error::Numerical(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else if v > 0.0 {
        "inf".into()
    } else {
        "nan".into()
    }
}

fn curve_label(s: &Setting) -> &'static str {
    match s {
        Setting::Cribbing { mode, .. } => mode.label(),
        Setting::NoCribbing => "no-cribbing",
    }
}

/// Header comments (tool, version, effective config), `mode,D1,D2,R0,R1_min` rows
/// sorted by R0 within each curve, then the corners as rows labelled `corner-A` ..
/// `corner-D` in the same columns.
pub fn frontier_csv(command: &str, cfg: &RunConfig, curves: &[&Frontier], corners: Option<&ExampleCorners>) -> Result<String> {
    let config = serde_json::to_string(cfg).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut out = format!("# {TOOL} {VERSION} {command}\n# config {config}\nmode,D1,D2,R0,R1_min\n");
    for f in curves {
        for p in &f.points {
            out.push_str(&format!("{},{},{},{},{}\n", curve_label(&f.setting), num(f.d1), num(f.d2), num(p.r0), num(p.r1_min)));
        }
    }
    if let Some(c) = corners {
        let (d1, d2) = (num(cfg.d1), num(cfg.d2));
        for (label, r0, r1) in [
            ("A", c.a.0, c.a.1),
            ("B", c.b_r0, f64::INFINITY),
            ("C", c.c_r0, f64::INFINITY),
            ("D", c.d.0, c.d.1),
        ] {
            out.push_str(&format!("corner-{label},{d1},{d2},{},{}\n", num(r0), num(r1)));
        }
    }
    Ok(out)
}

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, ModeArg, RunConfig, VariantKind};

#[derive(Parser)]
#[command(name = "crib", version, about = "Successive refinement with cribbing decoders: regions, frontiers, duality and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Rate region of one joint (or of the minimum sum rate joint of the search).
    Region,
    /// Optimal (R0, R1) tradeoff curves with and without cribbing, and corners A-D.
    Frontier,
    /// Monte Carlo run of the binning schemes.
    Simulate,
    /// Corner point comparison between the source coding and MAC regions.
    Duality,
    /// The binary example at (D1, D2) = (0.05, 0.1) from its one-parameter family.
    Example,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Region => "region",
            Command::Frontier => "frontier",
            Command::Simulate => "simulate",
            Command::Duality => "duality",
            Command::Example => "example",
        }
    }
}

#[derive(Args)]
struct Flags {
    /// JSON run configuration; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    grid_step: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    blocks: Option<usize>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantKind>,
    #[arg(long, global = true)]
    d1: Option<f64>,
    #[arg(long, global = true)]
    d2: Option<f64>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_SIZING: u8 = 4;
const EXIT_DUALITY: u8 = 5;

fn load(flags: &Flags) -> Result<RunConfig, String> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = flags.format {
        cfg.format = v;
    }
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(v) = flags.grid_step {
        cfg.search.grid_step = v;
    }
    if let Some(v) = flags.trials {
        cfg.sim.trials = v;
    }
    if let Some(v) = flags.n {
        cfg.sim.n = v;
    }
    if let Some(v) = flags.blocks {
        cfg.sim.blocks = Some(v);
    }
    if let Some(v) = flags.eps {
        cfg.sim.eps = v;
    }
    if let Some(v) = flags.mode {
        cfg.mode = v.into();
    }
    if let Some(v) = flags.variant {
        cfg.variant = v;
    }
    if let Some(v) = flags.d1 {
        cfg.d1 = v;
    }
    if let Some(v) = flags.d2 {
        cfg.d2 = v;
    }
    cfg.sim.blocks = Some(cfg.blocks());
    Ok(cfg)
}

fn exit_code(e: &crib_core::Error) -> u8 {
    use crib_core::Error::*;
    match e {
        Config(_) | Usage(_) | UnknownVariable(_) | InvalidDistribution(_) | Structural(_) => EXIT_CONFIG,
        Infeasible(_) => EXIT_INFEASIBLE,
        Sizing(_) => EXIT_SIZING,
        DualityMismatch(_) => EXIT_DUALITY,
        Numerical(_) => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli.flags) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let outcome = match commands::run(cli.command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &cli.flags.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_FAILURE);
    }
    match outcome.error {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        None => ExitCode::SUCCESS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crib_core::Error;

    #[test]
    fn exit_codes_are_disjoint() {
        let cases = [
            (Error::Config(String::new()), 2),
            (Error::Usage(String::new()), 2),
            (Error::Infeasible(String::new()), 3),
            (Error::Sizing(String::new()), 4),
            (Error::DualityMismatch(String::new()), 5),
            (Error::Numerical(String::new()), 1),
        ];
        for (e, code) in cases {
            assert_eq!(exit_code(&e), code, "{e}");
        }
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from(["crib", "simulate", "--n", "9", "--mode", "causal", "--seed", "4"]).unwrap();
        let cfg = load(&cli.flags).unwrap();
        assert_eq!((cfg.sim.n, cfg.seed, cfg.sim.blocks), (9, 4, Some(10)));
        assert_eq!(cfg.mode, crib_core::region::CribbingMode::Causal);
    }
}

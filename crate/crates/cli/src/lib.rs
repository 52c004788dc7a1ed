//! Command-line experiment runner for the w-field excited-state method.
//!
//! Three subcommands share one TOML config (see [`config`]):
//! - `spectrum`: optimize at each U and extract every eigenenergy of the
//!   requested sectors by tilde projection;
//! - `gaps`: neutral and fundamental gaps through finite differences in the
//!   weights;
//! - `validate`: the invariant suite, reported as pass/fail JSON.

pub mod config;
pub mod output;
pub mod run;
pub mod validate;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;

/// Exit status when strict mode or the validation suite finds a problem.
pub const EXIT_FLAGGED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "wfield", version, about = "Excited states from a purified ensemble")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment config (TOML). Defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides `experiment.seed`.
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Worker threads for the U grid (0 = one per core).
    #[arg(long, global = true, value_name = "INT", default_value_t = 0)]
    pub jobs: usize,
    /// Exit nonzero when any optimization is unconverged or any row failed.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Eigenenergies by tilde projection, compared with exact diagonalization.
    Spectrum,
    /// Neutral and fundamental gaps by finite differences.
    Gaps,
    /// Run the invariant suite.
    Validate,
}

impl Cli {
    /// Loads the config file and applies the flag overrides.
    pub fn resolve_config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.experiment.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one subcommand; returns `true` when the result is flagged.
pub fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = cli.resolve_config()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;
    let dir = cfg.output.dir.clone();
    pool.install(|| match cli.command {
        Command::Spectrum | Command::Gaps => {
            let (kind, report) = if cli.command == Command::Spectrum {
                ("spectrum", run::run_spectrum(&cfg)?)
            } else {
                ("gaps", run::run_gaps(&cfg)?)
            };
            let (csv, json) = output::write_report(&dir, kind, &report)?;
            log::info!("wrote {} and {}", csv.display(), json.display());
            for p in &report.points {
                for r in &p.rows {
                    if let Some(err) = &r.error {
                        log::warn!("U = {}, N = {}, {} {}: {err}", p.u, r.particles, r.method, r.pattern);
                    }
                }
            }
            Ok(cli.strict && report.flagged())
        }
        Command::Validate => {
            let report = validate::run_validate(&cfg)?;
            let name = format!("{}_validate.json", cfg.experiment.id);
            let path = output::write_json(&dir, &name, &report)?;
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!("{status} {:<28} measured {:.3e} threshold {:.3e}", c.name, c.measured, c.threshold);
            }
            log::info!("wrote {}", path.display());
            Ok(!report.passed)
        }
    })
}

//! Command-line frontend for `wr0-core`.
//!
//! Exit codes: 0 on success, 2 when the system has no WR₀ realization,
//! 1 on input, output or numerical errors.

pub mod input;
pub mod output;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wr0_core::cone::{extreme_rays, rays_cover_all, supports_partition};
use wr0_core::model::PolySystem;
use wr0_core::sim::{certify_with, CertifyOptions, IntegrateOptions};
use wr0_core::steady::steady_states;
use wr0_core::wr0::{find_wr0, Realization};

use crate::input::load_system;
use crate::output::{
    realization_dot, realization_text, trajectory_csv, CheckJson, FailureJson, RealizationJson,
    ReportJson, SteadyJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_REALIZATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "wr0",
    version,
    about = "Weakly reversible deficiency-zero realizations of polynomial systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report the cone generators of ker W and whether positive steady states can exist.
    Check {
        /// Input file (polynomial text or JSON), or `-` for stdin.
        input: PathBuf,
    },
    /// Construct the WR₀ realization, or explain why none exists.
    Realize { input: PathBuf },
    /// Describe the positive steady states as exp(z* + ker D).
    SteadyStates { input: PathBuf },
    /// Integrate from x0 and certify Lyapunov descent, conservation and convergence.
    Simulate {
        input: PathBuf,
        /// Comma-separated positive initial state.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        x0: Vec<f64>,
        #[arg(long, default_value_t = 20.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
        /// Write the trajectory as CSV (`t,x1,…,xn,L`) to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Runs a parsed command line, writing results to `out` and diagnostics to
/// `err`, and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn load(path: &PathBuf, err: &mut dyn Write) -> anyhow::Result<PolySystem> {
    let text = read_input(path)?;
    let loaded = load_system(&text)?;
    for v in &loaded.dropped {
        writeln!(err, "warning: monomial {v} cancels and was dropped")?;
    }
    Ok(loaded.system)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    let format = cli.format;
    if format == Format::Dot && !matches!(cli.command, Command::Realize { .. }) {
        bail!("--format dot is only available for realize");
    }
    match &cli.command {
        Command::Check { input } => {
            let system = load(input, err)?;
            let rays = extreme_rays(&system.net_matrix());
            let partition = supports_partition(&rays).map(|p| p.blocks().to_vec());
            let report = CheckJson::new(&system, &rays, rays_cover_all(&rays), partition);
            match format {
                Format::Text => out.write_all(report.text().as_bytes())?,
                _ => out.write_all(json(&report)?.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Realize { input } => {
            let system = load(input, err)?;
            match realize(&system, format, out)? {
                Some(_) => Ok(EXIT_OK),
                None => Ok(EXIT_NO_REALIZATION),
            }
        }
        Command::SteadyStates { input } => {
            let system = load(input, err)?;
            let Some(r) = realize_or_explain(&system, err)? else {
                return Ok(EXIT_NO_REALIZATION);
            };
            let param = steady_states(&r)?;
            let report = SteadyJson::new(&param);
            match format {
                Format::Text => out.write_all(report.text().as_bytes())?,
                _ => out.write_all(json(&report)?.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Simulate {
            input,
            x0,
            t_end,
            rel_tol,
            csv,
        } => {
            let system = load(input, err)?;
            let Some(r) = realize_or_explain(&system, err)? else {
                return Ok(EXIT_NO_REALIZATION);
            };
            let options = CertifyOptions {
                integrate: IntegrateOptions {
                    rel_tol: *rel_tol,
                    ..IntegrateOptions::default()
                },
                ..CertifyOptions::default()
            };
            let cert = certify_with(&system, &r, x0, *t_end, &options)?;
            if let Some(path) = csv {
                fs::write(path, trajectory_csv(&cert))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let report = ReportJson::new(&cert);
            match format {
                Format::Text => out.write_all(report.text().as_bytes())?,
                _ => out.write_all(json(&report)?.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

/// Prints the realization, or the failure report, in `format`.
fn realize(
    system: &PolySystem,
    format: Format,
    out: &mut dyn Write,
) -> anyhow::Result<Option<Realization>> {
    match find_wr0(system) {
        Ok(r) => {
            let rendered = match format {
                Format::Json => json(&RealizationJson::new(&r))?,
                Format::Dot => realization_dot(&r),
                Format::Text => realization_text(&r),
            };
            out.write_all(rendered.as_bytes())?;
            Ok(Some(r))
        }
        Err(reason) => {
            let failure = FailureJson::new(system, &reason, &extreme_rays(&system.net_matrix()));
            let rendered = match format {
                Format::Text | Format::Dot => failure.text(system),
                Format::Json => json(&failure)?,
            };
            out.write_all(rendered.as_bytes())?;
            Ok(None)
        }
    }
}

fn realize_or_explain(
    system: &PolySystem,
    err: &mut dyn Write,
) -> anyhow::Result<Option<Realization>> {
    match find_wr0(system) {
        Ok(r) => Ok(Some(r)),
        Err(reason) => {
            writeln!(err, "no WR0 realization: {reason}")?;
            Ok(None)
        }
    }
}

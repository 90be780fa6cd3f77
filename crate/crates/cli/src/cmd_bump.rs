use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Subcommand;
use rayon::prelude::*;

use extgevrey::associated::AssocParams;
use extgevrey::paleywiener::{make_bump, verify_forward, BumpSpec};

use crate::output::{emit, Cell, Table};
use crate::{parse, Ctx};

#[derive(Subcommand)]
pub enum BumpCmd {
    /// Build the convolution-factor lengths and write the spec as JSON
    Make {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        h: f64,
        /// Number of convolution factors
        #[arg(long)]
        n: u32,
    },
    /// Exact spectrum values with the telescoped envelope
    Spectrum {
        /// Bump spec JSON written by `bump make`
        #[arg(long)]
        spec: PathBuf,
        /// Single frequency (accepts eN shorthand)
        #[arg(long, conflicts_with_all = ["xi_max", "samples"], allow_hyphen_values = true)]
        xi: Option<String>,
        /// Top of the geometric frequency grid
        #[arg(long)]
        xi_max: Option<String>,
        /// Grid size
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Exit 0 iff the spectrum stays under the telescoped envelope
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "1e6")]
        xi_max: String,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
}

fn load_spec(path: &PathBuf) -> Result<BumpSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read bump spec {}", path.display()))?;
    let spec: BumpSpec = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse bump spec {}", path.display()))?;
    // revalidate: the file may have been edited
    AssocParams::new(spec.tau, spec.sigma, spec.h)?;
    if spec.lengths.len() != spec.n as usize || !spec.lengths.iter().all(|a| *a > 0.0) {
        anyhow::bail!("bump spec has inconsistent lengths");
    }
    Ok(spec)
}

fn spectrum_table(spec: &BumpSpec, xi: &[f64]) -> Table {
    let report = verify_forward(spec, xi);
    let mut table = Table::new(vec!["xi", "abs_spec", "envelope", "pass"]);
    table.rows = report
        .rows
        .par_iter()
        .map(|row| {
            vec![
                Cell::F(row.xi),
                Cell::F(row.abs_spec),
                Cell::F(row.envelope),
                Cell::B(row.pass),
            ]
        })
        .collect();
    table
}

pub fn run(cmd: BumpCmd, ctx: &Ctx) -> Result<u8> {
    match cmd {
        BumpCmd::Make { tau, sigma, h, n } => {
            let spec = make_bump(&AssocParams::new(tau, sigma, h)?, n)?;
            let json = serde_json::to_string_pretty(&spec)?;
            match &ctx.out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            Ok(0)
        }
        BumpCmd::Spectrum {
            spec,
            xi,
            xi_max,
            samples,
        } => {
            let spec = load_spec(&spec)?;
            let grid = match (&xi, &xi_max) {
                (Some(x), None) => vec![parse::scalar(x)?],
                (None, Some(top)) => log_grid(1.0, parse::scalar(top)?, samples),
                _ => anyhow::bail!("give exactly one of --xi or --xi-max"),
            };
            let table = spectrum_table(&spec, &grid);
            emit(&table, ctx.format, ctx.out.as_deref())?;
            Ok(0)
        }
        BumpCmd::Verify {
            spec,
            xi_max,
            samples,
        } => {
            let spec = load_spec(&spec)?;
            let grid = log_grid(1.0, parse::scalar(&xi_max)?, samples);
            let report = verify_forward(&spec, &grid);
            let table = spectrum_table(&spec, &grid);
            emit(&table, ctx.format, ctx.out.as_deref())?;
            Ok(u8::from(!report.all_pass))
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}

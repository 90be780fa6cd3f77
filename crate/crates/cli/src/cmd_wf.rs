use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Subcommand;

use extgevrey::associated::AssocParams;
use extgevrey::microlocal::{classify, CutoffSpec, DecayReport, GridConfig, SignalSpec};
use extgevrey::paleywiener::make_bump;

use crate::output::{emit, Cell, Table};
use crate::{parse, Ctx};

#[derive(Subcommand)]
pub enum WfCmd {
    /// Localize a signal at a point and fit the decay envelope both ways
    Classify {
        /// One of delta, heaviside, gaussian, bump (or use --signal-json)
        #[arg(long, conflicts_with = "signal_json")]
        signal: Option<String>,
        /// Full signal description as JSON
        #[arg(long)]
        signal_json: Option<PathBuf>,
        /// Point the cutoff is centered on
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        /// Location of the signal feature (spike, jump or center)
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        position: f64,
        /// Gaussian width
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        /// Weight of a bump signal
        #[arg(long, default_value_t = 1.0)]
        bump_h: f64,
        /// Factors of a bump signal
        #[arg(long, default_value_t = 8)]
        bump_n: u32,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        sigma: f64,
        /// Cutoff half-width (defaults per signal kind)
        #[arg(long)]
        cutoff_r: Option<f64>,
        /// Mollifier shrink factor
        #[arg(long)]
        cutoff_scale: Option<f64>,
        #[arg(long)]
        cutoff_n: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        cutoff_h: f64,
        /// Top of the frequency windows (accepts eN shorthand)
        #[arg(long)]
        xi_max: Option<String>,
        /// Print one direction only: +, - or both
        #[arg(long, default_value = "both", allow_hyphen_values = true)]
        direction: String,
    },
}

pub fn run(cmd: WfCmd, ctx: &Ctx) -> Result<u8> {
    let WfCmd::Classify {
        signal,
        signal_json,
        x0,
        position,
        width,
        amplitude,
        bump_h,
        bump_n,
        tau,
        sigma,
        cutoff_r,
        cutoff_scale,
        cutoff_n,
        cutoff_h,
        xi_max,
        direction,
    } = cmd;

    let spec = match (&signal, &signal_json) {
        (Some(kind), None) => match kind.as_str() {
            "delta" => SignalSpec::Delta {
                position,
                amplitude,
            },
            "heaviside" => SignalSpec::Heaviside {
                jump: position,
                amplitude,
            },
            "gaussian" => SignalSpec::Gaussian {
                center: position,
                width,
                amplitude,
            },
            "bump" => SignalSpec::Bump {
                spec: make_bump(&AssocParams::new(tau, sigma, bump_h)?, bump_n)?,
                center: position,
                amplitude,
            },
            other => anyhow::bail!("unknown signal kind `{other}`"),
        },
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read signal {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("cannot parse signal {}", path.display()))?
        }
        _ => anyhow::bail!("give exactly one of --signal or --signal-json"),
    };

    // sampled spectra are noise-limited; exact ones support wide windows
    let sampled = matches!(
        spec,
        SignalSpec::Gaussian { .. } | SignalSpec::Samples { .. }
    );
    let mut cfg = if sampled {
        let top = match &spec {
            SignalSpec::Gaussian { width, .. } => 10.5 / width,
            _ => 10.5,
        };
        GridConfig::sampled(top)
    } else {
        GridConfig::wide()
    };
    if let Some(top) = xi_max {
        cfg.xi_max = parse::scalar(&top)?;
        if cfg.xi_max <= cfg.xi_split {
            cfg.xi_split = (cfg.xi_min * cfg.xi_max).sqrt();
        }
    }

    let cutoff = CutoffSpec {
        half_width: cutoff_r.unwrap_or(if sampled { 6.0 } else { 0.8 }),
        scale: cutoff_scale.unwrap_or(if sampled { 0.5 } else { 0.25 }),
        n: cutoff_n.unwrap_or(if sampled { 8 } else { 10 }),
        h: cutoff_h,
    };

    let (plus, minus) = classify(&spec, x0, tau, sigma, &cutoff, &cfg)?;
    let mut table = Table::new(vec![
        "direction",
        "h_star",
        "ln_A_star",
        "max_defect",
        "verdict",
    ]);
    let mut push = |r: &DecayReport| {
        table.push(vec![
            Cell::S(r.direction.to_string()),
            r.h_star.map_or(Cell::Empty, Cell::F),
            Cell::F(r.ln_a_star),
            Cell::F(r.max_defect),
            Cell::S(r.verdict.to_string()),
        ]);
    };
    match direction.as_str() {
        "+" => push(&plus),
        "-" => push(&minus),
        "both" => {
            push(&plus);
            push(&minus);
        }
        other => anyhow::bail!("direction must be +, - or both, got `{other}`"),
    }
    emit(&table, ctx.format, ctx.out.as_deref())?;
    Ok(0)
}

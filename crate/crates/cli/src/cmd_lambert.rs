use anyhow::Result;
use clap::Args;

use extgevrey::lambert::{lambert_w0, w0_bracket};

use crate::output::{emit, Cell, Table};
use crate::{parse, Ctx};

#[derive(Args)]
pub struct LambertArgs {
    /// Single evaluation point (accepts eN shorthand)
    #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
    x: Option<String>,

    /// Geometric grid lo:hi:n
    #[arg(long)]
    grid: Option<String>,
}

pub fn run(args: LambertArgs, ctx: &Ctx) -> Result<u8> {
    let xs = match (&args.x, &args.grid) {
        (Some(x), None) => vec![parse::scalar(x)?],
        (None, Some(g)) => parse::grid(g)?,
        _ => anyhow::bail!("give exactly one of --x or --grid"),
    };
    let mut table = Table::new(vec![
        "x",
        "w",
        "residual",
        "iterations",
        "bracket_lower",
        "bracket_upper",
    ]);
    for x in xs {
        let w = lambert_w0(x)?;
        let (lo, hi) = match w0_bracket(x) {
            Ok((lo, hi)) => (Cell::F(lo), Cell::F(hi)),
            Err(_) => (Cell::Empty, Cell::Empty),
        };
        table.push(vec![
            Cell::F(x),
            Cell::F(w.value),
            Cell::F(w.residual),
            Cell::U(u64::from(w.iterations)),
            lo,
            hi,
        ]);
    }
    emit(&table, ctx.format, ctx.out.as_deref())?;
    Ok(0)
}

use anyhow::Result;
use clap::Subcommand;

use extgevrey::sequence::{
    check_log_convexity, check_ratio_bound, fit_m2bar_constant, fit_stability_constant,
    GevreyParams,
};

use crate::output::{emit, Cell, Table};
use crate::Ctx;

#[derive(Subcommand)]
pub enum SeqCmd {
    /// Run the sequence condition checkers and constant fits
    Check {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        sigma: f64,
        /// Largest index exercised
        #[arg(long, default_value_t = 500)]
        pmax: u32,
    },
}

pub fn run(cmd: SeqCmd, ctx: &Ctx) -> Result<u8> {
    let SeqCmd::Check { tau, sigma, pmax } = cmd;
    let g = GevreyParams::new(tau, sigma)?;
    let mut table = Table::new(vec!["check", "status", "value", "p_at", "q_at"]);
    let mut failed = false;

    let convexity = check_log_convexity(&g, pmax)?;
    failed |= !convexity.is_empty();
    table.push(vec![
        Cell::S("log_convexity".into()),
        Cell::S(if convexity.is_empty() { "ok" } else { "violated" }.into()),
        Cell::U(convexity.len() as u64),
        Cell::Empty,
        Cell::Empty,
    ]);

    let ratio = check_ratio_bound(&g, pmax)?;
    failed |= !ratio.is_empty();
    table.push(vec![
        Cell::S("ratio_bound".into()),
        Cell::S(if ratio.is_empty() { "ok" } else { "violated" }.into()),
        Cell::U(ratio.len() as u64),
        Cell::Empty,
        Cell::Empty,
    ]);

    let m2 = fit_m2bar_constant(&g, pmax.min(300))?;
    failed |= !m2.ln_c.is_finite();
    table.push(vec![
        Cell::S("splitting_fit".into()),
        Cell::S(if m2.ln_c.is_finite() { "ok" } else { "violated" }.into()),
        Cell::F(m2.ln_c),
        Cell::U(u64::from(m2.p_at)),
        Cell::U(u64::from(m2.q_at)),
    ]);

    for q in 1..=4 {
        let fit = fit_stability_constant(q, &g, pmax)?;
        failed |= !fit.ln_c.is_finite();
        table.push(vec![
            Cell::S(format!("stability_fit_q{q}")),
            Cell::S(if fit.ln_c.is_finite() { "ok" } else { "violated" }.into()),
            Cell::F(fit.ln_c),
            Cell::U(u64::from(fit.p_at)),
            Cell::Empty,
        ]);
    }

    emit(&table, ctx.format, ctx.out.as_deref())?;
    Ok(u8::from(failed))
}

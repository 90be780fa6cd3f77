//! Scalar and grid parsing. A leading `e` means a natural-log scale value:
//! `e10` is exp(10), the natural unit for the frequency variables here.

use anyhow::{bail, Context, Result};

pub fn scalar(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('e') {
        if let Ok(exp) = rest.parse::<f64>() {
            return Ok(exp.exp());
        }
    }
    s.parse::<f64>()
        .with_context(|| format!("cannot parse `{s}` as a number (use 2.5, 1e3 or e10)"))
}

/// `lo:hi:n` as `n` geometrically spaced points, requiring `0 < lo <= hi`.
pub fn grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("grid must look like lo:hi:n, got `{s}`");
    }
    let lo = scalar(parts[0])?;
    let hi = scalar(parts[1])?;
    let n: usize = parts[2]
        .parse()
        .with_context(|| format!("bad point count in `{s}`"))?;
    if !(lo > 0.0 && hi >= lo) {
        bail!("grid needs 0 < lo <= hi, got {lo}:{hi}");
    }
    if n < 2 {
        bail!("grid needs at least 2 points");
    }
    Ok((0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect())
}

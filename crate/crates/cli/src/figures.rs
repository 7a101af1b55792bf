//! Capacity-vs-signal-to-noise curves for the one-quadrature family: one row
//! per grid point with the unassisted capacity, the assisted capacity, and
//! their ratio, written as CSV or JSON.

use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use gausscq::{gain_ratio, one_quadrature_capacities};

use crate::config::{usage, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveRow {
    pub r: f64,
    #[serde(rename = "C_nats")]
    pub c_nats: f64,
    #[serde(rename = "Cea_nats")]
    pub cea_nats: f64,
    pub ratio: f64,
}

/// Evaluates the curves on the configured grid, re-checking the row
/// invariants before anything is emitted: C_ea ≥ C ≥ 0 and the ratio column
/// consistent with the recomputed quotient to 1e-12.
pub fn compute_rows(cfg: &RunConfig) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::with_capacity(cfg.points);
    for r in cfg.r_grid() {
        let (c, cea) = one_quadrature_capacities(1.0, r)?;
        let ratio = gain_ratio(r)?;
        if !(c >= 0.0 && cea >= c) {
            bail!("row invariant violated at r = {r:e}: C = {c:e}, C_ea = {cea:e}");
        }
        let drift = (ratio * c - cea).abs();
        if drift > 1e-12 * cea.max(1.0) {
            bail!("ratio at r = {r:e} disagrees with C_ea/C by {drift:e}");
        }
        rows.push(CurveRow {
            r,
            c_nats: c,
            cea_nats: cea,
            ratio,
        });
    }
    Ok(rows)
}

/// Renders rows with 12 significant digits per field — enough to round-trip
/// the curve shape while keeping diffs stable across platforms.
pub fn csv_text(rows: &[CurveRow]) -> String {
    let mut text = String::from("r,C_nats,Cea_nats,ratio\n");
    for row in rows {
        text.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e}\n",
            row.r, row.c_nats, row.cea_nats, row.ratio
        ));
    }
    text
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let rows = compute_rows(cfg)?;
    let (payload, default_name) = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => (csv_text(&rows), "figures.csv"),
        OutputFormat::Json => (
            serde_json::to_string_pretty(&rows).context("serializing curve rows")? + "\n",
            "figures.json",
        ),
        OutputFormat::Text => {
            return Err(usage(
                "figures emits csv or json; --format text is for reports",
            ))
        }
    };
    let path = cfg.out_path(default_name);
    fs::write(&path, payload).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

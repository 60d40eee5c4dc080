//! One-row-per-run CSV summaries written by parameter sweeps.

use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub n_max: u64,
    /// `ok`, `failed`, `seed-infeasible` or `error`.
    pub status: String,
    pub failed_at: Option<u64>,
    pub placed: u64,
    pub conservation_defect: Option<f64>,
    pub max_height: Option<f64>,
    /// Seeded residual height.
    pub f: Option<f64>,
    /// Height budget at the first unseeded square.
    pub g: Option<f64>,
    pub verified: bool,
    pub monitors_clean: bool,
    pub in_proven_range: bool,
}

pub fn write_summary_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

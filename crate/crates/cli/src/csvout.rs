//! Trace serialization. The column set and float formatting are stable so
//! downstream tooling can diff runs byte-for-byte.

use std::io::Write;

use proxsarah_core::metrics::RunTrace;
use proxsarah_core::Result;

pub const CSV_HEADER: &str =
    "epoch_fraction,objective,rel_residual,grad_map_norm_sq,train_acc,test_acc,wall_ms";

/// 17 significant digits, enough to round-trip any f64.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

pub fn write_csv<W: Write>(trace: &RunTrace, out: &mut W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &trace.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(row.epoch_fraction),
            fmt(row.objective),
            fmt(row.rel_residual),
            fmt(row.grad_map_norm_sq),
            fmt_opt(row.train_acc),
            fmt_opt(row.test_acc),
            row.wall_ms,
        )?;
    }
    Ok(())
}

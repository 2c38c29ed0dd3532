//! CSV and JSON writers for sweep output.

use std::io::Write;

use serde_json::{json, Value};

use crate::error::Result;
use crate::experiments::{ReportRow, Sweep, TrialRecord};

/// Version of the CSV and JSON layouts written below.
pub const SCHEMA_VERSION: u32 = 1;

pub const TRIAL_COLUMNS: [&str; 11] = [
    "n", "p_num", "p_den", "p_float", "trial", "card", "S", "D", "Sc", "Dc", "ratio",
];

/// Writes trial records as CSV, preceded by `#` comment lines carrying the
/// schema version and the resolved configuration. `X_k`/`Y_k` columns are
/// appended when present.
pub fn write_trials_csv<W: Write>(
    mut out: W,
    records: &[TrialRecord],
    kmax: u32,
    config: &Value,
) -> Result<()> {
    writeln!(out, "# modsetlab trials schema v{SCHEMA_VERSION}")?;
    writeln!(out, "# config: {config}")?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = TRIAL_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((1..=kmax).map(|k| format!("X{k}")));
    header.extend((1..=kmax).map(|k| format!("Y{k}")));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.n.to_string(),
            r.p_num.clone(),
            r.p_den.clone(),
            r.p_float.to_string(),
            r.trial.to_string(),
            r.card.to_string(),
            r.s.to_string(),
            r.d.to_string(),
            r.sc.to_string(),
            r.dc.to_string(),
            r.ratio.map(|v| v.to_string()).unwrap_or_default(),
        ];
        for col in [&r.xk, &r.yk] {
            row.extend(
                (0..kmax as usize).map(|k| col.get(k).map(|v| v.to_string()).unwrap_or_default()),
            );
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// The sweep aggregate document.
pub fn sweep_json(sweep: &Sweep, report: &[ReportRow], config: &Value) -> Value {
    json!({
        "schema": format!("modsetlab.sweep.v{SCHEMA_VERSION}"),
        "config": config,
        "spec": sweep.spec,
        "aggregates": sweep.aggregates,
        "report": report,
    })
}

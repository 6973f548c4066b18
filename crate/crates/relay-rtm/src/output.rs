//! CSV and plain-text summaries of sweep results.

use std::cmp::Ordering;
use std::io::Write;

use crate::montecarlo::CurvePoint;

pub const CSV_HEADER: [&str; 6] = [
    "sweep_db",
    "rtm",
    "metric",
    "mean_bits",
    "stderr_bits",
    "trials",
];

fn row_order(a: &CurvePoint, b: &CurvePoint) -> Ordering {
    a.sweep_value_db
        .total_cmp(&b.sweep_value_db)
        .then_with(|| a.rtm_kind.name().cmp(b.rtm_kind.name()))
        .then_with(|| a.metric.name().cmp(b.metric.name()))
}

pub fn sorted(points: &[CurvePoint]) -> Vec<CurvePoint> {
    let mut v = points.to_vec();
    v.sort_by(row_order);
    v
}

/// Writes one row per point, sorted by (sweep_db, rtm, metric). Floats use
/// Rust's shortest round-trip formatting, so the file is locale independent
/// and parses back to the exact values.
pub fn write_csv<W: Write>(points: &[CurvePoint], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in sorted(points) {
        w.write_record([
            p.sweep_value_db.to_string(),
            p.rtm_kind.name().to_string(),
            p.metric.name().to_string(),
            p.mean_bits.to_string(),
            p.stderr_bits.to_string(),
            p.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(points: &[CurvePoint]) -> String {
    let mut buf = Vec::new();
    write_csv(points, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// Fixed-width table: one line per sweep point, one column per
/// (rtm, metric) pair, entries `mean ± stderr`.
pub fn summary_table(points: &[CurvePoint], axis: &str) -> String {
    let rows = sorted(points);
    let mut columns: Vec<(&'static str, &'static str)> = rows
        .iter()
        .map(|p| (p.rtm_kind.name(), p.metric.name()))
        .collect();
    columns.sort();
    columns.dedup();

    let mut s = format!("{:>10}", format!("{axis} [dB]"));
    for (rtm, metric) in &columns {
        s.push_str(&format!(" {:>20}", format!("{rtm}/{metric}")));
    }
    s.push('\n');

    let mut i = 0;
    while i < rows.len() {
        let db = rows[i].sweep_value_db;
        s.push_str(&format!("{db:>10.2}"));
        for (rtm, metric) in &columns {
            let cell = rows[i..]
                .iter()
                .take_while(|p| p.sweep_value_db == db)
                .find(|p| p.rtm_kind.name() == *rtm && p.metric.name() == *metric);
            match cell {
                Some(p) => s.push_str(&format!(
                    " {:>20}",
                    format!("{:.4} ± {:.4}", p.mean_bits, p.stderr_bits)
                )),
                None => s.push_str(&format!(" {:>20}", "-")),
            }
        }
        s.push('\n');
        while i < rows.len() && rows[i].sweep_value_db == db {
            i += 1;
        }
    }
    s
}

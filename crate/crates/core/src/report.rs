//! Report rendering: aligned text, CSV and JSON.
//!
//! Times are shown in milliseconds with three significant digits (values of
//! 100 ms and above keep all integer digits, e.g. `1267 ms`, `0.856 ms`).
//! Percentages get one decimal.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cct::CallGraphEdge;
use crate::components::ComponentUtilizationRow;
use crate::metrics::{HotSpotRow, TotalTimeRow};
use crate::snapshot::{DiffStatus, SnapshotDiffRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected text|csv|json)")),
        }
    }
}

const NS_PER_MS: u128 = 1_000_000;

fn pow10(e: u32) -> u128 {
    10u128.pow(e)
}

/// Compares `num/den` with `10^k`.
fn cmp_pow10(num: u128, den: u128, k: i32) -> std::cmp::Ordering {
    if k >= 0 {
        num.cmp(&(den * pow10(k as u32)))
    } else {
        (num * pow10((-k) as u32)).cmp(&den)
    }
}

fn div_round_half_up(num: u128, den: u128) -> u128 {
    (2 * num + den) / (2 * den)
}

fn render_fixed(scaled: u128, decimals: u32) -> String {
    if decimals == 0 {
        return scaled.to_string();
    }
    let unit = pow10(decimals);
    let frac = format!("{:0width$}", scaled % unit, width = decimals as usize);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        (scaled / unit).to_string()
    } else {
        format!("{}.{}", scaled / unit, frac)
    }
}

/// Millisecond rendering of an exact nanosecond quantity, without the unit.
pub fn ms_digits(ns: Ratio<u64>) -> String {
    let num = *ns.numer() as u128;
    let den = *ns.denom() as u128 * NS_PER_MS;
    if num == 0 {
        return "0".to_string();
    }
    // Magnitude k with 10^k <= value < 10^(k+1).
    let mut k: i32 = 0;
    while cmp_pow10(num, den, k + 1) != std::cmp::Ordering::Less {
        k += 1;
    }
    while cmp_pow10(num, den, k) == std::cmp::Ordering::Less {
        k -= 1;
    }
    let mut decimals = (2 - k).max(0) as u32;
    loop {
        let scaled = div_round_half_up(num * pow10(decimals), den);
        // Rounding can carry into a new digit (9.996 -> 10.00).
        if decimals > 0 && scaled >= pow10(3) {
            decimals -= 1;
            continue;
        }
        return render_fixed(scaled, decimals);
    }
}

pub fn format_ms(ns: Ratio<u64>) -> String {
    format!("{} ms", ms_digits(ns))
}

pub fn format_ms_int(ns: u64) -> String {
    format_ms(Ratio::from_integer(ns))
}

pub fn format_pct(fraction: Ratio<u64>) -> String {
    let num = *fraction.numer() as u128 * 1000;
    let den = *fraction.denom() as u128;
    format!("{}%", render_fixed(div_round_half_up(num, den), 1))
}

pub fn format_ratio(r: Ratio<u128>) -> String {
    let scaled = div_round_half_up(*r.numer() * 100, *r.denom());
    format!("{}.{:02}", scaled / 100, scaled % 100)
}

fn to_f64<T: ToPrimitive>(r: &Ratio<T>) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Text table; the first `text_cols` columns are left-aligned, the rest
/// right-aligned.
fn aligned(header: &[&str], rows: &[Vec<String>], text_cols: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut text = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                text.push_str("  ");
            }
            if i < text_cols {
                let _ = write!(text, "{cell:<w$}");
            } else {
                let _ = write!(text, "{cell:>w$}");
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct HotSpotJson<'a> {
    pub method: &'a str,
    pub self_time_ns: u64,
    pub self_time_ms: f64,
    pub self_pct: f64,
    pub invocations: u64,
    pub avg_per_invocation_ns: f64,
}

pub fn hotspot_json(rows: &[HotSpotRow]) -> Vec<HotSpotJson<'_>> {
    rows.iter()
        .map(|r| HotSpotJson {
            method: r.method.as_str(),
            self_time_ns: r.self_time,
            self_time_ms: r.self_time as f64 / 1e6,
            self_pct: to_f64(&r.self_pct),
            invocations: r.invocations,
            avg_per_invocation_ns: to_f64(&r.avg_per_invocation),
        })
        .collect()
}

pub const HOTSPOT_HEADER: [&str; 5] = [
    "Hot Spots - Method",
    "Self time (%)",
    "Self time",
    "Invocations",
    "Avg / invocation",
];

pub fn hotspot_text(rows: &[HotSpotRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                format!(
                    "{} ({})",
                    format_ms_int(r.self_time),
                    format_pct(r.self_pct)
                ),
                format_ms_int(r.self_time),
                r.invocations.to_string(),
                format_ms(r.avg_per_invocation),
            ]
        })
        .collect();
    aligned(&HOTSPOT_HEADER, &cells, 1)
}

pub fn hotspot_csv(rows: &[HotSpotRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                r.self_time.to_string(),
                format!("{:.6}", to_f64(&r.self_pct)),
                r.invocations.to_string(),
                format!("{:.3}", to_f64(&r.avg_per_invocation)),
            ]
        })
        .collect();
    csv(
        &[
            "method",
            "self_time_ns",
            "self_pct",
            "invocations",
            "avg_per_invocation_ns",
        ],
        &cells,
    )
}

#[derive(Serialize)]
pub struct TotalJson<'a> {
    pub method: &'a str,
    pub total_time_ns: u64,
    pub calls: u64,
}

pub fn total_json(rows: &[TotalTimeRow]) -> Vec<TotalJson<'_>> {
    rows.iter()
        .map(|r| TotalJson {
            method: r.method.as_str(),
            total_time_ns: r.total_time,
            calls: r.calls,
        })
        .collect()
}

pub fn total_text(rows: &[TotalTimeRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                format_ms_int(r.total_time),
                r.calls.to_string(),
            ]
        })
        .collect();
    aligned(&["Method", "Total time", "Calls"], &cells, 1)
}

pub fn total_csv(rows: &[TotalTimeRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                r.total_time.to_string(),
                r.calls.to_string(),
            ]
        })
        .collect();
    csv(&["method", "total_time_ns", "calls"], &cells)
}

#[derive(Serialize)]
pub struct ComponentJson<'a> {
    pub component: &'a str,
    pub tier: &'static str,
    pub self_time_ns: u64,
    pub utilization_pct: f64,
    pub invocations: u64,
}

pub fn component_json(rows: &[ComponentUtilizationRow]) -> Vec<ComponentJson<'_>> {
    rows.iter()
        .map(|r| ComponentJson {
            component: &r.component,
            tier: r.tier.name(),
            self_time_ns: r.self_time,
            utilization_pct: to_f64(&r.utilization_pct),
            invocations: r.invocations,
        })
        .collect()
}

pub fn component_text(rows: &[ComponentUtilizationRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.component.clone(),
                r.tier.to_string(),
                format_ms_int(r.self_time),
                format_pct(r.utilization_pct),
                r.invocations.to_string(),
            ]
        })
        .collect();
    aligned(
        &[
            "Component",
            "Tier",
            "Self time",
            "Utilization",
            "Invocations",
        ],
        &cells,
        2,
    )
}

pub fn component_csv(rows: &[ComponentUtilizationRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.component.clone(),
                r.tier.to_string(),
                r.self_time.to_string(),
                format!("{:.6}", to_f64(&r.utilization_pct)),
                r.invocations.to_string(),
            ]
        })
        .collect();
    csv(
        &[
            "component",
            "tier",
            "self_time_ns",
            "utilization_pct",
            "invocations",
        ],
        &cells,
    )
}

fn status_name(status: DiffStatus) -> &'static str {
    match status {
        DiffStatus::Shared => "shared",
        DiffStatus::Added => "added",
        DiffStatus::Removed => "removed",
    }
}

fn opt_ms(v: &Option<Ratio<u64>>) -> String {
    v.map(format_ms).unwrap_or_else(|| "-".to_string())
}

pub fn diff_text(rows: &[SnapshotDiffRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                opt_ms(&r.avg_a),
                opt_ms(&r.avg_b),
                match (&r.ratio, r.status) {
                    (Some(x), _) => format_ratio(*x),
                    (None, DiffStatus::Shared) => "inf".to_string(),
                    (None, _) => "-".to_string(),
                },
                r.invocations_a.to_string(),
                r.invocations_b.to_string(),
                status_name(r.status).to_string(),
            ]
        })
        .collect();
    aligned(
        &[
            "Method",
            "Avg A",
            "Avg B",
            "Ratio B/A",
            "Inv A",
            "Inv B",
            "Status",
        ],
        &cells,
        1,
    )
}

pub fn diff_csv(rows: &[SnapshotDiffRow]) -> String {
    let f = |v: &Option<Ratio<u64>>| v.map(|x| format!("{:.3}", to_f64(&x))).unwrap_or_default();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                f(&r.avg_a),
                f(&r.avg_b),
                r.ratio
                    .map(|x| format!("{:.6}", to_f64(&x)))
                    .unwrap_or_default(),
                r.invocations_a.to_string(),
                r.invocations_b.to_string(),
                status_name(r.status).to_string(),
            ]
        })
        .collect();
    csv(
        &[
            "method",
            "avg_a_ns",
            "avg_b_ns",
            "ratio",
            "invocations_a",
            "invocations_b",
            "status",
        ],
        &cells,
    )
}

#[derive(Serialize)]
pub struct DiffJson<'a> {
    pub method: &'a str,
    pub avg_a_ns: Option<f64>,
    pub avg_b_ns: Option<f64>,
    pub ratio: Option<f64>,
    /// The ratio as an exact fraction, e.g. `1` or `3/2`.
    pub ratio_exact: Option<String>,
    pub invocations_a: u64,
    pub invocations_b: u64,
    pub status: &'static str,
}

pub fn diff_json(rows: &[SnapshotDiffRow]) -> Vec<DiffJson<'_>> {
    rows.iter()
        .map(|r| DiffJson {
            method: r.method.as_str(),
            avg_a_ns: r.avg_a.as_ref().map(to_f64),
            avg_b_ns: r.avg_b.as_ref().map(to_f64),
            ratio: r.ratio.as_ref().map(to_f64),
            ratio_exact: r.ratio.map(|x| x.to_string()),
            invocations_a: r.invocations_a,
            invocations_b: r.invocations_b,
            status: status_name(r.status),
        })
        .collect()
}

pub fn edges_text(edges: &[CallGraphEdge]) -> String {
    let cells: Vec<Vec<String>> = edges
        .iter()
        .map(|e| {
            vec![
                e.caller.to_string(),
                e.callee.to_string(),
                e.calls.to_string(),
                format_ms_int(e.callee_total_time),
            ]
        })
        .collect();
    aligned(
        &["Caller", "Callee", "Calls", "Callee total time"],
        &cells,
        2,
    )
}

pub fn edges_csv(edges: &[CallGraphEdge]) -> String {
    let cells: Vec<Vec<String>> = edges
        .iter()
        .map(|e| {
            vec![
                e.caller.to_string(),
                e.callee.to_string(),
                e.calls.to_string(),
                e.callee_total_time.to_string(),
            ]
        })
        .collect();
    csv(
        &["caller", "callee", "calls", "callee_total_time_ns"],
        &cells,
    )
}

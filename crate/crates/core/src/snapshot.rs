//! Labeled analysis snapshots and their comparison across load levels.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Read;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalysisConfig};
use crate::components::ComponentUtilizationRow;
use crate::error::{Error, Result};
use crate::metrics::HotSpotRow;
use crate::trace_model::MethodName;

pub const SNAPSHOT_SCHEMA: &str = "cct-lens/snapshot/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub schema: String,
    pub label: String,
    pub user_count: u32,
    pub hotspot_table: Vec<HotSpotRow>,
    pub component_table: Vec<ComponentUtilizationRow>,
    pub source_trace_digest: String,
}

impl Snapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshots always serialize")
    }

    /// Parses a snapshot document, rejecting other schemas before looking at
    /// the rest of the content.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("schema")
            .and_then(|s| s.as_str())
            .unwrap_or("<none>");
        if found != SNAPSHOT_SCHEMA {
            return Err(Error::SchemaMismatch {
                expected: SNAPSHOT_SCHEMA.to_string(),
                found: found.to_string(),
            });
        }
        Ok(serde_json::from_value(value)?)
    }
}

pub fn take_snapshot<R: Read>(
    label: &str,
    user_count: u32,
    trace: R,
    config: &AnalysisConfig,
) -> Result<Snapshot> {
    let analysis = analyze(trace, config)?;
    Ok(Snapshot {
        schema: SNAPSHOT_SCHEMA.to_string(),
        label: label.to_string(),
        user_count,
        hotspot_table: analysis.tables.hotspots,
        component_table: analysis.tables.components,
        source_trace_digest: analysis.digest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffStatus {
    Shared,
    Added,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotDiffRow {
    pub method: MethodName,
    pub avg_a: Option<Ratio<u64>>,
    pub avg_b: Option<Ratio<u64>>,
    /// `avg_b / avg_a`. `None` for added and removed rows, and for shared
    /// rows whose baseline average is zero while the other is not.
    pub ratio: Option<Ratio<u128>>,
    pub invocations_a: u64,
    pub invocations_b: u64,
    pub status: DiffStatus,
}

/// Ratio of two per-invocation averages, `(sb/ib) / (sa/ia)`.
fn avg_ratio(a: &HotSpotRow, b: &HotSpotRow) -> Option<Ratio<u128>> {
    let num = b.self_time as u128 * a.invocations as u128;
    let den = a.self_time as u128 * b.invocations as u128;
    match (num, den) {
        (0, 0) => Some(Ratio::from_integer(1)),
        (_, 0) => None,
        _ => Some(Ratio::new(num, den)),
    }
}

fn deviation(r: &Ratio<u128>) -> Ratio<u128> {
    let one = Ratio::from_integer(1);
    if *r >= one {
        r - one
    } else {
        one - r
    }
}

fn rank(row: &SnapshotDiffRow) -> u8 {
    match (row.status, &row.ratio) {
        (DiffStatus::Shared, None) => 0,
        (DiffStatus::Shared, Some(_)) => 1,
        (DiffStatus::Added, _) => 2,
        (DiffStatus::Removed, _) => 3,
    }
}

/// Joins two snapshots on method name. Shared rows come first, largest
/// deviation of the ratio from 1 first; added then removed rows follow.
pub fn diff(a: &Snapshot, b: &Snapshot) -> Vec<SnapshotDiffRow> {
    let in_a: BTreeMap<&MethodName, &HotSpotRow> = a
        .hotspot_table
        .iter()
        .filter(|r| r.invocations > 0)
        .map(|r| (&r.method, r))
        .collect();
    let in_b: BTreeMap<&MethodName, &HotSpotRow> = b
        .hotspot_table
        .iter()
        .filter(|r| r.invocations > 0)
        .map(|r| (&r.method, r))
        .collect();

    let mut rows = Vec::new();
    for (method, ra) in &in_a {
        let row = match in_b.get(method) {
            Some(rb) => SnapshotDiffRow {
                method: (*method).clone(),
                avg_a: Some(ra.avg_per_invocation),
                avg_b: Some(rb.avg_per_invocation),
                ratio: avg_ratio(ra, rb),
                invocations_a: ra.invocations,
                invocations_b: rb.invocations,
                status: DiffStatus::Shared,
            },
            None => SnapshotDiffRow {
                method: (*method).clone(),
                avg_a: Some(ra.avg_per_invocation),
                avg_b: None,
                ratio: None,
                invocations_a: ra.invocations,
                invocations_b: 0,
                status: DiffStatus::Removed,
            },
        };
        rows.push(row);
    }
    for (method, rb) in &in_b {
        if !in_a.contains_key(method) {
            rows.push(SnapshotDiffRow {
                method: (*method).clone(),
                avg_a: None,
                avg_b: Some(rb.avg_per_invocation),
                ratio: None,
                invocations_a: 0,
                invocations_b: rb.invocations,
                status: DiffStatus::Added,
            });
        }
    }
    rows.sort_by(|x, y| {
        rank(x)
            .cmp(&rank(y))
            .then_with(|| match (&x.ratio, &y.ratio) {
                (Some(rx), Some(ry)) => deviation(ry).cmp(&deviation(rx)),
                _ => Ordering::Equal,
            })
            .then_with(|| x.method.cmp(&y.method))
    });
    rows
}

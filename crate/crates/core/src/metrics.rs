//! Hot-spot and total-time tables.
//!
//! All arithmetic is on integer nanoseconds and exact rationals; rounding
//! happens only when a report is rendered.

use indexmap::IndexMap;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cct::CctNode;
use crate::error::{Error, Result};
use crate::trace_model::MethodName;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotSpotRow {
    pub method: MethodName,
    pub self_time: u64,
    /// Share of the table's summed self time.
    pub self_pct: Ratio<u64>,
    pub invocations: u64,
    /// `self_time / invocations`, in nanoseconds.
    pub avg_per_invocation: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotalTimeRow {
    pub method: MethodName,
    pub total_time: u64,
    pub calls: u64,
}

pub fn avg_per_invocation(self_time: u64, invocations: u64) -> Result<Ratio<u64>> {
    if invocations == 0 {
        return Err(Error::ZeroInvocations);
    }
    Ok(Ratio::new(self_time, invocations))
}

/// `part / whole`, or zero when `whole` is zero.
pub(crate) fn share(part: u64, whole: u64) -> Ratio<u64> {
    if whole == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(part, whole)
    }
}

/// Per-method (self time, invocations, total time) over every node below
/// `root`, in first-encounter order. The root itself is skipped.
fn aggregate(root: &CctNode) -> IndexMap<&MethodName, (u64, u64, u64)> {
    let mut acc: IndexMap<&MethodName, (u64, u64, u64)> = IndexMap::new();
    root.visit(&mut |path, node| {
        if path.len() < 2 {
            return;
        }
        let entry = acc.entry(&node.method).or_default();
        entry.0 += node.self_time();
        entry.1 += node.invocations;
        entry.2 += node.total_time;
    });
    acc
}

/// Self time per method across all contexts, largest first; ties are broken
/// by method name. The synthetic root is not a row.
pub fn hotspots(root: &CctNode) -> Vec<HotSpotRow> {
    let acc = aggregate(root);
    let table_total: u64 = acc.values().map(|v| v.0).sum();
    let mut rows: Vec<HotSpotRow> = acc
        .into_iter()
        .map(|(method, (self_time, invocations, _))| HotSpotRow {
            method: method.clone(),
            self_time,
            self_pct: share(self_time, table_total),
            invocations,
            avg_per_invocation: if invocations == 0 {
                Ratio::from_integer(0)
            } else {
                Ratio::new(self_time, invocations)
            },
        })
        .collect();
    rows.sort_by(|a, b| {
        b.self_time
            .cmp(&a.self_time)
            .then_with(|| a.method.cmp(&b.method))
    });
    rows
}

/// Root time not attributed to any method: the root's own self time, i.e.
/// idle gaps between top-level frames and time of filtered top-level frames.
pub fn unattributed_time(root: &CctNode) -> u64 {
    root.self_time()
}

pub fn total_time_table(root: &CctNode) -> Vec<TotalTimeRow> {
    let mut rows: Vec<TotalTimeRow> = aggregate(root)
        .into_iter()
        .map(|(method, (_, calls, total_time))| TotalTimeRow {
            method: method.clone(),
            total_time,
            calls,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.total_time
            .cmp(&a.total_time)
            .then_with(|| a.method.cmp(&b.method))
    });
    rows
}

/// Σ self_pct as an exact rational.
pub fn pct_sum(rows: &[HotSpotRow]) -> Ratio<u64> {
    rows.iter()
        .fold(Ratio::from_integer(0), |acc, r| acc + r.self_pct)
}

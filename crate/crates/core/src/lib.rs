//! Component-level interaction profiling over dynamic call traces.
//!
//! The pipeline reads method enter/exit traces ([`trace_model`]), builds
//! calling context trees ([`cct`]), optionally narrows them with
//! instrumentation filters ([`filters`]), and tabulates hot spots
//! ([`metrics`]) and per-component utilization ([`components`]). Analyses can
//! be saved as snapshots and compared across load levels ([`snapshot`]).
//! [`workload_sim`] generates deterministic traces for the HR Portal
//! component design.

pub mod analysis;
pub mod cct;
pub mod cli;
pub mod components;
pub mod error;
pub mod filters;
pub mod metrics;
pub mod report;
pub mod snapshot;
pub mod trace_model;
pub mod workload_sim;

pub use error::{Error, Result};

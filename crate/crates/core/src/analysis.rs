//! The analysis pipeline: parse, build, merge, filter, tabulate.

use std::collections::BTreeMap;
use std::io::{BufReader, Read};

use crate::cct::{merge_ccts, BuildOptions, CctForest, CctNode};
use crate::components::{
    component_utilization, default_hr_catalog, ComponentCatalog, ComponentUtilizationRow,
};
use crate::error::Result;
use crate::filters::{apply_filter, FilterMode, FilterSet};
use crate::metrics::{hotspots, total_time_table, unattributed_time, HotSpotRow, TotalTimeRow};
use crate::trace_model::DigestReader;

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub build: BuildOptions,
    pub filters: FilterSet,
    pub filter_mode: FilterMode,
    pub catalog: ComponentCatalog,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            build: BuildOptions::default(),
            filters: FilterSet::default(),
            filter_mode: FilterMode::default(),
            catalog: default_hr_catalog(),
        }
    }
}

/// Tables computed from one (filtered) tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tables {
    pub hotspots: Vec<HotSpotRow>,
    pub totals: Vec<TotalTimeRow>,
    pub components: Vec<ComponentUtilizationRow>,
    pub unattributed: u64,
}

impl Tables {
    pub fn compute(root: &CctNode, catalog: &ComponentCatalog) -> Self {
        let hot = hotspots(root);
        let components = component_utilization(&hot, catalog);
        Tables {
            totals: total_time_table(root),
            components,
            unattributed: unattributed_time(root),
            hotspots: hot,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub forest: CctForest,
    /// Filtered merge of all threads.
    pub merged: CctNode,
    pub tables: Tables,
    pub digest: String,
    pub event_warnings: Vec<String>,
}

impl Analysis {
    /// Filtered per-thread trees and their tables, keyed by thread id.
    pub fn per_thread(&self, config: &AnalysisConfig) -> Result<BTreeMap<u32, (CctNode, Tables)>> {
        let mut out = BTreeMap::new();
        for (&tid, root) in &self.forest.roots {
            let filtered = apply_filter(root, &config.filters, config.filter_mode)?;
            let tables = Tables::compute(&filtered, &config.catalog);
            out.insert(tid, (filtered, tables));
        }
        Ok(out)
    }
}

/// Runs the whole pipeline over a trace stream. Memory is bounded by the
/// number of distinct calling contexts, not by the number of events.
pub fn analyze<R: Read>(source: R, config: &AnalysisConfig) -> Result<Analysis> {
    let mut reader = BufReader::with_capacity(1 << 16, DigestReader::new(source));
    let forest = CctForest::read(&mut reader, config.build)?;
    let digest = reader.get_ref().hex_digest();
    let merged = apply_filter(&merge_ccts(&forest), &config.filters, config.filter_mode)?;
    let tables = Tables::compute(&merged, &config.catalog);
    Ok(Analysis {
        event_warnings: forest.warnings.clone(),
        forest,
        merged,
        tables,
        digest,
    })
}

pub fn analyze_str(text: &str, config: &AnalysisConfig) -> Result<Analysis> {
    analyze(text.as_bytes(), config)
}

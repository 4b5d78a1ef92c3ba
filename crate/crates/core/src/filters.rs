//! Post-hoc instrumentation filters.
//!
//! Patterns are either an exact method name or a prefix ending in `*`, such
//! as `com.sun.ejb.*`. A filtered tree looks like the tree a profiler would
//! have recorded had only the kept methods been instrumented.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cct::{merge_child, CctNode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FilterPattern {
    text: String,
}

impl FilterPattern {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        let invalid = |reason: &str| Error::InvalidPattern {
            pattern: text.clone(),
            reason: reason.to_string(),
        };
        if text.is_empty() {
            return Err(invalid("empty pattern"));
        }
        if text.chars().any(char::is_whitespace) {
            return Err(invalid("contains whitespace"));
        }
        if let Some(pos) = text.find('*') {
            if pos != text.len() - 1 {
                return Err(invalid("`*` is only allowed as the last character"));
            }
        }
        Ok(FilterPattern { text })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn is_prefix(&self) -> bool {
        self.text.ends_with('*')
    }

    pub fn matches(&self, method: &str) -> bool {
        match self.text.strip_suffix('*') {
            Some(prefix) => method.starts_with(prefix),
            None => method == self.text,
        }
    }
}

pub fn matches(pattern: &FilterPattern, method: &str) -> bool {
    pattern.matches(method)
}

impl FromStr for FilterPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FilterPattern::new(s)
    }
}

impl TryFrom<String> for FilterPattern {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        FilterPattern::new(value)
    }
}

impl From<FilterPattern> for String {
    fn from(value: FilterPattern) -> Self {
        value.text
    }
}

impl fmt::Display for FilterPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSet {
    pub includes: Vec<FilterPattern>,
    pub excludes: Vec<FilterPattern>,
    /// Verdict for methods when `includes` is empty.
    pub default_verdict: Verdict,
}

impl FilterSet {
    pub fn new(includes: Vec<FilterPattern>, excludes: Vec<FilterPattern>) -> Self {
        FilterSet {
            includes,
            excludes,
            default_verdict: Verdict::Include,
        }
    }

    pub fn exclude(patterns: &[&str]) -> Result<Self> {
        let excludes = patterns
            .iter()
            .map(|p| FilterPattern::new(*p))
            .collect::<Result<_>>()?;
        Ok(FilterSet::new(Vec::new(), excludes))
    }

    pub fn include(patterns: &[&str]) -> Result<Self> {
        let includes = patterns
            .iter()
            .map(|p| FilterPattern::new(*p))
            .collect::<Result<_>>()?;
        Ok(FilterSet::new(includes, Vec::new()))
    }

    pub fn is_identity(&self) -> bool {
        self.includes.is_empty()
            && self.excludes.is_empty()
            && self.default_verdict == Verdict::Include
    }

    pub fn keeps(&self, method: &str) -> bool {
        let included = if self.includes.is_empty() {
            self.default_verdict == Verdict::Include
        } else {
            self.includes.iter().any(|p| p.matches(method))
        };
        included && !self.excludes.iter().any(|p| p.matches(method))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    /// Rejected frames vanish; their callees move up to the caller and their
    /// own time becomes the caller's self time.
    #[default]
    AttributeToParent,
    /// Rejected frames and everything below them vanish, and their time is
    /// removed from every ancestor.
    DropSubtree,
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "attribute" | "attribute_to_parent" => Ok(FilterMode::AttributeToParent),
            "drop" | "drop_subtree" => Ok(FilterMode::DropSubtree),
            other => Err(format!(
                "unknown filter mode `{other}` (expected attribute|drop)"
            )),
        }
    }
}

/// Applies `filters` below `root`. The root itself is never filtered; an
/// exclude pattern that names it is an error.
pub fn apply_filter(root: &CctNode, filters: &FilterSet, mode: FilterMode) -> Result<CctNode> {
    if let Some(p) = filters
        .excludes
        .iter()
        .find(|p| p.matches(root.method.as_str()))
    {
        return Err(Error::RootFiltered(p.to_string()));
    }
    if filters.is_identity() {
        return Ok(root.clone());
    }
    let mut out = CctNode {
        children: Vec::new(),
        ..root.clone()
    };
    match mode {
        FilterMode::AttributeToParent => {
            for child in &root.children {
                for kept in splice(child, filters) {
                    merge_child(&mut out.children, kept);
                }
            }
        }
        FilterMode::DropSubtree => {
            let mut removed = 0;
            for child in &root.children {
                match prune(child, filters) {
                    (Some(kept), r) => {
                        removed += r;
                        out.children.push(kept);
                    }
                    (None, r) => removed += r,
                }
            }
            out.total_time -= removed;
        }
    }
    Ok(out)
}

/// Nodes that replace `node` in its parent's child list.
fn splice(node: &CctNode, filters: &FilterSet) -> Vec<CctNode> {
    let mut children = Vec::new();
    for child in &node.children {
        for kept in splice(child, filters) {
            merge_child(&mut children, kept);
        }
    }
    if filters.keeps(node.method.as_str()) {
        vec![CctNode {
            method: node.method.clone(),
            invocations: node.invocations,
            total_time: node.total_time,
            truncated: node.truncated,
            children,
        }]
    } else {
        children
    }
}

/// Returns the surviving node, if any, and the time removed from its
/// ancestors.
fn prune(node: &CctNode, filters: &FilterSet) -> (Option<CctNode>, u64) {
    if !filters.keeps(node.method.as_str()) {
        return (None, node.total_time);
    }
    let mut removed = 0;
    let mut children = Vec::with_capacity(node.children.len());
    for child in &node.children {
        let (kept, r) = prune(child, filters);
        removed += r;
        children.extend(kept);
    }
    let kept = CctNode {
        method: node.method.clone(),
        invocations: node.invocations,
        total_time: node.total_time - removed,
        truncated: node.truncated,
        children,
    };
    (Some(kept), removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cct::thread_root_label;
    use crate::trace_model::MethodName;

    fn m(s: &str) -> MethodName {
        MethodName::new(s).unwrap()
    }

    fn p(s: &str) -> FilterPattern {
        FilterPattern::new(s).unwrap()
    }

    #[test]
    fn pattern_matching() {
        assert!(p("com.sun.ejb.*").matches("com.sun.ejb.Container.invoke()"));
        assert!(!p("com.sun.ejb.*").matches("com.mycompany.hr.dao.BaseDAO.getConnection()"));
        assert!(p("a.B.m()").matches("a.B.m()"));
        assert!(!p("a.B.m()").matches("a.B.m()x"));
        assert!(p("*").matches("anything"));
    }

    #[test]
    fn pattern_validation() {
        assert!(FilterPattern::new("").is_err());
        assert!(FilterPattern::new("a*b").is_err());
        assert!(FilterPattern::new("**").is_err());
        assert!(FilterPattern::new("a b*").is_err());
        assert!(FilterPattern::new("javax.ejb.*").is_ok());
    }

    #[test]
    fn keep_rules() {
        let fs = FilterSet {
            includes: vec![p("com.mycompany.*"), p("com.sun.ejb.*")],
            excludes: vec![p("com.mycompany.hr.vo.*")],
            default_verdict: Verdict::Include,
        };
        assert!(fs.keeps("com.mycompany.hr.dao.BaseDAO.getConnection()"));
        assert!(fs.keeps("com.sun.ejb.Container.invoke()"));
        assert!(!fs.keeps("com.mycompany.hr.vo.CandidateProfile.<init>()"));
        assert!(!fs.keeps("org.apache.jsp.Login_jsp._jspService()"));

        let deny_all = FilterSet {
            default_verdict: Verdict::Exclude,
            ..FilterSet::default()
        };
        assert!(!deny_all.keeps("x"));
    }

    fn root_a_b() -> CctNode {
        CctNode::new(thread_root_label(1), 1, 40).with_children(vec![
            CctNode::new(m("a"), 1, 40).with_children(vec![CctNode::new(m("b"), 1, 20)])
        ])
    }

    #[test]
    fn attribute_splices_excluded_leaf_into_parent_self() {
        let out = apply_filter(
            &root_a_b(),
            &FilterSet::exclude(&["b"]).unwrap(),
            FilterMode::AttributeToParent,
        )
        .unwrap();
        let a = out.child("a").unwrap();
        assert_eq!(a.total_time, 40);
        assert_eq!(a.self_time(), 40);
        assert!(a.children.is_empty());
    }

    #[test]
    fn attribute_promotes_grandchildren() {
        let tree = CctNode::new(thread_root_label(1), 1, 40).with_children(vec![CctNode::new(
            m("a"),
            1,
            40,
        )
        .with_children(vec![
            CctNode::new(m("b"), 1, 20).with_children(vec![CctNode::new(m("c"), 1, 5)])
        ])]);
        let out = apply_filter(
            &tree,
            &FilterSet::exclude(&["b"]).unwrap(),
            FilterMode::AttributeToParent,
        )
        .unwrap();
        let a = out.child("a").unwrap();
        assert_eq!(a.total_time, 40);
        assert_eq!(a.child("c").unwrap().total_time, 5);
        assert_eq!(a.self_time(), 35);
    }

    #[test]
    fn drop_subtracts_from_ancestors() {
        let out = apply_filter(
            &root_a_b(),
            &FilterSet::exclude(&["b"]).unwrap(),
            FilterMode::DropSubtree,
        )
        .unwrap();
        let a = out.child("a").unwrap();
        assert_eq!(a.total_time, 20);
        assert_eq!(a.self_time(), 20);
        assert_eq!(out.total_time, 20);
    }

    #[test]
    fn splice_collisions_merge_with_siblings() {
        // a -> {w -> c(3), c(4)}; removing w merges its c into the existing c.
        let tree = CctNode::new(thread_root_label(1), 1, 20).with_children(vec![CctNode::new(
            m("a"),
            1,
            20,
        )
        .with_children(vec![
            CctNode::new(m("w"), 2, 5).with_children(vec![CctNode::new(m("c"), 2, 3)]),
            CctNode::new(m("c"), 1, 4),
        ])]);
        let out = apply_filter(
            &tree,
            &FilterSet::exclude(&["w"]).unwrap(),
            FilterMode::AttributeToParent,
        )
        .unwrap();
        let a = out.child("a").unwrap();
        assert_eq!(a.children.len(), 1);
        let c = a.child("c").unwrap();
        assert_eq!((c.invocations, c.total_time), (3, 7));
        assert_eq!(a.self_time(), 13);
    }

    #[test]
    fn root_cannot_be_filtered() {
        let err = apply_filter(
            &root_a_b(),
            &FilterSet::exclude(&["<root*"]).unwrap(),
            FilterMode::AttributeToParent,
        )
        .unwrap_err();
        assert!(matches!(err, Error::RootFiltered(_)));
        // Includes never apply to the root.
        let out = apply_filter(
            &root_a_b(),
            &FilterSet::include(&["a"]).unwrap(),
            FilterMode::DropSubtree,
        )
        .unwrap();
        assert_eq!(out.method.as_str(), "<root:1>");
    }

    #[test]
    fn empty_filter_is_identity() {
        let tree = root_a_b();
        for mode in [FilterMode::AttributeToParent, FilterMode::DropSubtree] {
            assert_eq!(
                apply_filter(&tree, &FilterSet::default(), mode).unwrap(),
                tree
            );
        }
    }

    #[test]
    fn mode_names() {
        assert_eq!(
            "attribute".parse::<FilterMode>().unwrap(),
            FilterMode::AttributeToParent
        );
        assert_eq!(
            "drop".parse::<FilterMode>().unwrap(),
            FilterMode::DropSubtree
        );
        assert!("x".parse::<FilterMode>().is_err());
    }
}

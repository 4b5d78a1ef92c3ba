//! Calling context trees built from per-thread enter/exit streams.
//!
//! Calls to the same method under the same parent share one node, so a node
//! stands for a method in one calling context and carries the invocation
//! count and inclusive time summed over all calls in that context. Recursion
//! produces a chain of nodes, one per depth.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace_model::{EventKind, EventStream, MethodName, ParseMode, Trace, TraceEvent};

/// Label of the synthetic root of thread `tid`.
pub fn thread_root_label(tid: u32) -> MethodName {
    MethodName::new(format!("<root:{tid}>")).expect("root labels contain no whitespace")
}

/// Label of the root produced by [`merge_ccts`].
pub fn merged_root_label() -> MethodName {
    MethodName::new("<root>").expect("root labels contain no whitespace")
}

pub fn is_synthetic_root(method: &MethodName) -> bool {
    let s = method.as_str();
    s == "<root>" || (s.starts_with("<root:") && s.ends_with('>'))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CctNode {
    pub method: MethodName,
    pub invocations: u64,
    /// Inclusive nanoseconds, summed over all invocations in this context.
    pub total_time: u64,
    #[serde(default)]
    pub truncated: bool,
    #[serde(default)]
    pub children: Vec<CctNode>,
}

impl CctNode {
    pub fn new(method: MethodName, invocations: u64, total_time: u64) -> Self {
        CctNode {
            method,
            invocations,
            total_time,
            truncated: false,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<CctNode>) -> Self {
        self.children = children;
        self
    }

    /// Exclusive time: own total minus the totals of the direct children.
    /// Saturates at zero for hand-built trees that break the time invariant.
    pub fn self_time(&self) -> u64 {
        let callees: u64 = self.children.iter().map(|c| c.total_time).sum();
        self.total_time.saturating_sub(callees)
    }

    pub fn child(&self, method: &str) -> Option<&CctNode> {
        self.children.iter().find(|c| c.method.as_str() == method)
    }

    /// Follows a path of method names from this node.
    pub fn descend(&self, path: &[&str]) -> Option<&CctNode> {
        path.iter().try_fold(self, |node, m| node.child(m))
    }

    /// Number of nodes in the tree, this one included.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(CctNode::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(CctNode::depth).max().unwrap_or(0)
    }

    /// Pre-order visit of every node with the path of methods leading to it
    /// (the node's own method last).
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&[&'a MethodName], &'a CctNode)) {
        fn go<'a>(
            node: &'a CctNode,
            path: &mut Vec<&'a MethodName>,
            f: &mut impl FnMut(&[&'a MethodName], &'a CctNode),
        ) {
            path.push(&node.method);
            f(path, node);
            for child in &node.children {
                go(child, path, f);
            }
            path.pop();
        }
        go(self, &mut Vec::new(), f);
    }

    /// Folds `other` into this node: counts and times add, flags OR, and
    /// children merge recursively by method.
    pub fn absorb(&mut self, other: CctNode) {
        self.invocations += other.invocations;
        self.total_time += other.total_time;
        self.truncated |= other.truncated;
        for child in other.children {
            merge_child(&mut self.children, child);
        }
    }
}

/// Adds `node` to a sibling list, merging with an existing sibling of the
/// same method. First-encounter order is kept.
pub(crate) fn merge_child(siblings: &mut Vec<CctNode>, node: CctNode) {
    match siblings.iter_mut().find(|s| s.method == node.method) {
        Some(existing) => existing.absorb(node),
        None => siblings.push(node),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub mode: ParseMode,
    /// Frames nested deeper than this are not given nodes; their time stays
    /// with the deepest recorded ancestor. `None` means unlimited.
    pub max_depth: Option<usize>,
}

impl BuildOptions {
    pub fn strict() -> Self {
        BuildOptions::default()
    }

    pub fn lenient() -> Self {
        BuildOptions {
            mode: ParseMode::Lenient,
            max_depth: None,
        }
    }
}

struct ArenaNode {
    method: u32,
    invocations: u64,
    total_time: u64,
    truncated: bool,
    children: Vec<u32>,
}

struct OpenFrame {
    node: Option<u32>,
    method: u32,
    enter_ts: u64,
}

/// Incremental single-thread CCT construction.
///
/// Memory is proportional to the number of distinct calling contexts plus the
/// current stack depth, not to the number of events fed.
pub struct CctBuilder {
    tid: u32,
    options: BuildOptions,
    names: Vec<MethodName>,
    ids: HashMap<MethodName, u32>,
    nodes: Vec<ArenaNode>,
    child_index: HashMap<(u32, u32), u32>,
    stack: Vec<OpenFrame>,
    first_ts: Option<u64>,
    last_ts: u64,
    events: usize,
    warnings: Vec<String>,
}

const ROOT: u32 = 0;

impl CctBuilder {
    pub fn new(tid: u32, options: BuildOptions) -> Self {
        let mut builder = CctBuilder {
            tid,
            options,
            names: Vec::new(),
            ids: HashMap::new(),
            nodes: Vec::new(),
            child_index: HashMap::new(),
            stack: Vec::new(),
            first_ts: None,
            last_ts: 0,
            events: 0,
            warnings: Vec::new(),
        };
        let root = builder.intern(&thread_root_label(tid));
        builder.nodes.push(ArenaNode {
            method: root,
            invocations: 1,
            total_time: 0,
            truncated: false,
            children: Vec::new(),
        });
        builder
    }

    fn intern(&mut self, method: &MethodName) -> u32 {
        if let Some(&id) = self.ids.get(method) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(method.clone());
        self.ids.insert(method.clone(), id);
        id
    }

    fn cursor(&self) -> u32 {
        self.stack.iter().rev().find_map(|f| f.node).unwrap_or(ROOT)
    }

    pub fn push(&mut self, event: &TraceEvent) -> Result<()> {
        let index = self.events;
        self.events += 1;
        if self.first_ts.is_none() {
            self.first_ts = Some(event.ts);
        }
        self.last_ts = self.last_ts.max(event.ts);

        match event.kind {
            EventKind::Enter => {
                let method = self.intern(&event.method);
                let capped = self
                    .options
                    .max_depth
                    .is_some_and(|cap| self.stack.len() >= cap);
                let node = if capped {
                    None
                } else {
                    let parent = self.cursor();
                    let child = match self.child_index.get(&(parent, method)) {
                        Some(&c) => c,
                        None => {
                            let c = self.nodes.len() as u32;
                            self.nodes.push(ArenaNode {
                                method,
                                invocations: 0,
                                total_time: 0,
                                truncated: false,
                                children: Vec::new(),
                            });
                            self.nodes[parent as usize].children.push(c);
                            self.child_index.insert((parent, method), c);
                            c
                        }
                    };
                    self.nodes[child as usize].invocations += 1;
                    Some(child)
                };
                self.stack.push(OpenFrame {
                    node,
                    method,
                    enter_ts: event.ts,
                });
            }
            EventKind::Exit => {
                let matches_top = match (self.ids.get(&event.method), self.stack.last()) {
                    (Some(&id), Some(top)) => top.method == id,
                    _ => false,
                };
                if !matches_top {
                    return match self.options.mode {
                        ParseMode::Strict => Err(Error::OrphanExit {
                            tid: self.tid,
                            index,
                            method: event.method.to_string(),
                        }),
                        ParseMode::Lenient => {
                            self.warnings.push(format!(
                                "tid {}, event {}: dropped orphan exit of `{}`",
                                self.tid, index, event.method
                            ));
                            Ok(())
                        }
                    };
                }
                let frame = self.stack.pop().expect("checked non-empty");
                if let Some(node) = frame.node {
                    self.nodes[node as usize].total_time += event.ts.saturating_sub(frame.enter_ts);
                }
            }
        }
        Ok(())
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Closes the stream and returns the thread's root.
    pub fn finish(self) -> Result<CctNode> {
        self.finish_with_warnings().map(|(root, _)| root)
    }

    pub fn finish_with_warnings(mut self) -> Result<(CctNode, Vec<String>)> {
        if let Some(top) = self.stack.last() {
            match self.options.mode {
                ParseMode::Strict => {
                    return Err(Error::UnmatchedEnter {
                        tid: self.tid,
                        open: self.stack.len(),
                        method: self.names[top.method as usize].to_string(),
                    })
                }
                ParseMode::Lenient => {
                    self.warnings.push(format!(
                        "tid {}: closed {} open frame(s) at ts {}",
                        self.tid,
                        self.stack.len(),
                        self.last_ts
                    ));
                    let end = self.last_ts;
                    while let Some(frame) = self.stack.pop() {
                        if let Some(node) = frame.node {
                            let n = &mut self.nodes[node as usize];
                            n.total_time += end.saturating_sub(frame.enter_ts);
                            n.truncated = true;
                        }
                    }
                }
            }
        }
        let span = self.first_ts.map_or(0, |first| self.last_ts - first);
        self.nodes[ROOT as usize].total_time = span;
        let root = self.materialize(ROOT);
        Ok((root, self.warnings))
    }

    fn materialize(&self, id: u32) -> CctNode {
        let n = &self.nodes[id as usize];
        CctNode {
            method: self.names[n.method as usize].clone(),
            invocations: n.invocations,
            total_time: n.total_time,
            truncated: n.truncated,
            children: n.children.iter().map(|&c| self.materialize(c)).collect(),
        }
    }
}

/// Builds one thread's tree from its ordered events. The thread id is taken
/// from the first event (0 for an empty sequence).
pub fn build_cct(events: &[TraceEvent], options: BuildOptions) -> Result<CctNode> {
    let tid = events.first().map_or(0, |e| e.tid);
    let mut builder = CctBuilder::new(tid, options);
    for event in events {
        builder.push(event)?;
    }
    builder.finish()
}

/// One tree per thread, keyed by thread id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CctForest {
    pub roots: BTreeMap<u32, CctNode>,
    pub warnings: Vec<String>,
}

impl CctForest {
    pub fn build(trace: &Trace, options: BuildOptions) -> Result<Self> {
        let mut roots = BTreeMap::new();
        let mut warnings = trace.warnings.clone();
        for (&tid, events) in &trace.threads {
            let mut builder = CctBuilder::new(tid, options);
            for event in events {
                builder.push(event)?;
            }
            let (root, w) = builder.finish_with_warnings()?;
            warnings.extend(w);
            roots.insert(tid, root);
        }
        Ok(CctForest { roots, warnings })
    }

    /// Streams a trace into per-thread builders without holding the events.
    pub fn read<R: BufRead>(source: R, options: BuildOptions) -> Result<Self> {
        let mut stream = EventStream::new(source, options.mode);
        let mut builders: BTreeMap<u32, CctBuilder> = BTreeMap::new();
        while let Some((_, event)) = stream.next_event()? {
            builders
                .entry(event.tid)
                .or_insert_with(|| CctBuilder::new(event.tid, options))
                .push(&event)?;
        }
        let mut warnings = stream.take_warnings();
        let mut roots = BTreeMap::new();
        for (tid, builder) in builders {
            let (root, w) = builder.finish_with_warnings()?;
            warnings.extend(w);
            roots.insert(tid, root);
        }
        Ok(CctForest { roots, warnings })
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Coalesces all thread trees under one `<root>`: nodes reached by the same
/// method path merge, summing invocations and total time.
pub fn merge_ccts(forest: &CctForest) -> CctNode {
    let mut merged = CctNode::new(merged_root_label(), 1, 0);
    for root in forest.roots.values() {
        merged.total_time += root.total_time;
        merged.truncated |= root.truncated;
        for child in &root.children {
            merge_child(&mut merged.children, child.clone());
        }
    }
    merged
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallGraphEdge {
    pub caller: MethodName,
    pub callee: MethodName,
    pub calls: u64,
    pub callee_total_time: u64,
}

/// Collapses calling contexts into caller/callee edges, in order of first
/// encounter during a pre-order walk. Edges out of the synthetic root are kept.
pub fn project_call_graph(root: &CctNode) -> Vec<CallGraphEdge> {
    let mut edges: IndexMap<(&MethodName, &MethodName), CallGraphEdge> = IndexMap::new();
    root.visit(&mut |_, node| {
        for child in &node.children {
            let edge = edges
                .entry((&node.method, &child.method))
                .or_insert_with(|| CallGraphEdge {
                    caller: node.method.clone(),
                    callee: child.method.clone(),
                    calls: 0,
                    callee_total_time: 0,
                });
            edge.calls += child.invocations;
            edge.callee_total_time += child.total_time;
        }
    });
    edges.into_values().collect()
}

/// Folded-stack lines (`a;b;c <self_ns>`), one per node below the root.
pub fn folded_stacks(root: &CctNode) -> Vec<String> {
    let mut lines = Vec::new();
    root.visit(&mut |path, node| {
        if path.len() < 2 {
            return;
        }
        let stack: Vec<&str> = path[1..].iter().map(|m| m.as_str()).collect();
        lines.push(format!("{} {}", stack.join(";"), node.self_time()));
    });
    lines
}

pub fn serialize_cct(root: &CctNode) -> String {
    serde_json::to_string_pretty(root).expect("trees always serialize")
}

pub fn deserialize_cct(text: &str) -> Result<CctNode> {
    Ok(serde_json::from_str(text)?)
}

/// A list of roots; an empty forest serializes to `[]`.
pub fn serialize_forest(forest: &CctForest) -> String {
    let roots: Vec<&CctNode> = forest.roots.values().collect();
    serde_json::to_string_pretty(&roots).expect("trees always serialize")
}

pub fn deserialize_forest(text: &str) -> Result<Vec<CctNode>> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> MethodName {
        MethodName::new(s).unwrap()
    }

    fn events(spec: &[(u64, char, &str)]) -> Vec<TraceEvent> {
        spec.iter()
            .map(|&(ts, kind, method)| match kind {
                'E' => TraceEvent::enter(ts, 1, m(method)),
                _ => TraceEvent::exit(ts, 1, m(method)),
            })
            .collect()
    }

    #[test]
    fn nested_calls_build_a_chain() {
        let root = build_cct(
            &events(&[
                (0, 'E', "a"),
                (10, 'E', "b"),
                (30, 'X', "b"),
                (40, 'X', "a"),
            ]),
            BuildOptions::strict(),
        )
        .unwrap();
        assert_eq!(root.method.as_str(), "<root:1>");
        let a = root.child("a").unwrap();
        assert_eq!((a.invocations, a.total_time), (1, 40));
        let b = a.child("b").unwrap();
        assert_eq!((b.invocations, b.total_time), (1, 20));
        assert_eq!(a.self_time(), 20);
        assert_eq!(b.self_time(), 20);
    }

    #[test]
    fn repeated_calls_in_same_context_merge() {
        let root = build_cct(
            &events(&[(0, 'E', "a"), (5, 'X', "a"), (5, 'E', "a"), (9, 'X', "a")]),
            BuildOptions::strict(),
        )
        .unwrap();
        assert_eq!(root.children.len(), 1);
        let a = root.child("a").unwrap();
        assert_eq!((a.invocations, a.total_time), (2, 9));
    }

    #[test]
    fn recursion_is_a_chain_not_a_merge() {
        let root = build_cct(
            &events(&[(0, 'E', "a"), (3, 'E', "a"), (7, 'X', "a"), (10, 'X', "a")]),
            BuildOptions::strict(),
        )
        .unwrap();
        let outer = root.child("a").unwrap();
        assert_eq!((outer.invocations, outer.total_time), (1, 10));
        let inner = outer.child("a").unwrap();
        assert_eq!((inner.invocations, inner.total_time), (1, 4));
        assert!(inner.children.is_empty());
    }

    #[test]
    fn self_time_edge_cases() {
        let leaf = CctNode::new(m("x"), 1, 17);
        assert_eq!(leaf.self_time(), 17);
        let full = CctNode::new(m("p"), 1, 10).with_children(vec![
            CctNode::new(m("c1"), 1, 4),
            CctNode::new(m("c2"), 1, 6),
        ]);
        assert_eq!(full.self_time(), 0);
    }

    #[test]
    fn strict_mode_rejects_orphan_and_open_frames() {
        let err = build_cct(
            &events(&[(0, 'E', "a"), (1, 'X', "b")]),
            BuildOptions::strict(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::OrphanExit { index: 1, .. }), "{err:?}");

        let err = build_cct(&events(&[(0, 'X', "a")]), BuildOptions::strict()).unwrap_err();
        assert!(matches!(err, Error::OrphanExit { index: 0, .. }), "{err:?}");

        let err = build_cct(&events(&[(0, 'E', "a")]), BuildOptions::strict()).unwrap_err();
        assert!(
            matches!(err, Error::UnmatchedEnter { open: 1, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn lenient_mode_drops_orphans_and_closes_open_frames() {
        let evs = events(&[
            (0, 'X', "z"),
            (2, 'E', "a"),
            (4, 'E', "b"),
            (6, 'X', "b"),
            (9, 'E', "c"),
            (12, 'X', "q"),
        ]);
        let mut builder = CctBuilder::new(1, BuildOptions::lenient());
        for e in &evs {
            builder.push(e).unwrap();
        }
        let (root, warnings) = builder.finish_with_warnings().unwrap();
        assert_eq!(warnings.len(), 3);
        assert_eq!(root.total_time, 12);
        let a = root.child("a").unwrap();
        assert!(a.truncated);
        assert_eq!(a.total_time, 10);
        let b = a.child("b").unwrap();
        assert!(!b.truncated);
        assert_eq!(b.total_time, 2);
        let c = a.child("c").unwrap();
        assert!(c.truncated);
        assert_eq!(c.total_time, 3);
    }

    #[test]
    fn depth_cap_keeps_time_with_the_ancestor() {
        let evs = events(&[
            (0, 'E', "a"),
            (1, 'E', "b"),
            (2, 'E', "c"),
            (5, 'X', "c"),
            (7, 'X', "b"),
            (8, 'X', "a"),
        ]);
        let options = BuildOptions {
            max_depth: Some(2),
            ..BuildOptions::strict()
        };
        let root = build_cct(&evs, options).unwrap();
        let b = root.descend(&["a", "b"]).unwrap();
        assert!(b.children.is_empty());
        assert_eq!(b.total_time, 6);
        assert_eq!(b.self_time(), 6);
    }

    #[test]
    fn children_keep_first_encounter_order() {
        let root = build_cct(
            &events(&[
                (0, 'E', "z"),
                (1, 'X', "z"),
                (1, 'E', "a"),
                (2, 'X', "a"),
                (3, 'E', "z"),
                (4, 'X', "z"),
            ]),
            BuildOptions::strict(),
        )
        .unwrap();
        let names: Vec<&str> = root.children.iter().map(|c| c.method.as_str()).collect();
        assert_eq!(names, ["z", "a"]);
    }

    #[test]
    fn empty_sequence_gives_bare_root() {
        let root = build_cct(&[], BuildOptions::strict()).unwrap();
        assert_eq!(root.total_time, 0);
        assert_eq!(root.invocations, 1);
        assert!(root.children.is_empty());
    }

    fn forest(roots: Vec<(u32, CctNode)>) -> CctForest {
        CctForest {
            roots: roots.into_iter().collect(),
            warnings: Vec::new(),
        }
    }

    #[test]
    fn merge_sums_identical_paths() {
        let t1 = CctNode::new(thread_root_label(1), 1, 10).with_children(vec![CctNode::new(
            m("a"),
            1,
            10,
        )]);
        let t2 = CctNode::new(thread_root_label(2), 1, 10).with_children(vec![CctNode::new(
            m("a"),
            1,
            10,
        )]);
        let merged = merge_ccts(&forest(vec![(1, t1), (2, t2)]));
        let a = merged.child("a").unwrap();
        assert_eq!((a.invocations, a.total_time), (2, 20));
        assert_eq!(merged.total_time, 20);
    }

    #[test]
    fn merge_of_disjoint_threads_is_a_union() {
        let t1 = CctNode::new(thread_root_label(1), 1, 3).with_children(vec![CctNode::new(
            m("a"),
            1,
            3,
        )]);
        let t2 = CctNode::new(thread_root_label(2), 1, 4).with_children(vec![CctNode::new(
            m("b"),
            1,
            4,
        )]);
        let merged = merge_ccts(&forest(vec![(1, t1.clone()), (2, t2.clone())]));
        assert_eq!(
            merged.children,
            vec![t1.children[0].clone(), t2.children[0].clone()]
        );
    }

    #[test]
    fn merge_of_single_thread_is_identity_modulo_label() {
        let root = build_cct(
            &events(&[
                (0, 'E', "a"),
                (10, 'E', "b"),
                (30, 'X', "b"),
                (40, 'X', "a"),
            ]),
            BuildOptions::strict(),
        )
        .unwrap();
        let merged = merge_ccts(&forest(vec![(1, root.clone())]));
        let mut relabeled = root;
        relabeled.method = merged_root_label();
        assert_eq!(merged, relabeled);
    }

    #[test]
    fn call_graph_collapses_contexts() {
        let root = CctNode::new(merged_root_label(), 1, 100).with_children(vec![
            CctNode::new(m("a"), 1, 50).with_children(vec![CctNode::new(m("b"), 2, 20)]),
            CctNode::new(m("c"), 1, 50).with_children(vec![CctNode::new(m("b"), 3, 30)]),
        ]);
        let edges = project_call_graph(&root);
        let find = |caller: &str, callee: &str| {
            edges
                .iter()
                .find(|e| e.caller.as_str() == caller && e.callee.as_str() == callee)
                .unwrap()
        };
        assert_eq!(find("a", "b").calls, 2);
        assert_eq!(find("c", "b").calls, 3);
        assert_eq!(find("c", "b").callee_total_time, 30);
        let calls: u64 = edges.iter().map(|e| e.calls).sum();
        let mut invocations = 0;
        root.visit(&mut |path, n| {
            if path.len() > 1 {
                invocations += n.invocations;
            }
        });
        assert_eq!(calls, invocations);
    }

    #[test]
    fn recursive_chain_projects_to_self_edge() {
        let root = build_cct(
            &events(&[(0, 'E', "a"), (3, 'E', "a"), (7, 'X', "a"), (10, 'X', "a")]),
            BuildOptions::strict(),
        )
        .unwrap();
        let edges = project_call_graph(&root);
        assert!(edges
            .iter()
            .any(|e| e.caller.as_str() == "a" && e.callee.as_str() == "a"));
    }

    #[test]
    fn folded_lines_cover_every_context() {
        let root = build_cct(
            &events(&[
                (0, 'E', "a"),
                (10, 'E', "b"),
                (30, 'X', "b"),
                (40, 'X', "a"),
            ]),
            BuildOptions::strict(),
        )
        .unwrap();
        assert_eq!(
            folded_stacks(&root),
            vec!["a 20".to_string(), "a;b 20".to_string()]
        );
    }

    #[test]
    fn serialization_boundaries() {
        let single = CctNode::new(m("solo"), 1, 5);
        let text = serialize_cct(&single);
        assert_eq!(deserialize_cct(&text).unwrap(), single);

        let empty = CctForest::default();
        let doc = serialize_forest(&empty);
        assert_eq!(doc, "[]");
        assert!(deserialize_forest(&doc).unwrap().is_empty());
    }

    #[test]
    fn streaming_and_batch_builds_agree() {
        let text = "0\t1\tE\ta\n0\t2\tE\tb\n3\t1\tE\tc\n4\t1\tX\tc\n5\t2\tX\tb\n6\t1\tX\ta\n";
        let trace = crate::trace_model::parse_trace_str(text, ParseMode::Strict).unwrap();
        let batch = CctForest::build(&trace, BuildOptions::strict()).unwrap();
        let streamed = CctForest::read(text.as_bytes(), BuildOptions::strict()).unwrap();
        assert_eq!(batch, streamed);
        assert_eq!(batch.roots.len(), 2);
    }
}

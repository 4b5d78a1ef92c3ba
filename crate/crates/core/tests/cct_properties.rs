mod common;

use std::collections::BTreeMap;

use cct_lens::cct::{
    build_cct, deserialize_cct, deserialize_forest, merge_ccts, project_call_graph, serialize_cct,
    serialize_forest, BuildOptions, CctForest, CctNode,
};
use cct_lens::metrics::{hotspots, pct_sum, unattributed_time};
use cct_lens::trace_model::{
    format_trace, parse_trace_str, validate_trace, EventKind, MethodName, ParseMode, Trace,
    TraceEvent,
};
use num_rational::Ratio;
use proptest::prelude::*;

use common::{random_trace, span_sum, stack_replay, Aggregate};

fn forest(events: &[TraceEvent]) -> CctForest {
    CctForest::build(
        &Trace::from_events(events.iter().cloned()),
        BuildOptions::strict(),
    )
    .unwrap()
}

fn aggregate(root: &CctNode) -> Aggregate {
    let mut out = Aggregate::new();
    root.visit(&mut |path, node| {
        if path.len() > 1 {
            let e = out.entry(node.method.to_string()).or_default();
            e.0 += node.self_time();
            e.1 += node.invocations;
        }
    });
    out
}

fn self_sum(root: &CctNode) -> u64 {
    let mut sum = 0;
    root.visit(&mut |_, n| sum += n.self_time());
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_stack_replay(seed in any::<u64>()) {
        let events = random_trace(seed, 200, 8, 4);
        let merged = merge_ccts(&forest(&events));
        prop_assert_eq!(aggregate(&merged), stack_replay(&events));
    }

    #[test]
    fn self_times_sum_to_root_total(seed in any::<u64>()) {
        let events = random_trace(seed, 200, 8, 4);
        let f = forest(&events);
        for root in f.roots.values() {
            prop_assert_eq!(self_sum(root), root.total_time);
        }
        let merged = merge_ccts(&f);
        prop_assert_eq!(merged.total_time, span_sum(&events));
        prop_assert_eq!(self_sum(&merged), merged.total_time);

        let rows = hotspots(&merged);
        let rows_sum: u64 = rows.iter().map(|r| r.self_time).sum();
        prop_assert_eq!(rows_sum + unattributed_time(&merged), merged.total_time);
        if rows_sum > 0 {
            prop_assert_eq!(pct_sum(&rows), Ratio::from_integer(1));
        }
        for r in &rows {
            prop_assert_eq!(r.avg_per_invocation * r.invocations, Ratio::from_integer(r.self_time));
        }
    }

    #[test]
    fn building_is_deterministic(seed in any::<u64>()) {
        let text = format_trace(&random_trace(seed, 200, 8, 4));
        let a = CctForest::build(&parse_trace_str(&text, ParseMode::Strict).unwrap(), BuildOptions::strict()).unwrap();
        let b = CctForest::read(text.as_bytes(), BuildOptions::strict()).unwrap();
        prop_assert_eq!(serialize_forest(&a), serialize_forest(&b));
        prop_assert_eq!(serialize_cct(&merge_ccts(&a)), serialize_cct(&merge_ccts(&b)));
    }

    #[test]
    fn well_formed_traces_build_without_recovery(seed in any::<u64>()) {
        let events = random_trace(seed, 200, 8, 4);
        let trace = Trace::from_events(events);
        prop_assert!(validate_trace(&trace.threads).is_well_formed());
        let f = CctForest::build(&trace, BuildOptions::strict()).unwrap();
        prop_assert!(f.warnings.is_empty());
        let mut truncated = false;
        for root in f.roots.values() {
            root.visit(&mut |_, n| truncated |= n.truncated);
        }
        prop_assert!(!truncated);
    }

    #[test]
    fn call_graph_preserves_totals(seed in any::<u64>()) {
        let merged = merge_ccts(&forest(&random_trace(seed, 200, 8, 4)));
        let mut from_nodes: BTreeMap<String, (u64, u64)> = BTreeMap::new();
        merged.visit(&mut |path, n| {
            if path.len() > 1 {
                let e = from_nodes.entry(n.method.to_string()).or_default();
                e.0 += n.total_time;
                e.1 += n.invocations;
            }
        });
        let mut from_edges: BTreeMap<String, (u64, u64)> = BTreeMap::new();
        for edge in project_call_graph(&merged) {
            let e = from_edges.entry(edge.callee.to_string()).or_default();
            e.0 += edge.callee_total_time;
            e.1 += edge.calls;
        }
        prop_assert_eq!(from_nodes, from_edges);
    }

    #[test]
    fn nested_pair_only_grows_its_ancestors(seed in any::<u64>(), pick in any::<prop::sample::Index>(), d in 1u64..1000) {
        let events: Vec<TraceEvent> = random_trace(seed, 200, 8, 1);
        let enters: Vec<usize> = events.iter().enumerate().filter(|(_, e)| e.kind == EventKind::Enter).map(|(i, _)| i).collect();
        prop_assume!(!enters.is_empty());
        let at = enters[pick.index(enters.len())];

        // Calling context of the frame opened at `at`.
        let mut stack: Vec<MethodName> = Vec::new();
        for e in &events[..=at] {
            match e.kind {
                EventKind::Enter => stack.push(e.method.clone()),
                EventKind::Exit => { stack.pop(); }
            }
        }

        let x = MethodName::new("z.Inserted.x()").unwrap();
        let t = events[at].ts;
        let mut grown = events[..=at].to_vec();
        grown.push(TraceEvent::enter(t, 1, x.clone()));
        grown.push(TraceEvent::exit(t + d, 1, x.clone()));
        grown.extend(events[at + 1..].iter().map(|e| TraceEvent { ts: e.ts + d, ..e.clone() }));

        let before = build_cct(&events, BuildOptions::strict()).unwrap();
        let after = build_cct(&grown, BuildOptions::strict()).unwrap();

        let ctx: Vec<&str> = stack.iter().map(|m| m.as_str()).collect();
        let node = after.descend(&ctx).unwrap();
        prop_assert_eq!(node.child(x.as_str()).map(|n| n.total_time), Some(d));

        before.visit(&mut |path, old| {
            let names: Vec<&str> = path[1..].iter().map(|m| m.as_str()).collect();
            let new = after.descend(&names).expect("context survives");
            assert!(new.total_time >= old.total_time);
            let on_path = names.len() <= ctx.len() && ctx[..names.len()] == names[..];
            if on_path {
                assert_eq!(new.total_time, old.total_time + d);
            } else {
                assert_eq!(new, old);
            }
        });
    }
}

#[test]
fn serialization_round_trips_100_random_trees() {
    for seed in 0..100 {
        let f = forest(&random_trace(seed, 200, 8, 4));
        let merged = merge_ccts(&f);
        assert_eq!(deserialize_cct(&serialize_cct(&merged)).unwrap(), merged);
        let roots: Vec<CctNode> = f.roots.values().cloned().collect();
        assert_eq!(deserialize_forest(&serialize_forest(&f)).unwrap(), roots);
    }
}

#[test]
fn oracle_counts_gaps_as_nobodys_time() {
    let text = "0\t1\tE\ta\n10\t1\tX\ta\n50\t1\tE\tb\n60\t1\tX\tb\n";
    let events: Vec<TraceEvent> = parse_trace_str(text, ParseMode::Strict)
        .unwrap()
        .threads
        .remove(&1)
        .unwrap();
    let replay = stack_replay(&events);
    assert_eq!(replay["a"], (10, 1));
    assert_eq!(replay["b"], (10, 1));
    let root = build_cct(&events, BuildOptions::strict()).unwrap();
    assert_eq!(root.total_time, 60);
    assert_eq!(unattributed_time(&root), 40);
}

use super::*;
use crate::graph::{build_sdg, AnalysisConfig, Precision};
use crate::lang::{self, ResolvedProgram};
use crate::merge::{merge_members, MergeOutcome, MergeScenario};

macro_rules! fixture {
    ($name:literal) => {
        MergeScenario::from_sources(
            include_str!(concat!("../../../../corpus/", $name, "/base.mj")),
            include_str!(concat!("../../../../corpus/", $name, "/left.mj")),
            include_str!(concat!("../../../../corpus/", $name, "/right.mj")),
        )
        .unwrap()
    };
}

fn graph(outcome: &MergeOutcome, config: AnalysisConfig) -> Sdg {
    let program = outcome.merged.as_ref().unwrap();
    let entries = outcome.method_edits.iter().map(|e| program.method_named(&e.method).unwrap()).collect();
    build_sdg(program, &entries, &config).unwrap()
}

fn lines(findings: &[FlowFinding], d: Direction) -> Vec<(u32, u32)> {
    findings.iter().filter(|f| f.direction == d).map(|f| (f.source_line, f.sink_line)).collect()
}

#[test]
fn generate_bill_left_to_right() {
    let outcome = merge_members(&fixture!("generate_bill")).unwrap();
    let sdg = graph(&outcome, AnalysisConfig::default());
    let edit = &outcome.method_edits[0];
    let l2r = annotate(&sdg, edit, AnnotationDirection::L2R).unwrap();
    let r2l = annotate(&sdg, edit, AnnotationDirection::R2L).unwrap();
    assert_eq!((l2r.sources.clone(), l2r.sinks.clone()), (r2l.sinks.clone(), r2l.sources.clone()));
    assert!(l2r.sources.iter().all(|&n| [5, 6].contains(&sdg.node(n).line)));
    assert!(l2r.sinks.iter().all(|&n| sdg.node(n).line == 9));
    assert!(l2r.sources.is_disjoint(&l2r.sinks));

    let findings = direct_flow(&sdg, edit).unwrap();
    assert_eq!(lines(&findings, Direction::LeftToRight), vec![(5, 9), (6, 9)]);
    assert!(lines(&findings, Direction::RightToLeft).is_empty());
    for f in &findings {
        let (first, last) = (f.witness.first().unwrap(), f.witness.last().unwrap());
        assert_eq!((first.line, last.line), (f.source_line, f.sink_line));
        assert!(first.via.is_none());
    }
}

#[test]
fn dominates_flow_is_control_dependence() {
    let outcome = merge_members(&fixture!("dominates")).unwrap();
    assert_eq!(outcome.method_edits.len(), 1);
    let edit = &outcome.method_edits[0];
    assert_eq!(edit.right_lines, [11].into());
    let sdg = graph(&outcome, AnalysisConfig::default());
    let findings = direct_flow(&sdg, edit).unwrap();
    let l2r: Vec<&FlowFinding> = findings.iter().filter(|f| f.direction == Direction::LeftToRight).collect();
    assert!(!l2r.is_empty());
    assert!(l2r.iter().all(|f| f.sink_line == 11));
    assert!(l2r.iter().any(|f| f.witness_uses(EdgeKind::ControlDep)));
}

#[test]
fn outer_html_has_only_a_common_target() {
    let outcome = merge_members(&fixture!("outer_html")).unwrap();
    let sdg = graph(&outcome, AnalysisConfig::default());
    let edit = &outcome.method_edits[0];
    assert!(direct_flow(&sdg, edit).unwrap().is_empty());
    let base = base_nodes(&sdg, edit, &outcome.attribution).unwrap();
    let indirect = indirect_flow(&sdg, edit, &base).unwrap();
    let append_line = outcome.merged_text.lines().position(|l| l.trim() == "accum.append(html);").unwrap() as u32 + 1;
    let f = indirect.iter().find(|f| f.sink_line == append_line).expect("common target at the append call");
    assert_eq!((f.source_line, f.right_line), (3, Some(5)));
    let result = analyze_edit(&sdg, edit, &outcome.attribution);
    assert_eq!(result.status, MethodStatus::FlowFound);
    assert_eq!((result.left_to_right, result.right_to_left), (0, 0));
    assert!(result.indirect >= 1);
}

#[test]
fn indirect_is_empty_when_direct_flow_exists() {
    let outcome = merge_members(&fixture!("generate_bill")).unwrap();
    let sdg = graph(&outcome, AnalysisConfig::default());
    let edit = &outcome.method_edits[0];
    let base = base_nodes(&sdg, edit, &outcome.attribution).unwrap();
    assert!(indirect_flow(&sdg, edit, &base).unwrap().is_empty());
}

#[test]
fn comment_line_has_no_instructions() {
    let outcome = merge_members(&fixture!("comment_only")).unwrap();
    let sdg = graph(&outcome, AnalysisConfig::default());
    let edit = &outcome.method_edits[0];
    assert!(matches!(annotate(&sdg, edit, AnnotationDirection::L2R), Err(IfcError::NoSourceOrSink { side: "left", .. })));
    assert_eq!(analyze_edit(&sdg, edit, &outcome.attribution).status, MethodStatus::NoSourceOrSink);
}

#[test]
fn independent_edits_have_no_flow() {
    let outcome = merge_members(&fixture!("independent_edits")).unwrap();
    let sdg = graph(&outcome, AnalysisConfig::default());
    let result = analyze_edit(&sdg, &outcome.method_edits[0], &outcome.attribution);
    assert_eq!(result.status, MethodStatus::NoFlow);
    assert!(result.findings.is_empty());
}

#[test]
fn swapping_sides_swaps_directions() {
    for s in [fixture!("generate_bill"), fixture!("dominates"), fixture!("outer_html"), fixture!("loop_flow")] {
        let a = merge_members(&s).unwrap();
        let b = merge_members(&s.swapped()).unwrap();
        let ra = analyze_edit(&graph(&a, AnalysisConfig::default()), &a.method_edits[0], &a.attribution);
        let rb = analyze_edit(&graph(&b, AnalysisConfig::default()), &b.method_edits[0], &b.attribution);
        assert_eq!(lines(&ra.findings, Direction::LeftToRight), lines(&rb.findings, Direction::RightToLeft));
        assert_eq!(lines(&ra.findings, Direction::RightToLeft), lines(&rb.findings, Direction::LeftToRight));
        let targets = |r: &MethodResult| -> Vec<u32> { r.findings.iter().filter(|f| f.direction == Direction::IndirectCommonTarget).map(|f| f.sink_line).collect() };
        assert_eq!(targets(&ra), targets(&rb));
    }
}

#[test]
fn translate_deduplicates_and_sorts() {
    let f = |d, s, t, w: usize| FlowFinding {
        direction: d,
        source_line: s,
        sink_line: t,
        right_line: None,
        witness: vec![
            WitnessStep { node: NodeId(0), kind: NodeKind::Statement, line: s, method: "A.m".into(), via: None };
            w
        ],
    };
    let out = translate(vec![f(Direction::RightToLeft, 9, 5, 2), f(Direction::LeftToRight, 5, 9, 3), f(Direction::LeftToRight, 5, 9, 2)]);
    assert_eq!(out.len(), 2);
    assert_eq!((out[0].direction, out[0].witness.len()), (Direction::LeftToRight, 2));
    assert!(translate(Vec::new()).is_empty());
}

fn load(src: &str) -> ResolvedProgram {
    lang::load(src, "t.mj").unwrap()
}

#[test]
fn slice_of_isolated_node_and_chain() {
    let p = load("class A {\n  int f;\n  void m(int a) {\n    int b = a;\n    int c = b;\n    f = 1;\n  }\n}\n");
    let sdg = build_sdg(&p, &[p.method_named("A.m").unwrap()].into(), &AnalysisConfig::default()).unwrap();
    let on_line = |l: u32| sdg.nodes().iter().find(|n| n.line == l && n.kind == NodeKind::Statement).unwrap().id;
    let s = forward_slice(&sdg, &[on_line(4)].into());
    assert!(s.contains(&on_line(5)));
    assert!(!s.contains(&on_line(6)));
    let s6 = forward_slice(&sdg, &[on_line(6)].into());
    assert!(s6.iter().all(|&n| n == on_line(6) || sdg.node(n).kind == NodeKind::FormalOut));
}

#[test]
fn two_call_sites_are_not_conflated() {
    let src = "class A {
  int id(int x) {
    return x;
  }
  int run(int p, int q) {
    int a = this.id(p);
    int b = this.id(q);
    return a;
  }
}
";
    let p = load(src);
    let sdg = build_sdg(&p, &[p.method_named("A.run").unwrap()].into(), &AnalysisConfig::default()).unwrap();
    let stmt = |l: u32| sdg.nodes().iter().find(|n| n.line == l && n.kind == NodeKind::Statement).unwrap().id;
    let param_p = sdg.nodes().iter().find(|n| n.kind == NodeKind::FormalIn && n.label == "p").unwrap().id;
    let slice = forward_slice(&sdg, &[param_p].into());
    assert!(slice.contains(&stmt(6)));
    assert!(!slice.contains(&stmt(7)));
    // Plain reachability would reach the second call site through the callee.
    let mut seen = BTreeSet::from([param_p]);
    let mut work = vec![param_p];
    while let Some(u) = work.pop() {
        for &(v, _) in sdg.succs(u) {
            if seen.insert(v) {
                work.push(v);
            }
        }
    }
    assert!(seen.contains(&stmt(7)));
}

#[test]
fn type_based_precision_adds_flow_through_unrealizable_callee() {
    let s = fixture!("virtual_dispatch");
    let outcome = merge_members(&s).unwrap();
    let edit = &outcome.method_edits[0];
    let ty = analyze_edit(&graph(&outcome, AnalysisConfig::new(false, Precision::TypeBased)), edit, &outcome.attribution);
    let inst = analyze_edit(&graph(&outcome, AnalysisConfig::new(false, Precision::InstanceBased)), edit, &outcome.attribution);
    assert_eq!(ty.left_to_right, 1);
    assert_eq!(inst.status, MethodStatus::NoFlow);
}

#[test]
fn exception_edge_is_the_only_flow() {
    let outcome = merge_members(&fixture!("exception_only")).unwrap();
    let edit = &outcome.method_edits[0];
    let off = analyze_edit(&graph(&outcome, AnalysisConfig::new(false, Precision::InstanceBased)), edit, &outcome.attribution);
    let on = analyze_edit(&graph(&outcome, AnalysisConfig::new(true, Precision::InstanceBased)), edit, &outcome.attribution);
    assert_eq!(off.status, MethodStatus::NoFlow);
    assert_eq!(on.left_to_right, 1);
    assert!(on.findings[0].witness_uses(EdgeKind::ExceptionControl));
}

#[test]
fn overwrite_without_read_is_invisible() {
    let outcome = merge_members(&fixture!("overwrite")).unwrap();
    for exceptions in [false, true] {
        for prec in [Precision::TypeBased, Precision::InstanceBased] {
            let sdg = graph(&outcome, AnalysisConfig::new(exceptions, prec));
            let r = analyze_edit(&sdg, &outcome.method_edits[0], &outcome.attribution);
            assert_eq!(r.status, MethodStatus::NoFlow);
        }
    }
}

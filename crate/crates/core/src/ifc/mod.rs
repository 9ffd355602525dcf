//! Information-flow checks between the two contributions of a same-method edit.
//!
//! Nodes on lines edited by one side are sources, nodes on lines edited by
//! the other are sinks. A direct flow is a sink inside the forward slice of a
//! source. When no direct flow exists in either direction, both sides are
//! sliced separately and unedited instructions reached by both are reported
//! as common targets.

mod slice;

pub use slice::{forward_slice, Slice, WitnessStep};

use crate::graph::{EdgeKind, NodeId, NodeKind, Sdg};
use crate::lang::ir::MethodId;
use crate::merge::{LineAttribution, MethodEdit, Origin};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
    IndirectCommonTarget,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::LeftToRight => "LEFT_TO_RIGHT",
            Direction::RightToLeft => "RIGHT_TO_LEFT",
            Direction::IndirectCommonTarget => "INDIRECT_COMMON_TARGET",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AnnotationDirection {
    /// Left lines are sources, right lines sinks.
    L2R,
    R2L,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IfcError {
    #[error("no instructions found on the {side} lines of `{method}`")]
    NoSourceOrSink { method: String, side: &'static str },
    #[error("method `{0}` is not part of the graph")]
    UnknownMethod(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub method: MethodId,
    pub direction: AnnotationDirection,
    pub sources: BTreeSet<NodeId>,
    pub sinks: BTreeSet<NodeId>,
}

/// A flow between source lines of the merged program.
///
/// For common-target findings `source_line` is the contributing left line,
/// `sink_line` the target line and `right_line` the contributing right line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowFinding {
    pub direction: Direction,
    pub source_line: u32,
    pub sink_line: u32,
    pub right_line: Option<u32>,
    pub witness: Vec<WitnessStep>,
}

impl FlowFinding {
    fn sort_key(&self) -> (Direction, u32, u32, Option<u32>) {
        (self.direction, self.source_line, self.sink_line, self.right_line)
    }

    /// True when the witness path uses an edge of the given kind.
    pub fn witness_uses(&self, kind: EdgeKind) -> bool {
        self.witness.iter().any(|s| s.via == Some(kind))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MethodStatus {
    FlowFound,
    NoFlow,
    NoSourceOrSink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub status: MethodStatus,
    pub findings: Vec<FlowFinding>,
    pub left_to_right: usize,
    pub right_to_left: usize,
    pub indirect: usize,
}

fn method_id(sdg: &Sdg, name: &str) -> Result<MethodId, IfcError> {
    sdg.methods().find(|&m| sdg.method_name(m) == name).ok_or_else(|| IfcError::UnknownMethod(name.to_string()))
}

fn nodes_on(sdg: &Sdg, method: MethodId, lines: &BTreeSet<u32>) -> BTreeSet<NodeId> {
    sdg.nodes_of_method(method).filter(|n| lines.contains(&n.line)).map(|n| n.id).collect()
}

/// Marks the edit method's nodes on one side's lines as sources and on the
/// other side's lines as sinks.
pub fn annotate(sdg: &Sdg, edit: &MethodEdit, direction: AnnotationDirection) -> Result<Annotation, IfcError> {
    let method = method_id(sdg, &edit.method)?;
    let left = nodes_on(sdg, method, &edit.left_lines);
    let right = nodes_on(sdg, method, &edit.right_lines);
    for (nodes, side) in [(&left, "left"), (&right, "right")] {
        if nodes.is_empty() {
            return Err(IfcError::NoSourceOrSink { method: edit.method.clone(), side });
        }
    }
    let (sources, sinks) = match direction {
        AnnotationDirection::L2R => (left, right),
        AnnotationDirection::R2L => (right, left),
    };
    Ok(Annotation { method, direction, sources, sinks })
}

fn by_line(sdg: &Sdg, nodes: &BTreeSet<NodeId>) -> BTreeMap<u32, BTreeSet<NodeId>> {
    let mut out: BTreeMap<u32, BTreeSet<NodeId>> = BTreeMap::new();
    for &n in nodes {
        out.entry(sdg.node(n).line).or_default().insert(n);
    }
    out
}

fn direct_one_way(sdg: &Sdg, ann: &Annotation) -> Vec<FlowFinding> {
    let direction = match ann.direction {
        AnnotationDirection::L2R => Direction::LeftToRight,
        AnnotationDirection::R2L => Direction::RightToLeft,
    };
    let sinks = by_line(sdg, &ann.sinks);
    let mut findings = Vec::new();
    for (source_line, starts) in by_line(sdg, &ann.sources) {
        let slice = Slice::compute(sdg, &starts);
        for (&sink_line, nodes) in &sinks {
            if let Some(&hit) = nodes.iter().find(|&&n| slice.contains(n)) {
                let witness = slice.witness(sdg, hit).unwrap_or_default();
                findings.push(FlowFinding { direction, source_line, sink_line, right_line: None, witness });
            }
        }
    }
    findings
}

/// Direct flows in both directions, one finding per (source line, sink line).
pub fn direct_flow(sdg: &Sdg, edit: &MethodEdit) -> Result<Vec<FlowFinding>, IfcError> {
    let l2r = annotate(sdg, edit, AnnotationDirection::L2R)?;
    let r2l = annotate(sdg, edit, AnnotationDirection::R2L)?;
    let mut findings = direct_one_way(sdg, &l2r);
    findings.extend(direct_one_way(sdg, &r2l));
    Ok(translate(findings))
}

/// Instructions of the edit method and of every method it may call,
/// excluding lines either contribution edited.
pub fn base_nodes(sdg: &Sdg, edit: &MethodEdit, attribution: &LineAttribution) -> Result<BTreeSet<NodeId>, IfcError> {
    let root = method_id(sdg, &edit.method)?;
    let mut region = BTreeSet::from([root]);
    let mut work = vec![root];
    while let Some(m) = work.pop() {
        for n in sdg.nodes_of_method(m).filter(|n| n.kind == NodeKind::Call) {
            for &(t, k) in sdg.succs(n.id) {
                if k == EdgeKind::Call && region.insert(sdg.node(t).method) {
                    work.push(sdg.node(t).method);
                }
            }
        }
    }
    let edited = |line: u32| edit.left_lines.contains(&line) || edit.right_lines.contains(&line) || attribution.origin(line) != Origin::Base;
    Ok(sdg
        .nodes()
        .iter()
        .filter(|n| region.contains(&n.method) && n.kind.is_instruction() && !edited(n.line))
        .map(|n| n.id)
        .collect())
}

/// Common targets of both contributions among `base_nodes`. Returns no
/// findings when a direct flow exists in either direction.
pub fn indirect_flow(sdg: &Sdg, edit: &MethodEdit, base_nodes: &BTreeSet<NodeId>) -> Result<Vec<FlowFinding>, IfcError> {
    let ann = annotate(sdg, edit, AnnotationDirection::L2R)?;
    let (left, right) = (&ann.sources, &ann.sinks);
    let left_all = Slice::compute(sdg, left);
    let right_all = Slice::compute(sdg, right);
    if right.iter().any(|&n| left_all.contains(n)) || left.iter().any(|&n| right_all.contains(n)) {
        return Ok(Vec::new());
    }
    let common: BTreeSet<NodeId> = base_nodes.iter().copied().filter(|&n| left_all.contains(n) && right_all.contains(n)).collect();
    if common.is_empty() {
        return Ok(Vec::new());
    }
    let left_slices: Vec<(u32, Slice)> = by_line(sdg, left).into_iter().map(|(l, ns)| (l, Slice::compute(sdg, &ns))).collect();
    let right_slices: Vec<(u32, Slice)> = by_line(sdg, right).into_iter().map(|(l, ns)| (l, Slice::compute(sdg, &ns))).collect();
    let mut findings = Vec::new();
    for (target_line, nodes) in by_line(sdg, &common) {
        fn first_hit<'s>(slices: &'s [(u32, Slice)], nodes: &BTreeSet<NodeId>) -> Option<(u32, &'s Slice, NodeId)> {
            slices.iter().find_map(|(line, s)| nodes.iter().find(|&&n| s.contains(n)).map(|&n| (*line, s, n)))
        }
        let (Some((left_line, slice, hit)), Some((right_line, _, _))) = (first_hit(&left_slices, &nodes), first_hit(&right_slices, &nodes)) else {
            continue;
        };
        findings.push(FlowFinding {
            direction: Direction::IndirectCommonTarget,
            source_line: left_line,
            sink_line: target_line,
            right_line: Some(right_line),
            witness: slice.witness(sdg, hit).unwrap_or_default(),
        });
    }
    Ok(translate(findings))
}

/// Collapses findings with equal line endpoints (keeping the shorter
/// witness) and sorts them by direction and lines.
pub fn translate(findings: Vec<FlowFinding>) -> Vec<FlowFinding> {
    let mut best: BTreeMap<(Direction, u32, u32, Option<u32>), FlowFinding> = BTreeMap::new();
    for f in findings {
        match best.get(&f.sort_key()) {
            Some(existing) if existing.witness.len() <= f.witness.len() => {}
            _ => {
                best.insert(f.sort_key(), f);
            }
        }
    }
    best.into_values().collect()
}

/// Direct analysis followed, when it finds nothing, by the common-target analysis.
pub fn analyze_edit(sdg: &Sdg, edit: &MethodEdit, attribution: &LineAttribution) -> MethodResult {
    let mut result = MethodResult {
        method: edit.method.clone(),
        status: MethodStatus::NoSourceOrSink,
        findings: Vec::new(),
        left_to_right: 0,
        right_to_left: 0,
        indirect: 0,
    };
    let Ok(direct) = direct_flow(sdg, edit) else { return result };
    let findings = if direct.is_empty() {
        match base_nodes(sdg, edit, attribution).and_then(|base| indirect_flow(sdg, edit, &base)) {
            Ok(f) => f,
            Err(_) => return result,
        }
    } else {
        direct
    };
    let count = |d: Direction| findings.iter().filter(|f| f.direction == d).count();
    result.left_to_right = count(Direction::LeftToRight);
    result.right_to_left = count(Direction::RightToLeft);
    result.indirect = count(Direction::IndirectCommonTarget);
    result.status = if findings.is_empty() { MethodStatus::NoFlow } else { MethodStatus::FlowFound };
    result.findings = findings;
    result
}

#[cfg(test)]
mod tests;

//! Context-sensitive forward slicing.

use crate::graph::{EdgeKind, NodeId, NodeKind, Sdg};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Forward slice of `start`: nodes reachable along realizable paths.
///
/// The first phase never descends into a callee (no call or param-in
/// edges) but may return to callers and jump over calls along summary
/// edges. The second phase starts from everything found so far and
/// descends into callees without returning (no param-out edges).
pub fn forward_slice(sdg: &Sdg, start: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    Slice::compute(sdg, start).nodes()
}

/// One step of a witness path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    pub node: NodeId,
    pub kind: NodeKind,
    pub line: u32,
    pub method: String,
    /// Edge taken to reach this node; `None` for the first step.
    pub via: Option<EdgeKind>,
}

/// A computed slice that remembers how each node was first reached.
#[derive(Debug, Clone)]
pub struct Slice {
    parent: BTreeMap<NodeId, Option<(NodeId, EdgeKind)>>,
}

impl Slice {
    pub fn compute(sdg: &Sdg, start: &BTreeSet<NodeId>) -> Self {
        let mut parent: BTreeMap<NodeId, Option<(NodeId, EdgeKind)>> = start.iter().map(|&n| (n, None)).collect();
        let mut queue: VecDeque<NodeId> = start.iter().copied().collect();
        let phase1 = |k: EdgeKind| !matches!(k, EdgeKind::ParamIn | EdgeKind::Call);
        let phase2 = |k: EdgeKind| k != EdgeKind::ParamOut;
        Self::bfs(sdg, &mut parent, &mut queue, phase1);
        let mut queue: VecDeque<NodeId> = parent.keys().copied().collect();
        Self::bfs(sdg, &mut parent, &mut queue, phase2);
        Slice { parent }
    }

    fn bfs(
        sdg: &Sdg,
        parent: &mut BTreeMap<NodeId, Option<(NodeId, EdgeKind)>>,
        queue: &mut VecDeque<NodeId>,
        follow: impl Fn(EdgeKind) -> bool,
    ) {
        while let Some(u) = queue.pop_front() {
            for &(v, k) in sdg.succs(u) {
                if follow(k) && !parent.contains_key(&v) {
                    parent.insert(v, Some((u, k)));
                    queue.push_back(v);
                }
            }
        }
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.parent.contains_key(&n)
    }

    pub fn nodes(&self) -> BTreeSet<NodeId> {
        self.parent.keys().copied().collect()
    }

    /// Path from a start node to `n`, or `None` when `n` is not in the slice.
    pub fn witness(&self, sdg: &Sdg, n: NodeId) -> Option<Vec<WitnessStep>> {
        let mut steps = Vec::new();
        let mut cur = n;
        loop {
            let link = *self.parent.get(&cur)?;
            let node = sdg.node(cur);
            steps.push(WitnessStep {
                node: cur,
                kind: node.kind,
                line: node.line,
                method: sdg.method_name(node.method).to_string(),
                via: link.map(|(_, k)| k),
            });
            match link {
                Some((p, _)) => cur = p,
                None => break,
            }
        }
        steps.reverse();
        Some(steps)
    }
}

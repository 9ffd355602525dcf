//! Summary edges by the Horwitz-Reps-Binkley worklist algorithm.

use super::sdg::{EdgeKind, NodeId, NodeKind, Sdg};
use super::GraphError;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Instant;

/// Actual-in/actual-out pairs `(a_in, a_out)` at the same call site such
/// that the callee's matching formal-in reaches its formal-out through
/// intraprocedural and summary edges.
pub fn summary_edges(sdg: &Sdg, deadline: Option<Instant>) -> Result<BTreeSet<(NodeId, NodeId)>, GraphError> {
    let mut path: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    // For an actual-out `a`, the formal-outs `w` with (a, w) path edges.
    let mut reaching_from: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    let mut summaries: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    // Summary edges into an actual-out found so far, used as extra predecessors.
    let mut summary_preds: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut work = VecDeque::new();

    let propagate = |v: NodeId, w: NodeId, path: &mut BTreeSet<(NodeId, NodeId)>, work: &mut VecDeque<(NodeId, NodeId)>| {
        if path.insert((v, w)) {
            work.push_back((v, w));
        }
    };

    for n in sdg.nodes() {
        if n.kind == NodeKind::FormalOut {
            propagate(n.id, n.id, &mut path, &mut work);
        }
    }
    let mut steps = 0u32;
    while let Some((v, w)) = work.pop_front() {
        steps = steps.wrapping_add(1);
        if steps.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() > d) {
            return Err(GraphError::Timeout);
        }
        let vn = sdg.node(v);
        if vn.kind == NodeKind::ActualOut {
            reaching_from.entry(v).or_default().insert(w);
        }
        if vn.kind == NodeKind::FormalIn {
            let outs: Vec<NodeId> = sdg.succs(w).iter().filter(|(_, k)| *k == EdgeKind::ParamOut).map(|&(n, _)| n).collect();
            for &(ai, k) in sdg.preds(v) {
                if k != EdgeKind::ParamIn {
                    continue;
                }
                let site = sdg.node(ai).site;
                for &ao in &outs {
                    if sdg.node(ao).site != site || !summaries.insert((ai, ao)) {
                        continue;
                    }
                    summary_preds.entry(ao).or_default().push(ai);
                    for &x in reaching_from.get(&ao).into_iter().flatten() {
                        propagate(ai, x, &mut path, &mut work);
                    }
                }
            }
        } else {
            for &(u, k) in sdg.preds(v) {
                if k.is_intraprocedural() {
                    propagate(u, w, &mut path, &mut work);
                }
            }
            for &u in summary_preds.get(&v).into_iter().flatten() {
                propagate(u, w, &mut path, &mut work);
            }
        }
    }
    Ok(summaries)
}

//! Dependence graphs of merged programs: control-flow graphs, control and
//! data dependence, points-to and call graphs, and the interprocedural
//! system dependence graph with summary edges.

pub mod call_graph;
pub mod cfg;
pub mod control;
pub mod dataflow;
pub mod dot;
pub mod points_to;
pub mod sdg;
pub mod summary;

pub use call_graph::{build_call_graph, CallGraph, FieldKey};
pub use cfg::{build_cfg, Cfg};
pub use control::control_dependence;
pub use dataflow::reaching_definitions;
pub use points_to::points_to;
pub use sdg::{build_sdg, build_sdg_until, EdgeKind, NodeId, NodeKey, NodeKind, Sdg, SdgBuilder, SdgEdge, SdgNode, Slot};
pub use summary::summary_edges;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Call-graph precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Precision {
    /// Class-hierarchy resolution on the receiver's static type.
    TypeBased,
    /// Resolution restricted to the classes in the receiver's points-to set.
    InstanceBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub exceptions: bool,
    pub precision: Precision,
    pub node_limit: usize,
    pub edge_limit: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { exceptions: false, precision: Precision::InstanceBased, node_limit: 200_000, edge_limit: 2_000_000 }
    }
}

impl AnalysisConfig {
    pub fn new(exceptions: bool, precision: Precision) -> Self {
        Self { exceptions, precision, ..Self::default() }
    }

    /// Short identifier such as `instance_noexc`, independent of the limits.
    pub fn id(&self) -> String {
        let p = match self.precision {
            Precision::TypeBased => "type",
            Precision::InstanceBased => "instance",
        };
        let e = if self.exceptions { "exc" } else { "noexc" };
        format!("{p}_{e}")
    }

    /// Inverse of [`AnalysisConfig::id`], with default limits.
    pub fn from_id(id: &str) -> Option<Self> {
        let (p, e) = id.split_once('_')?;
        let precision = match p {
            "type" => Precision::TypeBased,
            "instance" => Precision::InstanceBased,
            _ => return None,
        };
        let exceptions = match e {
            "exc" => true,
            "noexc" => false,
            _ => return None,
        };
        Some(Self::new(exceptions, precision))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitKind {
    Nodes,
    Edges,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Nodes => "nodes",
            LimitKind::Edges => "edges",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph too heavy: more than {limit} {kind}")]
    TooHeavy { kind: LimitKind, limit: usize },
    #[error("time limit exceeded while building the graph")]
    Timeout,
    #[error("no entry points given")]
    NoEntryPoints,
}

//! The system dependence graph and its construction.

use super::call_graph::{FieldKey, Resolver};
use super::cfg::{build_cfg, Cfg, CfgNodeKind};
use super::control::control_dependence_raw;
use super::dataflow::{reaching_definitions, Event};
use super::summary::summary_edges;
use super::{AnalysisConfig, GraphError, LimitKind};
use crate::lang::ir::{CallSiteId, Expr, ExprKind, LocalId, MethodId, MethodInfo, ResolvedProgram, StmtKind, Type};
use log::debug;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeKind {
    Entry,
    Statement,
    Predicate,
    Call,
    ActualIn,
    ActualOut,
    FormalIn,
    FormalOut,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Entry => "entry",
            NodeKind::Statement => "statement",
            NodeKind::Predicate => "predicate",
            NodeKind::Call => "call",
            NodeKind::ActualIn => "actual-in",
            NodeKind::ActualOut => "actual-out",
            NodeKind::FormalIn => "formal-in",
            NodeKind::FormalOut => "formal-out",
        }
    }

    /// Nodes that stand for code inside a method body, as opposed to its interface.
    pub fn is_instruction(self) -> bool {
        matches!(self, NodeKind::Statement | NodeKind::Predicate | NodeKind::Call | NodeKind::ActualIn | NodeKind::ActualOut)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeKind {
    ControlDep,
    DataDep,
    Call,
    ParamIn,
    ParamOut,
    Summary,
    ExceptionControl,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 7] = [
        EdgeKind::ControlDep,
        EdgeKind::DataDep,
        EdgeKind::Call,
        EdgeKind::ParamIn,
        EdgeKind::ParamOut,
        EdgeKind::Summary,
        EdgeKind::ExceptionControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::ControlDep => "control-dep",
            EdgeKind::DataDep => "data-dep",
            EdgeKind::Call => "call",
            EdgeKind::ParamIn => "param-in",
            EdgeKind::ParamOut => "param-out",
            EdgeKind::Summary => "summary",
            EdgeKind::ExceptionControl => "exception-control",
        }
    }

    /// Edges that stay inside one method.
    pub fn is_intraprocedural(self) -> bool {
        matches!(self, EdgeKind::ControlDep | EdgeKind::DataDep | EdgeKind::Summary | EdgeKind::ExceptionControl)
    }

    pub fn is_control(self) -> bool {
        matches!(self, EdgeKind::ControlDep | EdgeKind::ExceptionControl)
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The value an actual or formal parameter node carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Slot {
    This,
    Param(u32),
    Field(FieldKey),
    Ret,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SdgNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub method: MethodId,
    pub line: u32,
    /// Call site of call and actual nodes.
    pub site: Option<CallSiteId>,
    pub slot: Option<Slot>,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SdgEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
}

/// Identity of a node that does not depend on construction order details:
/// method, kind, line, label, and an ordinal among nodes sharing the rest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeKey {
    pub method: String,
    pub kind: NodeKind,
    pub line: u32,
    pub label: String,
    pub ordinal: u32,
}

#[derive(Debug, Clone)]
pub struct Sdg {
    nodes: Vec<SdgNode>,
    edges: BTreeSet<SdgEdge>,
    out: Vec<Vec<(NodeId, EdgeKind)>>,
    inc: Vec<Vec<(NodeId, EdgeKind)>>,
    entry_points: BTreeSet<MethodId>,
    entries: BTreeMap<MethodId, NodeId>,
    method_names: BTreeMap<MethodId, String>,
    edge_limit: usize,
}

impl Sdg {
    pub fn nodes(&self) -> &[SdgNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &SdgNode {
        &self.nodes[id.index()]
    }

    pub fn edges(&self) -> &BTreeSet<SdgEdge> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn succs(&self, id: NodeId) -> &[(NodeId, EdgeKind)] {
        &self.out[id.index()]
    }

    pub fn preds(&self, id: NodeId) -> &[(NodeId, EdgeKind)] {
        &self.inc[id.index()]
    }

    pub fn entry_points(&self) -> &BTreeSet<MethodId> {
        &self.entry_points
    }

    pub fn entry_node(&self, method: MethodId) -> Option<NodeId> {
        self.entries.get(&method).copied()
    }

    /// Methods with nodes in the graph.
    pub fn methods(&self) -> impl Iterator<Item = MethodId> + '_ {
        self.entries.keys().copied()
    }

    pub fn method_name(&self, method: MethodId) -> &str {
        self.method_names.get(&method).map(String::as_str).unwrap_or("?")
    }

    pub fn nodes_of_method(&self, method: MethodId) -> impl Iterator<Item = &SdgNode> + '_ {
        self.nodes.iter().filter(move |n| n.method == method)
    }

    pub fn count_edges(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn node_keys(&self) -> Vec<NodeKey> {
        let mut seen: BTreeMap<(MethodId, NodeKind, u32, &str), u32> = BTreeMap::new();
        self.nodes
            .iter()
            .map(|n| {
                let ord = seen.entry((n.method, n.kind, n.line, n.label.as_str())).or_default();
                let key = NodeKey {
                    method: self.method_name(n.method).to_string(),
                    kind: n.kind,
                    line: n.line,
                    label: n.label.clone(),
                    ordinal: *ord,
                };
                *ord += 1;
                key
            })
            .collect()
    }

    /// Edges expressed over [`NodeKey`]s, for comparing graphs built under different configurations.
    pub fn keyed_edges(&self) -> BTreeSet<(NodeKey, NodeKey, EdgeKind)> {
        let keys = self.node_keys();
        self.edges.iter().map(|e| (keys[e.from.index()].clone(), keys[e.to.index()].clone(), e.kind)).collect()
    }

    fn insert_edge(&mut self, edge: SdgEdge) -> Result<bool, GraphError> {
        if edge.from == edge.to || self.edges.contains(&edge) {
            return Ok(false);
        }
        if self.edges.len() >= self.edge_limit {
            return Err(GraphError::TooHeavy { kind: LimitKind::Edges, limit: self.edge_limit });
        }
        self.edges.insert(edge);
        self.out[edge.from.index()].push((edge.to, edge.kind));
        self.inc[edge.to.index()].push((edge.from, edge.kind));
        Ok(true)
    }

    /// Adds summary edges for the given actual-in/actual-out pairs.
    pub fn add_summary_edges(&mut self, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<usize, GraphError> {
        let mut added = 0;
        for (from, to) in pairs {
            added += usize::from(self.insert_edge(SdgEdge { from, to, kind: EdgeKind::Summary })?);
        }
        Ok(added)
    }
}

/// Incremental construction with limit and deadline checks.
#[derive(Debug)]
pub struct SdgBuilder {
    sdg: Sdg,
    node_limit: usize,
    deadline: Option<Instant>,
    ops: u32,
}

impl SdgBuilder {
    pub fn new(node_limit: usize, edge_limit: usize) -> Self {
        Self {
            sdg: Sdg {
                nodes: Vec::new(),
                edges: BTreeSet::new(),
                out: Vec::new(),
                inc: Vec::new(),
                entry_points: BTreeSet::new(),
                entries: BTreeMap::new(),
                method_names: BTreeMap::new(),
                edge_limit,
            },
            node_limit,
            deadline: None,
            ops: 0,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    fn tick(&mut self) -> Result<(), GraphError> {
        self.ops = self.ops.wrapping_add(1);
        if self.ops.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(GraphError::Timeout);
        }
        Ok(())
    }

    pub fn add_node(
        &mut self,
        kind: NodeKind,
        method: MethodId,
        line: u32,
        site: Option<CallSiteId>,
        slot: Option<Slot>,
        label: impl Into<String>,
    ) -> Result<NodeId, GraphError> {
        self.tick()?;
        if self.sdg.nodes.len() >= self.node_limit {
            return Err(GraphError::TooHeavy { kind: LimitKind::Nodes, limit: self.node_limit });
        }
        let id = NodeId(self.sdg.nodes.len() as u32);
        self.sdg.nodes.push(SdgNode { id, kind, method, line, site, slot, label: label.into() });
        self.sdg.out.push(Vec::new());
        self.sdg.inc.push(Vec::new());
        if kind == NodeKind::Entry {
            self.sdg.entries.insert(method, id);
        }
        Ok(id)
    }

    /// Adds an edge; self-loops and duplicates are ignored.
    pub fn add_edge(&mut self, from: NodeId, to: NodeId, kind: EdgeKind) -> Result<(), GraphError> {
        self.tick()?;
        self.sdg.insert_edge(SdgEdge { from, to, kind }).map(|_| ())
    }

    pub fn name_method(&mut self, method: MethodId, name: impl Into<String>) {
        self.sdg.method_names.insert(method, name.into());
    }

    pub fn finish(mut self, entry_points: BTreeSet<MethodId>) -> Sdg {
        self.sdg.entry_points = entry_points;
        self.sdg
    }
}

/// Builds the SDG of every method reachable from `entries`, with summary edges.
pub fn build_sdg(program: &ResolvedProgram, entries: &BTreeSet<MethodId>, config: &AnalysisConfig) -> Result<Sdg, GraphError> {
    build_sdg_until(program, entries, config, None)
}

/// [`build_sdg`] that gives up with [`GraphError::Timeout`] after `deadline`.
pub fn build_sdg_until(
    program: &ResolvedProgram,
    entries: &BTreeSet<MethodId>,
    config: &AnalysisConfig,
    deadline: Option<Instant>,
) -> Result<Sdg, GraphError> {
    if entries.is_empty() {
        return Err(GraphError::NoEntryPoints);
    }
    let resolver = Resolver::new(program, config.precision);
    let reachable = resolver.call_graph.reachable(program, entries);
    let (refs, mods) = mod_ref(program, &resolver, &reachable);
    let mut b = SdgBuilder::new(config.node_limit, config.edge_limit).with_deadline(deadline);

    let mut formals = BTreeMap::new();
    for &m in &reachable {
        let info = program.method(m);
        b.name_method(m, &info.qualified_name);
        formals.insert(m, add_formals(&mut b, info, &refs[&m], &mods[&m])?);
    }
    let mut sites = Vec::new();
    for &m in &reachable {
        let info = program.method(m);
        let mut cx = BodyCx { b: &mut b, resolver: &resolver, method: info, refs: &refs, mods: &mods, sites: &mut sites };
        cx.build(&formals[&m], config.exceptions)?;
    }
    for site in &sites {
        for t in resolver.call_graph.targets_of(site.site) {
            let f = &formals[&t];
            b.add_edge(site.call, f.entry, EdgeKind::Call)?;
            for (slot, ai) in &site.ins {
                if let Some(&fi) = f.ins.get(slot) {
                    b.add_edge(*ai, fi, EdgeKind::ParamIn)?;
                }
            }
            for (slot, ao) in &site.outs {
                if let Some(&fo) = f.outs.get(slot) {
                    b.add_edge(fo, *ao, EdgeKind::ParamOut)?;
                }
            }
        }
    }
    let mut sdg = b.finish(entries.clone());
    let pairs = summary_edges(&sdg, deadline)?;
    sdg.add_summary_edges(pairs)?;
    debug!("built SDG: {} nodes, {} edges, {} methods", sdg.node_count(), sdg.edge_count(), reachable.len());
    Ok(sdg)
}

type KeySets = BTreeMap<MethodId, BTreeSet<FieldKey>>;

/// Field keys each reachable method reads and writes, including through its callees.
fn mod_ref(program: &ResolvedProgram, resolver: &Resolver, reachable: &BTreeSet<MethodId>) -> (KeySets, KeySets) {
    let mut refs: KeySets = BTreeMap::new();
    let mut mods: KeySets = BTreeMap::new();
    let mut callees: BTreeMap<MethodId, BTreeSet<MethodId>> = BTreeMap::new();
    for &m in reachable {
        let info = program.method(m);
        let (r, w, c) = (refs.entry(m).or_default(), mods.entry(m).or_default(), callees.entry(m).or_default());
        for s in &info.body {
            s.walk(&mut |s| {
                if let StmtKind::AssignField { receiver, field, .. } = &s.kind {
                    w.extend(resolver.field_keys(m, receiver, *field));
                }
                for e in s.own_exprs() {
                    e.walk(&mut |e| match &e.kind {
                        ExprKind::Field { receiver, field } => r.extend(resolver.field_keys(m, receiver, *field)),
                        ExprKind::Call { site, .. } => c.extend(resolver.call_graph.targets_of(*site)),
                        _ => {}
                    });
                }
            });
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for (m, cs) in &callees {
            for t in cs {
                let (tr, tw) = (refs[t].clone(), mods[t].clone());
                let (r, w) = (refs.get_mut(m).unwrap(), mods.get_mut(m).unwrap());
                let before = r.len() + w.len();
                r.extend(tr);
                w.extend(tw);
                changed |= r.len() + w.len() != before;
            }
        }
    }
    (refs, mods)
}

struct Formals {
    entry: NodeId,
    ins: BTreeMap<Slot, NodeId>,
    outs: BTreeMap<Slot, NodeId>,
}

fn slot_label(program_field: impl Fn(&FieldKey) -> String, slot: &Slot, params: &[String]) -> String {
    match slot {
        Slot::This => "this".into(),
        Slot::Param(i) => params.get(*i as usize).cloned().unwrap_or_else(|| format!("arg{i}")),
        Slot::Field(k) => program_field(k),
        Slot::Ret => "ret".into(),
    }
}

fn add_formals(
    b: &mut SdgBuilder,
    info: &MethodInfo,
    refs: &BTreeSet<FieldKey>,
    mods: &BTreeSet<FieldKey>,
) -> Result<Formals, GraphError> {
    let m = info.id;
    let line = info.header_line();
    let entry = b.add_node(NodeKind::Entry, m, line, None, None, &info.qualified_name)?;
    let params: Vec<String> = info.params.iter().map(|p| info.locals[p.index()].name.clone()).collect();
    let field = |k: &FieldKey| format!("field#{}.{}", k.class.0, k.field.0);
    let mut in_slots = vec![Slot::This];
    in_slots.extend((0..info.params.len() as u32).map(Slot::Param));
    in_slots.extend(refs.iter().map(|&k| Slot::Field(k)));
    let mut out_slots: Vec<Slot> = Vec::new();
    if info.ret.is_some() {
        out_slots.push(Slot::Ret);
    }
    out_slots.extend(mods.iter().map(|&k| Slot::Field(k)));

    let mut ins = BTreeMap::new();
    for slot in in_slots {
        let n = b.add_node(NodeKind::FormalIn, m, line, None, Some(slot), slot_label(field, &slot, &params))?;
        b.add_edge(entry, n, EdgeKind::ControlDep)?;
        ins.insert(slot, n);
    }
    let mut outs = BTreeMap::new();
    for slot in out_slots {
        let n = b.add_node(NodeKind::FormalOut, m, line, None, Some(slot), slot_label(field, &slot, &params))?;
        b.add_edge(entry, n, EdgeKind::ControlDep)?;
        outs.insert(slot, n);
    }
    Ok(Formals { entry, ins, outs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Local(LocalId),
    This,
    Field(FieldKey),
    Ret,
}

struct SiteNodes {
    site: CallSiteId,
    call: NodeId,
    ins: Vec<(Slot, NodeId)>,
    outs: Vec<(Slot, NodeId)>,
}

struct BodyCx<'a, 'p> {
    b: &'a mut SdgBuilder,
    resolver: &'a Resolver<'p>,
    method: &'p MethodInfo,
    refs: &'a KeySets,
    mods: &'a KeySets,
    sites: &'a mut Vec<SiteNodes>,
}

type Events = Vec<Event<Var, NodeId>>;

impl BodyCx<'_, '_> {
    fn build(&mut self, formals: &Formals, exceptions: bool) -> Result<(), GraphError> {
        let m = self.method.id;
        let cfg_off = build_cfg(self.method, false);
        let cfg = if exceptions { build_cfg(self.method, true) } else { cfg_off.clone() };
        let n = cfg.len();

        let mut controller = vec![formals.entry; n];
        let mut controlled: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut events: Vec<Events> = vec![Vec::new(); n];

        for (slot, &node) in &formals.ins {
            let (var, strong) = match *slot {
                Slot::This => (Var::This, true),
                Slot::Param(i) => (Var::Local(self.method.params[i as usize]), true),
                Slot::Field(k) => (Var::Field(k), false),
                Slot::Ret => continue,
            };
            events[Cfg::ENTRY].push(Event::Def { var, at: node, strong });
        }
        for (slot, &node) in &formals.outs {
            let var = match *slot {
                Slot::Field(k) => Var::Field(k),
                _ => Var::Ret,
            };
            events[Cfg::EXIT].push(Event::Use { var, at: node });
        }

        for u in 2..n {
            let node = &cfg.nodes[u];
            let stmt = node.stmt.expect("statement node");
            let kind = if node.kind == CfgNodeKind::Predicate { NodeKind::Predicate } else { NodeKind::Statement };
            let primary = self.b.add_node(kind, m, node.line, None, None, stmt_label(&stmt.kind))?;
            controller[u] = primary;
            let mut group = vec![primary];
            let ev = &mut events[u];
            match &stmt.kind {
                StmtKind::Local { local, init } => {
                    if let Some(e) = init {
                        self.expr(e, primary, ev, &mut group)?;
                    }
                    ev.push(Event::Def { var: Var::Local(*local), at: primary, strong: true });
                }
                StmtKind::AssignLocal { local, value } => {
                    self.expr(value, primary, ev, &mut group)?;
                    ev.push(Event::Def { var: Var::Local(*local), at: primary, strong: true });
                }
                StmtKind::AssignField { receiver, field, value } => {
                    self.expr(receiver, primary, ev, &mut group)?;
                    self.expr(value, primary, ev, &mut group)?;
                    for k in self.resolver.field_keys(m, receiver, *field) {
                        ev.push(Event::Def { var: Var::Field(k), at: primary, strong: false });
                    }
                }
                StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => self.expr(cond, primary, ev, &mut group)?,
                StmtKind::Return(e) => {
                    if let Some(e) = e {
                        self.expr(e, primary, ev, &mut group)?;
                        ev.push(Event::Def { var: Var::Ret, at: primary, strong: true });
                    }
                }
                StmtKind::Call(e) | StmtKind::Throw(e) => self.expr(e, primary, ev, &mut group)?,
            }
            controlled[u] = group;
        }

        let cd_off = control_dependence_raw(&cfg_off.plain_succs(), Cfg::ENTRY, Cfg::EXIT);
        let cd_full = if exceptions { control_dependence_raw(&cfg.plain_succs(), Cfg::ENTRY, Cfg::EXIT) } else { cd_off.clone() };
        for &(a, b) in &cd_off {
            for &t in &controlled[b] {
                self.b.add_edge(controller[a], t, EdgeKind::ControlDep)?;
            }
        }
        for &(a, b) in cd_full.difference(&cd_off) {
            for &t in &controlled[b] {
                self.b.add_edge(controller[a], t, EdgeKind::ExceptionControl)?;
            }
        }
        for (def, use_, _) in reaching_definitions(&cfg.plain_succs(), Cfg::ENTRY, &events) {
            self.b.add_edge(def, use_, EdgeKind::DataDep)?;
        }
        Ok(())
    }

    /// Records the accesses of `e`, attributing plain reads to `consumer` and
    /// creating call and actual-parameter nodes for calls.
    fn expr(&mut self, e: &Expr, consumer: NodeId, ev: &mut Events, group: &mut Vec<NodeId>) -> Result<(), GraphError> {
        let m = self.method.id;
        match &e.kind {
            ExprKind::Local(l) => ev.push(Event::Use { var: Var::Local(*l), at: consumer }),
            ExprKind::This => ev.push(Event::Use { var: Var::This, at: consumer }),
            ExprKind::Field { receiver, field } => {
                self.expr(receiver, consumer, ev, group)?;
                for k in self.resolver.field_keys(m, receiver, *field) {
                    ev.push(Event::Use { var: Var::Field(k), at: consumer });
                }
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs, consumer, ev, group)?;
                self.expr(rhs, consumer, ev, group)?;
            }
            ExprKind::Unary { operand, .. } => self.expr(operand, consumer, ev, group)?,
            ExprKind::Call { site, receiver, name, args } => {
                let targets = self.resolver.call_graph.targets_of(*site);
                let call = self.b.add_node(NodeKind::Call, m, e.line, Some(*site), None, name.clone())?;
                group.push(call);
                let mut ins = Vec::new();
                let mut outs = Vec::new();
                let actual = |cx: &mut Self, kind: NodeKind, slot: Slot, what: String| -> Result<NodeId, GraphError> {
                    let n = cx.b.add_node(kind, m, e.line, Some(*site), Some(slot), format!("{name}:{what}"))?;
                    cx.b.add_edge(call, n, EdgeKind::ControlDep)?;
                    Ok(n)
                };
                let ai = actual(self, NodeKind::ActualIn, Slot::This, "this".into())?;
                ins.push((Slot::This, ai));
                self.expr(receiver, ai, ev, group)?;
                for (i, a) in args.iter().enumerate() {
                    let slot = Slot::Param(i as u32);
                    let ai = actual(self, NodeKind::ActualIn, slot, format!("arg{i}"))?;
                    ins.push((slot, ai));
                    self.expr(a, ai, ev, group)?;
                }
                let union = |sets: &KeySets| -> BTreeSet<FieldKey> { targets.iter().flat_map(|t| sets[t].iter().copied()).collect() };
                for k in union(self.refs) {
                    let slot = Slot::Field(k);
                    let ai = actual(self, NodeKind::ActualIn, slot, format!("field#{}.{}", k.class.0, k.field.0))?;
                    ins.push((slot, ai));
                    ev.push(Event::Use { var: Var::Field(k), at: ai });
                }
                for k in union(self.mods) {
                    let slot = Slot::Field(k);
                    let ao = actual(self, NodeKind::ActualOut, slot, format!("field#{}.{}", k.class.0, k.field.0))?;
                    outs.push((slot, ao));
                    ev.push(Event::Def { var: Var::Field(k), at: ao, strong: false });
                }
                if e.ty != Type::Void {
                    let ao = actual(self, NodeKind::ActualOut, Slot::Ret, "ret".into())?;
                    outs.push((Slot::Ret, ao));
                    self.b.add_edge(ao, consumer, EdgeKind::DataDep)?;
                }
                self.sites.push(SiteNodes { site: *site, call, ins, outs });
            }
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Null | ExprKind::New { .. } => {}
        }
        Ok(())
    }
}

fn stmt_label(kind: &StmtKind) -> &'static str {
    match kind {
        StmtKind::Local { .. } => "decl",
        StmtKind::AssignLocal { .. } => "assign",
        StmtKind::AssignField { .. } => "store",
        StmtKind::If { .. } => "if",
        StmtKind::While { .. } => "while",
        StmtKind::Return(_) => "return",
        StmtKind::Call(_) => "call",
        StmtKind::Throw(_) => "throw",
    }
}

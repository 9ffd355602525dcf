//! Per-method control-flow graphs with one node per statement.

use crate::lang::ast::BinOp;
use crate::lang::ir::{Expr, ExprKind, MethodInfo, Stmt, StmtKind};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CfgNodeKind {
    Entry,
    Exit,
    Statement,
    /// Condition of an `if` or `while`.
    Predicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CfgEdgeKind {
    Normal,
    Exception,
}

#[derive(Debug, Clone)]
pub struct CfgNode<'a> {
    pub kind: CfgNodeKind,
    pub line: u32,
    pub stmt: Option<&'a Stmt>,
}

#[derive(Debug, Clone)]
pub struct Cfg<'a> {
    pub nodes: Vec<CfgNode<'a>>,
    pub succs: Vec<Vec<(usize, CfgEdgeKind)>>,
}

impl<'a> Cfg<'a> {
    pub const ENTRY: usize = 0;
    pub const EXIT: usize = 1;

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Successor lists without edge kinds, deduplicated.
    pub fn plain_succs(&self) -> Vec<Vec<usize>> {
        self.succs
            .iter()
            .map(|s| {
                let mut v: Vec<usize> = s.iter().map(|&(t, _)| t).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    pub fn has_exception_edges(&self) -> bool {
        self.succs.iter().flatten().any(|&(_, k)| k == CfgEdgeKind::Exception)
    }

    /// The same graph with all exception edges removed.
    pub fn without_exception_edges(&self) -> Cfg<'a> {
        Cfg {
            nodes: self.nodes.clone(),
            succs: self.succs.iter().map(|s| s.iter().copied().filter(|&(_, k)| k == CfgEdgeKind::Normal).collect()).collect(),
        }
    }

    fn add(&mut self, kind: CfgNodeKind, line: u32, stmt: Option<&'a Stmt>) -> usize {
        self.nodes.push(CfgNode { kind, line, stmt });
        self.succs.push(Vec::new());
        self.nodes.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize, kind: CfgEdgeKind) {
        if !self.succs[from].contains(&(to, kind)) {
            self.succs[from].push((to, kind));
        }
    }
}

/// True when evaluating `e` can raise an implicit exception: a field access or
/// call on a receiver that may be null, or a division.
pub fn expr_may_throw(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |x| match &x.kind {
        ExprKind::Field { receiver, .. } | ExprKind::Call { receiver, .. } if receiver.may_be_null() => found = true,
        ExprKind::Binary { op: BinOp::Div, .. } => found = true,
        _ => {}
    });
    found
}

/// Implicit exception sources of a statement's own evaluation.
pub fn stmt_may_throw(s: &Stmt) -> bool {
    let store = matches!(&s.kind, StmtKind::AssignField { receiver, .. } if receiver.may_be_null());
    store || s.own_exprs().into_iter().any(expr_may_throw)
}

/// Builds the CFG of `method`. With `exceptions` on, statements that may
/// raise an implicit exception get an exception edge to EXIT and `throw`
/// reaches EXIT along an exception edge; otherwise `throw` is a plain
/// terminator with a normal edge to EXIT.
pub fn build_cfg(method: &MethodInfo, exceptions: bool) -> Cfg<'_> {
    let mut cfg = Cfg { nodes: Vec::new(), succs: Vec::new() };
    let header = method.header_line();
    cfg.add(CfgNodeKind::Entry, header, None);
    cfg.add(CfgNodeKind::Exit, method.span.last, None);
    let mut b = Builder { cfg, exceptions };
    let frontier = b.seq(&method.body, vec![Cfg::ENTRY]);
    for f in frontier {
        b.cfg.edge(f, Cfg::EXIT, CfgEdgeKind::Normal);
    }
    b.cfg
}

struct Builder<'a> {
    cfg: Cfg<'a>,
    exceptions: bool,
}

impl<'a> Builder<'a> {
    fn seq(&mut self, stmts: &'a [Stmt], mut frontier: Vec<usize>) -> Vec<usize> {
        for s in stmts {
            frontier = self.stmt(s, frontier);
        }
        frontier
    }

    fn node(&mut self, kind: CfgNodeKind, s: &'a Stmt, preds: &[usize]) -> usize {
        let n = self.cfg.add(kind, s.line, Some(s));
        for &p in preds {
            self.cfg.edge(p, n, CfgEdgeKind::Normal);
        }
        if self.exceptions && stmt_may_throw(s) {
            self.cfg.edge(n, Cfg::EXIT, CfgEdgeKind::Exception);
        }
        n
    }

    fn stmt(&mut self, s: &'a Stmt, frontier: Vec<usize>) -> Vec<usize> {
        match &s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                let p = self.node(CfgNodeKind::Predicate, s, &frontier);
                let mut out = self.seq(then_branch, vec![p]);
                out.extend(self.seq(else_branch, vec![p]));
                out
            }
            StmtKind::While { body, .. } => {
                let p = self.node(CfgNodeKind::Predicate, s, &frontier);
                for b in self.seq(body, vec![p]) {
                    self.cfg.edge(b, p, CfgEdgeKind::Normal);
                }
                vec![p]
            }
            StmtKind::Return(_) => {
                let n = self.node(CfgNodeKind::Statement, s, &frontier);
                self.cfg.edge(n, Cfg::EXIT, CfgEdgeKind::Normal);
                Vec::new()
            }
            StmtKind::Throw(_) => {
                let n = self.node(CfgNodeKind::Statement, s, &frontier);
                let kind = if self.exceptions { CfgEdgeKind::Exception } else { CfgEdgeKind::Normal };
                self.cfg.edge(n, Cfg::EXIT, kind);
                Vec::new()
            }
            _ => vec![self.node(CfgNodeKind::Statement, s, &frontier)],
        }
    }
}

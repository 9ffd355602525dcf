//! Call-site resolution at two precisions.

use super::points_to::{points_to, PointsTo};
use super::Precision;
use crate::lang::ir::{CallSiteId, ClassId, Expr, ExprKind, FieldId, MethodId, ResolvedProgram, Type};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// A field of objects of one concrete class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FieldKey {
    pub class: ClassId,
    pub field: FieldId,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CallGraph {
    pub targets: BTreeMap<CallSiteId, BTreeSet<MethodId>>,
}

impl CallGraph {
    pub fn targets_of(&self, site: CallSiteId) -> BTreeSet<MethodId> {
        self.targets.get(&site).cloned().unwrap_or_default()
    }

    /// Methods reachable from `entries`, entries included.
    pub fn reachable(&self, program: &ResolvedProgram, entries: &BTreeSet<MethodId>) -> BTreeSet<MethodId> {
        let mut sites_of: BTreeMap<MethodId, Vec<CallSiteId>> = BTreeMap::new();
        for cs in &program.call_sites {
            sites_of.entry(cs.method).or_default().push(cs.id);
        }
        let mut seen = entries.clone();
        let mut work: Vec<MethodId> = entries.iter().copied().collect();
        while let Some(m) = work.pop() {
            for site in sites_of.get(&m).into_iter().flatten() {
                for &t in self.targets.get(site).into_iter().flatten() {
                    if seen.insert(t) {
                        work.push(t);
                    }
                }
            }
        }
        seen
    }
}

/// Answers receiver-dependent questions (call targets, field keys) at a fixed precision.
#[derive(Debug, Clone)]
pub struct Resolver<'p> {
    program: &'p ResolvedProgram,
    precision: Precision,
    pts: Option<PointsTo>,
    pub call_graph: CallGraph,
}

impl<'p> Resolver<'p> {
    pub fn new(program: &'p ResolvedProgram, precision: Precision) -> Self {
        let pts = (precision == Precision::InstanceBased).then(|| points_to(program));
        let mut r = Resolver { program, precision, pts, call_graph: CallGraph::default() };
        let mut targets = BTreeMap::new();
        for m in &program.methods {
            for s in &m.body {
                s.walk(&mut |s| {
                    for e in s.own_exprs() {
                        e.walk(&mut |e| {
                            if let ExprKind::Call { site, receiver, name, .. } = &e.kind {
                                targets.insert(*site, r.dispatch(m.id, receiver, name));
                            }
                        });
                    }
                });
            }
        }
        r.call_graph = CallGraph { targets };
        r
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Concrete classes the receiver may have.
    pub fn receiver_classes(&self, method: MethodId, receiver: &Expr) -> BTreeSet<ClassId> {
        let Type::Class(static_class) = receiver.ty else { return BTreeSet::new() };
        match &self.pts {
            Some(pts) => pts.classes(self.program, method, receiver),
            None => self.program.subclasses_of(static_class).into_iter().collect(),
        }
    }

    fn dispatch(&self, method: MethodId, receiver: &Expr, name: &str) -> BTreeSet<MethodId> {
        self.receiver_classes(method, receiver)
            .into_iter()
            .filter_map(|c| self.program.class(c).dispatch.get(name).copied())
            .collect()
    }

    /// Keys of `receiver.field` accessed inside `method`.
    pub fn field_keys(&self, method: MethodId, receiver: &Expr, field: FieldId) -> BTreeSet<FieldKey> {
        self.receiver_classes(method, receiver).into_iter().map(|class| FieldKey { class, field }).collect()
    }
}

/// Call graph of the whole program at the given precision.
pub fn build_call_graph(program: &ResolvedProgram, precision: Precision) -> CallGraph {
    Resolver::new(program, precision).call_graph
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang;

    const SRC: &str = "class A {
  int m() {
    return 0;
  }
}
class B extends A {
  int m() {
    return 1;
  }
}
class C extends A {
  int m() {
    return 2;
  }
}
class Main {
  int run() {
    A a = new B();
    A z = null;
    int w = z.m();
    return a.m() + this.self();
  }
  int self() {
    return 3;
  }
}
";

    fn names(p: &ResolvedProgram, ms: &BTreeSet<MethodId>) -> Vec<String> {
        ms.iter().map(|&m| p.method(m).qualified_name.clone()).collect()
    }

    fn site_on_line(p: &ResolvedProgram, line: u32, name: &str) -> CallSiteId {
        p.call_sites.iter().find(|c| c.line == line && c.name == name).unwrap().id
    }

    #[test]
    fn precision_ladder_on_virtual_call() {
        let p = lang::load(SRC, "t.mj").unwrap();
        let ty = build_call_graph(&p, Precision::TypeBased);
        let inst = build_call_graph(&p, Precision::InstanceBased);
        let site = site_on_line(&p, 21, "m");
        assert_eq!(names(&p, &ty.targets_of(site)), vec!["A.m", "B.m", "C.m"]);
        assert_eq!(names(&p, &inst.targets_of(site)), vec!["B.m"]);
    }

    #[test]
    fn null_only_receiver() {
        let p = lang::load(SRC, "t.mj").unwrap();
        let site = site_on_line(&p, 20, "m");
        assert!(build_call_graph(&p, Precision::InstanceBased).targets_of(site).is_empty());
        assert_eq!(build_call_graph(&p, Precision::TypeBased).targets_of(site).len(), 3);
    }

    #[test]
    fn self_call_has_one_target() {
        let p = lang::load(SRC, "t.mj").unwrap();
        let site = site_on_line(&p, 21, "self");
        for prec in [Precision::TypeBased, Precision::InstanceBased] {
            assert_eq!(names(&p, &build_call_graph(&p, prec).targets_of(site)), vec!["Main.self"]);
        }
    }

    #[test]
    fn instance_targets_are_subset_of_type_targets() {
        let p = lang::load(SRC, "t.mj").unwrap();
        let ty = build_call_graph(&p, Precision::TypeBased);
        let inst = build_call_graph(&p, Precision::InstanceBased);
        for (site, ts) in &inst.targets {
            assert!(ts.is_subset(&ty.targets_of(*site)));
        }
    }
}

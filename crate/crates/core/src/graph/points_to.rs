//! Flow-insensitive, inclusion-based points-to analysis over allocation sites.
//!
//! Every method is treated as a possible entry: its receiver and reference
//! parameters start out pointing to an opaque [`Obj::External`] object of
//! every class compatible with their declared type, and the reference fields
//! of external objects point to further external objects. Calls are bound on
//! the fly from the receiver's points-to set.

use crate::lang::ir::{
    AllocSiteId, ClassId, Expr, ExprKind, FieldId, LocalId, MethodId, ResolvedProgram, Stmt, StmtKind, Type,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// An abstract heap object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Obj {
    Alloc(AllocSiteId),
    /// Object created outside the analyzed code, one per class.
    External(ClassId),
}

pub type ObjSet = BTreeSet<Obj>;

#[derive(Debug, Clone, Default)]
pub struct PointsTo {
    locals: BTreeMap<(MethodId, LocalId), ObjSet>,
    this: BTreeMap<MethodId, ObjSet>,
    ret: BTreeMap<MethodId, ObjSet>,
    fields: BTreeMap<(Obj, FieldId), ObjSet>,
}

impl PointsTo {
    pub fn class_of(program: &ResolvedProgram, obj: Obj) -> ClassId {
        match obj {
            Obj::Alloc(site) => program.alloc_site(site).class,
            Obj::External(c) => c,
        }
    }

    pub fn local(&self, method: MethodId, local: LocalId) -> ObjSet {
        self.locals.get(&(method, local)).cloned().unwrap_or_default()
    }

    pub fn this(&self, method: MethodId) -> ObjSet {
        self.this.get(&method).cloned().unwrap_or_default()
    }

    pub fn field(&self, obj: Obj, field: FieldId) -> ObjSet {
        self.fields.get(&(obj, field)).cloned().unwrap_or_default()
    }

    /// Objects `expr` (evaluated inside `method`) may denote, restricted to
    /// its static type.
    pub fn eval(&self, program: &ResolvedProgram, method: MethodId, expr: &Expr) -> ObjSet {
        let mut solver = Solver { program, state: self.clone(), changed: false, frozen: true };
        solver.eval(method, expr)
    }

    /// Classes of the objects `expr` may denote.
    pub fn classes(&self, program: &ResolvedProgram, method: MethodId, expr: &Expr) -> BTreeSet<ClassId> {
        self.eval(program, method, expr).into_iter().map(|o| Self::class_of(program, o)).collect()
    }
}

/// Runs the analysis to a fixpoint.
pub fn points_to(program: &ResolvedProgram) -> PointsTo {
    let mut solver = Solver { program, state: PointsTo::default(), changed: false, frozen: false };
    solver.seed();
    loop {
        solver.changed = false;
        for m in &program.methods {
            for s in &m.body {
                solver.stmt(m.id, s);
            }
        }
        if !solver.changed {
            break;
        }
    }
    solver.state
}

struct Solver<'p> {
    program: &'p ResolvedProgram,
    state: PointsTo,
    changed: bool,
    /// Evaluate without recording any new facts.
    frozen: bool,
}

fn add(set: &mut ObjSet, objs: &ObjSet, changed: &mut bool) {
    for &o in objs {
        *changed |= set.insert(o);
    }
}

impl Solver<'_> {
    fn externals(&self, ty: Type) -> ObjSet {
        match ty {
            Type::Class(c) => self.program.subclasses_of(c).into_iter().map(Obj::External).collect(),
            _ => ObjSet::new(),
        }
    }

    fn seed(&mut self) {
        let p = self.program;
        for m in &p.methods {
            let this = self.externals(Type::Class(m.owner));
            self.state.this.insert(m.id, this);
            for &param in &m.params {
                let objs = self.externals(m.locals[param.index()].ty);
                self.state.locals.insert((m.id, param), objs);
            }
        }
        for c in &p.classes {
            for &f in c.fields_by_name.values() {
                let objs = self.externals(p.field(f).ty);
                if !objs.is_empty() {
                    self.state.fields.insert((Obj::External(c.id), f), objs);
                }
            }
        }
    }

    fn filter(&self, objs: ObjSet, ty: Type) -> ObjSet {
        match ty {
            Type::Class(t) => objs.into_iter().filter(|&o| self.program.is_subclass(PointsTo::class_of(self.program, o), t)).collect(),
            _ => ObjSet::new(),
        }
    }

    fn flow_into_local(&mut self, method: MethodId, local: LocalId, objs: &ObjSet) {
        if self.frozen || objs.is_empty() {
            return;
        }
        let set = self.state.locals.entry((method, local)).or_default();
        add(set, objs, &mut self.changed);
    }

    fn stmt(&mut self, m: MethodId, s: &Stmt) {
        match &s.kind {
            StmtKind::Local { local, init } => {
                if let Some(e) = init {
                    let objs = self.eval(m, e);
                    self.flow_into_local(m, *local, &objs);
                }
            }
            StmtKind::AssignLocal { local, value } => {
                let objs = self.eval(m, value);
                self.flow_into_local(m, *local, &objs);
            }
            StmtKind::AssignField { receiver, field, value } => {
                let recv = self.eval(m, receiver);
                let objs = self.eval(m, value);
                if !objs.is_empty() {
                    for o in recv {
                        let set = self.state.fields.entry((o, *field)).or_default();
                        add(set, &objs, &mut self.changed);
                    }
                }
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                self.eval(m, cond);
                for s in then_branch.iter().chain(else_branch) {
                    self.stmt(m, s);
                }
            }
            StmtKind::While { cond, body } => {
                self.eval(m, cond);
                for s in body {
                    self.stmt(m, s);
                }
            }
            StmtKind::Return(Some(e)) => {
                let objs = self.eval(m, e);
                let set = self.state.ret.entry(m).or_default();
                add(set, &objs, &mut self.changed);
            }
            StmtKind::Return(None) => {}
            StmtKind::Call(e) | StmtKind::Throw(e) => {
                self.eval(m, e);
            }
        }
    }

    fn eval(&mut self, m: MethodId, e: &Expr) -> ObjSet {
        let raw = match &e.kind {
            ExprKind::Local(l) => self.state.local(m, *l),
            ExprKind::This => self.state.this(m),
            ExprKind::New { site, .. } => [Obj::Alloc(*site)].into(),
            ExprKind::Field { receiver, field } => {
                let recv = self.eval(m, receiver);
                recv.into_iter().flat_map(|o| self.state.field(o, *field)).collect()
            }
            ExprKind::Call { receiver, name, args, .. } => {
                let recv = self.eval(m, receiver);
                let arg_objs: Vec<ObjSet> = args.iter().map(|a| self.eval(m, a)).collect();
                let mut result = ObjSet::new();
                for o in recv {
                    let class = PointsTo::class_of(self.program, o);
                    let Some(&target) = self.program.class(class).dispatch.get(name) else { continue };
                    if !self.frozen {
                        let set = self.state.this.entry(target).or_default();
                        self.changed |= set.insert(o);
                        let params = self.program.method(target).params.clone();
                        for (p, objs) in params.into_iter().zip(&arg_objs) {
                            self.flow_into_local(target, p, objs);
                        }
                    }
                    result.extend(self.state.ret.get(&target).into_iter().flatten().copied());
                }
                result
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                self.eval(m, lhs);
                self.eval(m, rhs);
                ObjSet::new()
            }
            ExprKind::Unary { operand, .. } => {
                self.eval(m, operand);
                ObjSet::new()
            }
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Null => ObjSet::new(),
        };
        self.filter(raw, e.ty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang;

    fn local_named(p: &ResolvedProgram, method: &str, name: &str) -> (MethodId, LocalId) {
        let m = p.method(p.method_named(method).unwrap());
        let idx = m.locals.iter().position(|l| l.name == name).unwrap();
        (m.id, LocalId(idx as u32))
    }

    fn sites(p: &ResolvedProgram, objs: &ObjSet) -> Vec<u32> {
        objs.iter()
            .map(|o| match o {
                Obj::Alloc(s) => p.alloc_site(*s).line,
                Obj::External(_) => 0,
            })
            .collect()
    }

    const SRC: &str = "class B {
  B id(B x) {
    return x;
  }
}
class M {
  void run(bool c) {
    B a = new B();
    B d = a;
    B e = new B();
    if (c) {
      e = a;
    }
    B f = this.pick(e);
    B n = null;
  }
  B pick(B x) {
    return x;
  }
}
";

    #[test]
    fn allocation_and_copy() {
        let p = lang::load(SRC, "t.mj").unwrap();
        let pts = points_to(&p);
        let (m, a) = local_named(&p, "M.run", "a");
        let (_, d) = local_named(&p, "M.run", "d");
        assert_eq!(sites(&p, &pts.local(m, a)), vec![8]);
        assert_eq!(pts.local(m, d), pts.local(m, a));
    }

    #[test]
    fn branches_merge_sites() {
        let p = lang::load(SRC, "t.mj").unwrap();
        let pts = points_to(&p);
        let (m, e) = local_named(&p, "M.run", "e");
        assert_eq!(sites(&p, &pts.local(m, e)), vec![8, 10]);
    }

    #[test]
    fn calls_pass_arguments_and_return_values() {
        let p = lang::load(SRC, "t.mj").unwrap();
        let pts = points_to(&p);
        let (m, f) = local_named(&p, "M.run", "f");
        // External B from pick's own entry seeding, plus both sites flowing in.
        assert_eq!(sites(&p, &pts.local(m, f)), vec![8, 10, 0]);
        let (m, n) = local_named(&p, "M.run", "n");
        assert!(pts.local(m, n).is_empty());
    }
}

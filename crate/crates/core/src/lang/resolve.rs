//! Name binding, class hierarchy construction and static typing.

use super::ast::{self, BinOp, ExprKind as AExpr, StmtKind as AStmt, TypeName, UnOp};
use super::ir::*;
use super::ResolveError;
use std::collections::BTreeMap;

/// Resolves every name in `program` and lowers it to the typed IR.
pub fn resolve(program: &ast::Program) -> Result<ResolvedProgram, ResolveError> {
    let mut class_by_name = BTreeMap::new();
    for (i, c) in program.classes.iter().enumerate() {
        if class_by_name.insert(c.name.clone(), ClassId(i as u32)).is_some() {
            return Err(ResolveError::Duplicate { what: "class", name: c.name.clone(), line: c.span.first });
        }
    }

    let mut classes: Vec<ClassInfo> = Vec::with_capacity(program.classes.len());
    for (i, c) in program.classes.iter().enumerate() {
        let superclass = match &c.superclass {
            Some(name) => Some(
                *class_by_name
                    .get(name)
                    .ok_or_else(|| ResolveError::UnknownClass { name: name.clone(), line: c.span.first })?,
            ),
            None => None,
        };
        classes.push(ClassInfo {
            id: ClassId(i as u32),
            name: c.name.clone(),
            superclass,
            direct_subclasses: Vec::new(),
            own_fields: Vec::new(),
            own_methods: Vec::new(),
            dispatch: BTreeMap::new(),
            fields_by_name: BTreeMap::new(),
        });
    }
    let order = topological_order(&classes)?;
    for i in 0..classes.len() {
        if let Some(sup) = classes[i].superclass {
            let id = classes[i].id;
            classes[sup.index()].direct_subclasses.push(id);
        }
    }

    let type_of = |name: &TypeName, line: u32| -> Result<Type, ResolveError> {
        Ok(match name {
            TypeName::Int => Type::Int,
            TypeName::Bool => Type::Bool,
            TypeName::Class(n) => Type::Class(
                *class_by_name
                    .get(n)
                    .ok_or_else(|| ResolveError::UnknownClass { name: n.clone(), line })?,
            ),
        })
    };

    // Fields and method signatures, ids in source order.
    let mut fields = Vec::new();
    let mut methods: Vec<MethodInfo> = Vec::new();
    for (ci, c) in program.classes.iter().enumerate() {
        for f in &c.fields {
            let id = FieldId(fields.len() as u32);
            fields.push(FieldInfo { id, owner: ClassId(ci as u32), name: f.name.clone(), ty: type_of(&f.ty, f.span.first)? });
            classes[ci].own_fields.push(id);
        }
        for m in &c.methods {
            let id = MethodId(methods.len() as u32);
            let line = m.span.first;
            let mut locals = Vec::new();
            let mut params = Vec::new();
            for p in &m.params {
                if locals.iter().any(|l: &LocalInfo| l.name == p.name) {
                    return Err(ResolveError::Duplicate { what: "parameter", name: p.name.clone(), line });
                }
                params.push(LocalId(locals.len() as u32));
                locals.push(LocalInfo { name: p.name.clone(), ty: type_of(&p.ty, line)? });
            }
            let ret = m.ret.as_ref().map(|t| type_of(t, line)).transpose()?;
            methods.push(MethodInfo {
                id,
                owner: ClassId(ci as u32),
                name: m.name.clone(),
                qualified_name: m.qualified_name(),
                params,
                locals,
                ret,
                body: Vec::new(),
                span: m.span,
            });
            classes[ci].own_methods.push(id);
        }
    }

    // Inherited members, parents before children.
    for cid in order {
        let (mut visible_fields, mut dispatch) = match classes[cid.index()].superclass {
            Some(sup) => (classes[sup.index()].fields_by_name.clone(), classes[sup.index()].dispatch.clone()),
            None => (BTreeMap::new(), BTreeMap::new()),
        };
        for &fid in &classes[cid.index()].own_fields {
            let f = &fields[fid.index()];
            if visible_fields.insert(f.name.clone(), fid).is_some() {
                let line = program.classes[cid.index()].fields.iter().find(|d| d.name == f.name).map_or(0, |d| d.span.first);
                return Err(ResolveError::Duplicate { what: "field", name: f.name.clone(), line });
            }
        }
        let mut own_names = BTreeMap::new();
        for &mid in &classes[cid.index()].own_methods {
            let m = &methods[mid.index()];
            if own_names.insert(m.name.clone(), mid).is_some() {
                return Err(ResolveError::Duplicate { what: "method", name: m.name.clone(), line: m.span.first });
            }
            if let Some(&overridden) = dispatch.get(&m.name) {
                let o: &MethodInfo = &methods[overridden.index()];
                let sig = |mi: &MethodInfo| (mi.params.iter().map(|p| mi.locals[p.index()].ty).collect::<Vec<_>>(), mi.ret);
                if sig(m) != sig(o) {
                    return Err(ResolveError::Type {
                        message: format!("`{}` overrides `{}` with a different signature", m.qualified_name, o.qualified_name),
                        line: m.span.first,
                    });
                }
            }
            dispatch.insert(m.name.clone(), mid);
        }
        classes[cid.index()].fields_by_name = visible_fields;
        classes[cid.index()].dispatch = dispatch;
    }

    let mut rp = ResolvedProgram {
        ast: program.clone(),
        classes,
        fields,
        methods,
        call_sites: Vec::new(),
        alloc_sites: Vec::new(),
        class_by_name,
    };

    let mut ci = 0;
    for c in &program.classes {
        for m in &c.methods {
            let mid = MethodId(ci as u32);
            ci += 1;
            let mut cx = BodyCx { rp: &mut rp, method: mid, scopes: vec![] };
            let params: BTreeMap<String, LocalId> =
                cx.rp.methods[mid.index()].params.iter().map(|&p| (cx.rp.methods[mid.index()].locals[p.index()].name.clone(), p)).collect();
            cx.scopes.push(params);
            let body = cx.block(&m.body)?;
            rp.methods[mid.index()].body = body;
        }
    }
    Ok(rp)
}

fn topological_order(classes: &[ClassInfo]) -> Result<Vec<ClassId>, ResolveError> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; classes.len()];
    let mut order = Vec::with_capacity(classes.len());
    for start in 0..classes.len() {
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(c) = cur {
            match state[c] {
                2 => break,
                1 => {
                    let pos = chain.iter().position(|&x| x == c).unwrap_or(0);
                    let cycle = chain[pos..].iter().map(|&i: &usize| classes[i].name.clone()).collect();
                    return Err(ResolveError::CyclicInheritance { cycle });
                }
                _ => {
                    state[c] = 1;
                    chain.push(c);
                    cur = classes[c].superclass.map(|s| s.index());
                }
            }
        }
        // Parents end up before children.
        for &c in chain.iter().rev() {
            state[c] = 2;
            order.push(ClassId(c as u32));
        }
    }
    Ok(order)
}

struct BodyCx<'a> {
    rp: &'a mut ResolvedProgram,
    method: MethodId,
    scopes: Vec<BTreeMap<String, LocalId>>,
}

impl BodyCx<'_> {
    fn owner(&self) -> ClassId {
        self.rp.methods[self.method.index()].owner
    }

    fn lookup_local(&self, name: &str) -> Option<LocalId> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn type_of(&self, name: &TypeName, line: u32) -> Result<Type, ResolveError> {
        Ok(match name {
            TypeName::Int => Type::Int,
            TypeName::Bool => Type::Bool,
            TypeName::Class(n) => {
                Type::Class(self.rp.class_named(n).ok_or_else(|| ResolveError::UnknownClass { name: n.clone(), line })?)
            }
        })
    }

    fn mismatch(&self, what: &str, expected: Type, found: Type, line: u32) -> ResolveError {
        ResolveError::Type {
            message: format!("{what}: expected `{}`, found `{}`", self.rp.type_name(expected), self.rp.type_name(found)),
            line,
        }
    }

    fn expect_assignable(&self, what: &str, from: Type, to: Type, line: u32) -> Result<(), ResolveError> {
        if self.rp.is_assignable(from, to) {
            Ok(())
        } else {
            Err(self.mismatch(what, to, from, line))
        }
    }

    fn block(&mut self, stmts: &[ast::Stmt]) -> Result<Vec<Stmt>, ResolveError> {
        self.scopes.push(BTreeMap::new());
        let mut out = Vec::with_capacity(stmts.len());
        let mut reachable = true;
        for s in stmts {
            if !reachable {
                return Err(ResolveError::Unreachable { line: s.line });
            }
            let stmt = self.stmt(s)?;
            reachable = completes_normally(&stmt);
            out.push(stmt);
        }
        self.scopes.pop();
        Ok(out)
    }

    fn stmt(&mut self, s: &ast::Stmt) -> Result<Stmt, ResolveError> {
        let line = s.line;
        let kind = match &s.kind {
            AStmt::LocalDecl { ty, name, init } => {
                let ty = self.type_of(ty, line)?;
                let init = match init {
                    Some(e) => {
                        let e = self.expr(e)?;
                        self.expect_assignable("initializer", e.ty, ty, line)?;
                        Some(e)
                    }
                    None => None,
                };
                if self.lookup_local(name).is_some() {
                    return Err(ResolveError::Duplicate { what: "local variable", name: name.clone(), line });
                }
                let m = &mut self.rp.methods[self.method.index()];
                let local = LocalId(m.locals.len() as u32);
                m.locals.push(LocalInfo { name: name.clone(), ty });
                self.scopes.last_mut().expect("scope").insert(name.clone(), local);
                StmtKind::Local { local, init }
            }
            AStmt::Assign { target, value } => {
                let value = self.expr(value)?;
                match &target.kind {
                    AExpr::Name(name) => {
                        if let Some(local) = self.lookup_local(name) {
                            let ty = self.rp.methods[self.method.index()].locals[local.index()].ty;
                            self.expect_assignable("assignment", value.ty, ty, line)?;
                            StmtKind::AssignLocal { local, value }
                        } else {
                            let field = self.field_of(self.owner(), name, line)?;
                            self.expect_assignable("assignment", value.ty, self.rp.field(field).ty, line)?;
                            let receiver = Expr { kind: ExprKind::This, ty: Type::Class(self.owner()), line };
                            StmtKind::AssignField { receiver, field, value }
                        }
                    }
                    AExpr::Field { receiver, name } => {
                        let receiver = self.expr(receiver)?;
                        let class = self.class_type(&receiver, line)?;
                        let field = self.field_of(class, name, line)?;
                        self.expect_assignable("assignment", value.ty, self.rp.field(field).ty, line)?;
                        StmtKind::AssignField { receiver, field, value }
                    }
                    _ => unreachable!("parser only produces name or field targets"),
                }
            }
            AStmt::If { cond, then_branch, else_branch } => {
                let cond = self.condition(cond)?;
                let then_branch = self.block(then_branch)?;
                let else_branch = match else_branch {
                    Some(b) => self.block(b)?,
                    None => Vec::new(),
                };
                StmtKind::If { cond, then_branch, else_branch }
            }
            AStmt::While { cond, body } => {
                let cond = self.condition(cond)?;
                let body = self.block(body)?;
                StmtKind::While { cond, body }
            }
            AStmt::Return(value) => {
                let ret = self.rp.methods[self.method.index()].ret;
                match (value, ret) {
                    (None, None) => StmtKind::Return(None),
                    (Some(e), Some(ty)) => {
                        let e = self.expr(e)?;
                        self.expect_assignable("return value", e.ty, ty, line)?;
                        StmtKind::Return(Some(e))
                    }
                    (None, Some(_)) => {
                        return Err(ResolveError::Type { message: "missing return value".into(), line });
                    }
                    (Some(_), None) => {
                        return Err(ResolveError::Type { message: "void method returns a value".into(), line });
                    }
                }
            }
            AStmt::Call(e) => StmtKind::Call(self.expr(e)?),
            AStmt::Throw(e) => {
                let e = self.expr(e)?;
                self.class_type(&e, line)?;
                StmtKind::Throw(e)
            }
        };
        Ok(Stmt { kind, line })
    }

    fn condition(&mut self, e: &ast::Expr) -> Result<Expr, ResolveError> {
        let e = self.expr(e)?;
        if e.ty != Type::Bool {
            return Err(self.mismatch("condition", Type::Bool, e.ty, e.line));
        }
        Ok(e)
    }

    fn class_type(&self, e: &Expr, line: u32) -> Result<ClassId, ResolveError> {
        match e.ty {
            Type::Class(c) => Ok(c),
            other => Err(ResolveError::Type {
                message: format!("expected an object, found `{}`", self.rp.type_name(other)),
                line,
            }),
        }
    }

    fn field_of(&self, class: ClassId, name: &str, line: u32) -> Result<FieldId, ResolveError> {
        self.rp.class(class).fields_by_name.get(name).copied().ok_or_else(|| {
            if self.lookup_local(name).is_none() && class == self.owner() {
                ResolveError::UnknownName { name: name.to_string(), line }
            } else {
                ResolveError::UnknownField { class: self.rp.class(class).name.clone(), name: name.to_string(), line }
            }
        })
    }

    fn expr(&mut self, e: &ast::Expr) -> Result<Expr, ResolveError> {
        let line = e.pos.line;
        let (kind, ty) = match &e.kind {
            AExpr::Int(v) => (ExprKind::Int(*v), Type::Int),
            AExpr::Bool(b) => (ExprKind::Bool(*b), Type::Bool),
            AExpr::Null => (ExprKind::Null, Type::Null),
            AExpr::This => (ExprKind::This, Type::Class(self.owner())),
            AExpr::Name(name) => {
                if let Some(local) = self.lookup_local(name) {
                    (ExprKind::Local(local), self.rp.methods[self.method.index()].locals[local.index()].ty)
                } else {
                    let field = self.field_of(self.owner(), name, line)?;
                    let receiver = Expr { kind: ExprKind::This, ty: Type::Class(self.owner()), line };
                    (ExprKind::Field { receiver: Box::new(receiver), field }, self.rp.field(field).ty)
                }
            }
            AExpr::Field { receiver, name } => {
                let receiver = self.expr(receiver)?;
                let class = self.class_type(&receiver, line)?;
                let field = self.field_of(class, name, line)?;
                let ty = self.rp.field(field).ty;
                (ExprKind::Field { receiver: Box::new(receiver), field }, ty)
            }
            AExpr::Unary { op, operand } => {
                let operand = self.expr(operand)?;
                let want = match op {
                    UnOp::Not => Type::Bool,
                    UnOp::Neg => Type::Int,
                };
                if operand.ty != want {
                    return Err(self.mismatch("operand", want, operand.ty, line));
                }
                (ExprKind::Unary { op: *op, operand: Box::new(operand) }, want)
            }
            AExpr::Binary { op, lhs, rhs } => {
                let lhs = self.expr(lhs)?;
                let rhs = self.expr(rhs)?;
                let ty = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Lt => {
                        for side in [&lhs, &rhs] {
                            if side.ty != Type::Int {
                                return Err(self.mismatch("arithmetic operand", Type::Int, side.ty, line));
                            }
                        }
                        if *op == BinOp::Lt {
                            Type::Bool
                        } else {
                            Type::Int
                        }
                    }
                    BinOp::And | BinOp::Or => {
                        for side in [&lhs, &rhs] {
                            if side.ty != Type::Bool {
                                return Err(self.mismatch("logical operand", Type::Bool, side.ty, line));
                            }
                        }
                        Type::Bool
                    }
                    BinOp::Eq => {
                        let comparable = lhs.ty == rhs.ty
                            || matches!((lhs.ty, rhs.ty), (Type::Class(_) | Type::Null, Type::Class(_) | Type::Null));
                        if !comparable {
                            return Err(self.mismatch("comparison", lhs.ty, rhs.ty, line));
                        }
                        Type::Bool
                    }
                };
                (ExprKind::Binary { op: *op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, ty)
            }
            AExpr::New(name) => {
                let class =
                    self.rp.class_named(name).ok_or_else(|| ResolveError::UnknownClass { name: name.clone(), line })?;
                let site = AllocSiteId(self.rp.alloc_sites.len() as u32);
                self.rp.alloc_sites.push(AllocSiteInfo { id: site, method: self.method, line, class });
                (ExprKind::New { class, site }, Type::Class(class))
            }
            AExpr::Call { receiver, name, args } => {
                let receiver = match receiver {
                    Some(r) => self.expr(r)?,
                    None => Expr { kind: ExprKind::This, ty: Type::Class(self.owner()), line },
                };
                let class = self.class_type(&receiver, line)?;
                let target = self.rp.class(class).dispatch.get(name).copied().ok_or_else(|| {
                    ResolveError::UnknownMethod { class: self.rp.class(class).name.clone(), name: name.clone(), line }
                })?;
                let mut resolved_args = Vec::with_capacity(args.len());
                for a in args {
                    resolved_args.push(self.expr(a)?);
                }
                let callee = self.rp.method(target);
                if callee.params.len() != resolved_args.len() {
                    return Err(ResolveError::Type {
                        message: format!(
                            "`{}` takes {} argument(s), {} given",
                            callee.qualified_name,
                            callee.params.len(),
                            resolved_args.len()
                        ),
                        line,
                    });
                }
                let param_types: Vec<Type> = callee.params.iter().map(|p| callee.locals[p.index()].ty).collect();
                for (a, pty) in resolved_args.iter().zip(param_types) {
                    self.expect_assignable("argument", a.ty, pty, line)?;
                }
                let ty = self.rp.method(target).ret.unwrap_or(Type::Void);
                let site = CallSiteId(self.rp.call_sites.len() as u32);
                self.rp.call_sites.push(CallSiteInfo {
                    id: site,
                    method: self.method,
                    line,
                    name: name.clone(),
                    static_target: target,
                    receiver_type: class,
                });
                (ExprKind::Call { site, receiver: Box::new(receiver), name: name.clone(), args: resolved_args }, ty)
            }
        };
        Ok(Expr { kind, ty, line })
    }
}

fn completes_normally(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return(_) | StmtKind::Throw(_) => false,
        StmtKind::If { then_branch, else_branch, .. } => {
            else_branch.is_empty() || block_completes(then_branch) || block_completes(else_branch)
        }
        _ => true,
    }
}

fn block_completes(block: &[Stmt]) -> bool {
    block.last().is_none_or(completes_normally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn resolve_src(src: &str) -> Result<ResolvedProgram, ResolveError> {
        resolve(&parse(src).unwrap())
    }

    #[test]
    fn hierarchy_is_recorded() {
        let rp = resolve_src("class A { } class B extends A { }").unwrap();
        let (a, b) = (rp.class_named("A").unwrap(), rp.class_named("B").unwrap());
        assert_eq!(rp.class(b).superclass, Some(a));
        assert_eq!(rp.class(a).direct_subclasses, vec![b]);
        assert!(rp.is_subclass(b, a));
        assert!(!rp.is_subclass(a, b));
    }

    #[test]
    fn unknown_superclass() {
        let err = resolve_src("class B extends C { }").unwrap_err();
        assert!(matches!(&err, ResolveError::UnknownClass { name, .. } if name == "C"), "{err}");
        assert!(err.to_string().contains('C'));
    }

    #[test]
    fn cyclic_inheritance() {
        let err = resolve_src("class A extends B { } class B extends A { }").unwrap_err();
        let ResolveError::CyclicInheritance { cycle } = err else { panic!("{err:?}") };
        assert_eq!(cycle.len(), 2);
    }

    #[test]
    fn overriding_and_dispatch() {
        let rp = resolve_src("class A { int m() { return 1; } } class B extends A { int m() { return 2; } } class C extends A { }")
            .unwrap();
        let c = rp.class_named("C").unwrap();
        let b = rp.class_named("B").unwrap();
        assert_eq!(rp.method(rp.class(c).dispatch["m"]).qualified_name, "A.m");
        assert_eq!(rp.method(rp.class(b).dispatch["m"]).qualified_name, "B.m");
    }

    #[test]
    fn implicit_this_members() {
        let rp = resolve_src("class A { int f; int g() { return f; } void m() { f = g(); } }").unwrap();
        let m = rp.method(rp.method_named("A.m").unwrap());
        let StmtKind::AssignField { receiver, value, .. } = &m.body[0].kind else { panic!() };
        assert!(matches!(receiver.kind, ExprKind::This));
        assert!(matches!(value.kind, ExprKind::Call { .. }));
        assert_eq!(rp.call_sites.len(), 1);
    }

    #[test]
    fn rejects_errors() {
        for (src, needle) in [
            ("class A { void m() { x = 1; } }", "x"),
            ("class A { void m() { A a; a.nope = 1; } }", "nope"),
            ("class A { void m() { m(1); } }", "argument"),
            ("class A { int m() { return true; } }", "return"),
            ("class A { void m() { return; m(); } }", "unreachable"),
            ("class A { int f; } class B extends A { int f; }", "f"),
            ("class A { void m() { } void m() { } }", "m"),
            ("class A { void m(int a, int a) { } }", "a"),
            ("class A { void m() { if (1) { } } }", "condition"),
            ("class A { void m() { int x = 1; if (true) { int x = 2; } } }", "x"),
        ] {
            let err = resolve_src(src).expect_err(src);
            assert!(err.to_string().contains(needle), "{src}: {err}");
        }
    }

    #[test]
    fn sibling_scopes_may_reuse_names() {
        let rp = resolve_src("class A { void m(bool c) { if (c) { int t = 1; } else { bool t = true; } } }").unwrap();
        assert_eq!(rp.method(MethodId(0)).locals.len(), 3);
    }

    #[test]
    fn both_branches_returning_makes_rest_unreachable() {
        let err = resolve_src("class A { int m(bool c) {\nif (c) return 1; else return 2;\nreturn 3; } }").unwrap_err();
        assert!(matches!(err, ResolveError::Unreachable { line: 3 }));
    }
}

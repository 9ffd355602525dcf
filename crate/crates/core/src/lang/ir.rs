//! Name-resolved, typed program representation consumed by the analyses.

use super::ast::{BinOp, LineSpan, Program, UnOp};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(ClassId);
id_type!(FieldId);
id_type!(MethodId);
id_type!(
    /// Local variable slot within one method; parameters come first.
    LocalId
);
id_type!(CallSiteId);
id_type!(AllocSiteId);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Type {
    Int,
    Bool,
    Null,
    /// Result of a call to a `void` method; never assignable.
    Void,
    Class(ClassId),
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassInfo {
    pub id: ClassId,
    pub name: String,
    pub superclass: Option<ClassId>,
    pub direct_subclasses: Vec<ClassId>,
    pub own_fields: Vec<FieldId>,
    pub own_methods: Vec<MethodId>,
    /// Method name to the implementation a receiver of exactly this class runs.
    pub dispatch: BTreeMap<String, MethodId>,
    /// Every visible field, inherited ones included.
    pub fields_by_name: BTreeMap<String, FieldId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldInfo {
    pub id: FieldId,
    pub owner: ClassId,
    pub name: String,
    pub ty: Type,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalInfo {
    pub name: String,
    pub ty: Type,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodInfo {
    pub id: MethodId,
    pub owner: ClassId,
    pub name: String,
    /// `Class.method`
    pub qualified_name: String,
    pub params: Vec<LocalId>,
    pub locals: Vec<LocalInfo>,
    pub ret: Option<Type>,
    pub body: Vec<Stmt>,
    pub span: LineSpan,
}

impl MethodInfo {
    pub fn header_line(&self) -> u32 {
        self.span.first
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CallSiteInfo {
    pub id: CallSiteId,
    pub method: MethodId,
    pub line: u32,
    pub name: String,
    /// Implementation found by static lookup on the receiver's declared type.
    pub static_target: MethodId,
    pub receiver_type: ClassId,
}

#[derive(Debug, Clone, Serialize)]
pub struct AllocSiteInfo {
    pub id: AllocSiteId,
    pub method: MethodId,
    pub line: u32,
    pub class: ClassId,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
}

#[derive(Debug, Clone, Serialize)]
pub enum StmtKind {
    /// Declaration with or without initializer; an absent initializer stores the default value.
    Local { local: LocalId, init: Option<Expr> },
    AssignLocal { local: LocalId, value: Expr },
    AssignField { receiver: Expr, field: FieldId, value: Expr },
    If { cond: Expr, then_branch: Vec<Stmt>, else_branch: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    Return(Option<Expr>),
    Call(Expr),
    Throw(Expr),
}

#[derive(Debug, Clone, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: Type,
    pub line: u32,
}

#[derive(Debug, Clone, Serialize)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Null,
    This,
    Local(LocalId),
    Field { receiver: Box<Expr>, field: FieldId },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnOp, operand: Box<Expr> },
    Call { site: CallSiteId, receiver: Box<Expr>, name: String, args: Vec<Expr> },
    New { class: ClassId, site: AllocSiteId },
}

impl Expr {
    /// Visits sub-expressions in evaluation order (operands before the operator).
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match &self.kind {
            ExprKind::Field { receiver, .. } => receiver.walk(f),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Call { receiver, args, .. } => {
                receiver.walk(f);
                for a in args {
                    a.walk(f);
                }
            }
            _ => {}
        }
        f(self);
    }

    /// A receiver that may evaluate to `null`: anything except `this` and a fresh allocation.
    pub fn may_be_null(&self) -> bool {
        !matches!(self.kind, ExprKind::This | ExprKind::New { .. })
    }
}

impl Stmt {
    /// Expressions evaluated by this statement itself (not by nested statements).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Local { init, .. } => init.iter().collect(),
            StmtKind::AssignLocal { value, .. } => vec![value],
            StmtKind::AssignField { receiver, value, .. } => vec![receiver, value],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::Return(e) => e.iter().collect(),
            StmtKind::Call(e) | StmtKind::Throw(e) => vec![e],
        }
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                for s in then_branch.iter().chain(else_branch) {
                    s.walk(f);
                }
            }
            StmtKind::While { body, .. } => {
                for s in body {
                    s.walk(f);
                }
            }
            _ => {}
        }
    }
}

/// A program after name and type resolution.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedProgram {
    #[serde(skip)]
    pub ast: Program,
    pub classes: Vec<ClassInfo>,
    pub fields: Vec<FieldInfo>,
    pub methods: Vec<MethodInfo>,
    pub call_sites: Vec<CallSiteInfo>,
    pub alloc_sites: Vec<AllocSiteInfo>,
    pub class_by_name: BTreeMap<String, ClassId>,
}

impl ResolvedProgram {
    pub fn class(&self, id: ClassId) -> &ClassInfo {
        &self.classes[id.index()]
    }

    pub fn field(&self, id: FieldId) -> &FieldInfo {
        &self.fields[id.index()]
    }

    pub fn method(&self, id: MethodId) -> &MethodInfo {
        &self.methods[id.index()]
    }

    pub fn call_site(&self, id: CallSiteId) -> &CallSiteInfo {
        &self.call_sites[id.index()]
    }

    pub fn alloc_site(&self, id: AllocSiteId) -> &AllocSiteInfo {
        &self.alloc_sites[id.index()]
    }

    pub fn class_named(&self, name: &str) -> Option<ClassId> {
        self.class_by_name.get(name).copied()
    }

    /// Looks up `Class.method` (declared in that class, not inherited).
    pub fn method_named(&self, qualified: &str) -> Option<MethodId> {
        self.methods.iter().find(|m| m.qualified_name == qualified).map(|m| m.id)
    }

    pub fn is_subclass(&self, sub: ClassId, sup: ClassId) -> bool {
        let mut cur = Some(sub);
        while let Some(c) = cur {
            if c == sup {
                return true;
            }
            cur = self.class(c).superclass;
        }
        false
    }

    /// `root` and all of its transitive subclasses, in id order.
    pub fn subclasses_of(&self, root: ClassId) -> Vec<ClassId> {
        self.classes.iter().map(|c| c.id).filter(|&c| self.is_subclass(c, root)).collect()
    }

    pub fn is_assignable(&self, from: Type, to: Type) -> bool {
        match (from, to) {
            (Type::Null, Type::Class(_)) => true,
            (Type::Class(a), Type::Class(b)) => self.is_subclass(a, b),
            (Type::Void, _) | (_, Type::Void) => false,
            (a, b) => a == b,
        }
    }

    pub fn type_name(&self, ty: Type) -> String {
        match ty {
            Type::Int => "int".into(),
            Type::Bool => "bool".into(),
            Type::Null => "null".into(),
            Type::Void => "void".into(),
            Type::Class(c) => self.class(c).name.clone(),
        }
    }

    pub fn method_at_line(&self, line: u32) -> Option<MethodId> {
        self.methods.iter().find(|m| m.span.contains(line)).map(|m| m.id)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Null => f.write_str("null"),
            Type::Void => f.write_str("void"),
            Type::Class(c) => write!(f, "class#{}", c.0),
        }
    }
}

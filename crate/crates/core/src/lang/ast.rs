//! Surface syntax tree produced by the parser.

use serde::Serialize;

/// Inclusive range of 1-based source lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LineSpan {
    pub first: u32,
    pub last: u32,
}

impl LineSpan {
    pub fn new(first: u32, last: u32) -> Self {
        Self { first, last }
    }

    pub fn contains(&self, line: u32) -> bool {
        self.first <= line && line <= self.last
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum TypeName {
    Int,
    Bool,
    Class(String),
}

impl std::fmt::Display for TypeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TypeName::Int => f.write_str("int"),
            TypeName::Bool => f.write_str("bool"),
            TypeName::Class(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Program {
    pub source_name: String,
    pub classes: Vec<ClassDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDecl {
    pub name: String,
    pub superclass: Option<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    /// From the `class` keyword to the closing brace.
    pub span: LineSpan,
    /// Line holding the opening brace.
    pub body_open_line: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeName,
    pub span: LineSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Param {
    pub name: String,
    pub ty: TypeName,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodDecl {
    pub owner: String,
    pub name: String,
    pub params: Vec<Param>,
    /// `None` for `void`.
    pub ret: Option<TypeName>,
    pub body: Vec<Stmt>,
    /// Header line through closing-brace line.
    pub span: LineSpan,
}

impl MethodDecl {
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.owner, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StmtKind {
    LocalDecl { ty: TypeName, name: String, init: Option<Expr> },
    /// Target is a `Name` or a `Field` expression.
    Assign { target: Expr, value: Expr },
    If { cond: Expr, then_branch: Vec<Stmt>, else_branch: Option<Vec<Stmt>> },
    While { cond: Expr, body: Vec<Stmt> },
    Return(Option<Expr>),
    /// Expression statement; always a call.
    Call(Expr),
    Throw(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Eq,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Eq => "==",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq => 3,
            BinOp::Lt => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Null,
    This,
    Name(String),
    Field { receiver: Box<Expr>, name: String },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnOp, operand: Box<Expr> },
    /// `receiver` is `None` for an implicit `this` call.
    Call { receiver: Option<Box<Expr>>, name: String, args: Vec<Expr> },
    New(String),
}

impl Program {
    /// Copy with every line/column zeroed; used to compare structure across layouts.
    pub fn without_positions(&self) -> Program {
        Program {
            source_name: self.source_name.clone(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassDecl {
                    name: c.name.clone(),
                    superclass: c.superclass.clone(),
                    fields: c
                        .fields
                        .iter()
                        .map(|f| FieldDecl { span: LineSpan::new(0, 0), ..f.clone() })
                        .collect(),
                    methods: c
                        .methods
                        .iter()
                        .map(|m| MethodDecl {
                            body: strip_block(&m.body),
                            span: LineSpan::new(0, 0),
                            ..m.clone()
                        })
                        .collect(),
                    span: LineSpan::new(0, 0),
                    body_open_line: 0,
                })
                .collect(),
        }
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodDecl> {
        self.classes.iter().flat_map(|c| c.methods.iter())
    }
}

fn strip_block(block: &[Stmt]) -> Vec<Stmt> {
    block.iter().map(strip_stmt).collect()
}

fn strip_stmt(stmt: &Stmt) -> Stmt {
    let kind = match &stmt.kind {
        StmtKind::LocalDecl { ty, name, init } => StmtKind::LocalDecl {
            ty: ty.clone(),
            name: name.clone(),
            init: init.as_ref().map(strip_expr),
        },
        StmtKind::Assign { target, value } => StmtKind::Assign { target: strip_expr(target), value: strip_expr(value) },
        StmtKind::If { cond, then_branch, else_branch } => StmtKind::If {
            cond: strip_expr(cond),
            then_branch: strip_block(then_branch),
            else_branch: else_branch.as_deref().map(strip_block),
        },
        StmtKind::While { cond, body } => StmtKind::While { cond: strip_expr(cond), body: strip_block(body) },
        StmtKind::Return(e) => StmtKind::Return(e.as_ref().map(strip_expr)),
        StmtKind::Call(e) => StmtKind::Call(strip_expr(e)),
        StmtKind::Throw(e) => StmtKind::Throw(strip_expr(e)),
    };
    Stmt { kind, line: 0 }
}

fn strip_expr(expr: &Expr) -> Expr {
    let kind = match &expr.kind {
        ExprKind::Field { receiver, name } => ExprKind::Field { receiver: Box::new(strip_expr(receiver)), name: name.clone() },
        ExprKind::Binary { op, lhs, rhs } => ExprKind::Binary {
            op: *op,
            lhs: Box::new(strip_expr(lhs)),
            rhs: Box::new(strip_expr(rhs)),
        },
        ExprKind::Unary { op, operand } => ExprKind::Unary { op: *op, operand: Box::new(strip_expr(operand)) },
        ExprKind::Call { receiver, name, args } => ExprKind::Call {
            receiver: receiver.as_ref().map(|r| Box::new(strip_expr(r))),
            name: name.clone(),
            args: args.iter().map(strip_expr).collect(),
        },
        other => other.clone(),
    };
    Expr { kind, pos: Pos::default() }
}

//! MJ, a small class-based language: lexer, parser, pretty-printer and resolver.
//!
//! MJ has single-inheritance classes with `int`, `bool` and object fields,
//! virtual dispatch, `if`/`while`/`return`/`throw`, and nothing else. Every
//! statement carries the 1-based source line it starts on.

pub mod ast;
pub mod ir;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod resolve;

pub use ast::Program;
pub use ir::ResolvedProgram;
pub use parser::{parse, parse_named};
pub use pretty::pretty;
pub use resolve::resolve;

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(line: u32, col: u32, message: impl Into<String>) -> Self {
        Self { line, col, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown class `{name}` at line {line}")]
    UnknownClass { name: String, line: u32 },
    #[error("unknown name `{name}` at line {line}")]
    UnknownName { name: String, line: u32 },
    #[error("class `{class}` has no field `{name}` (line {line})")]
    UnknownField { class: String, name: String, line: u32 },
    #[error("class `{class}` has no method `{name}` (line {line})")]
    UnknownMethod { class: String, name: String, line: u32 },
    #[error("cyclic inheritance: {}", cycle.join(" -> "))]
    CyclicInheritance { cycle: Vec<String> },
    #[error("duplicate {what} `{name}` at line {line}")]
    Duplicate { what: &'static str, name: String, line: u32 },
    #[error("type error at line {line}: {message}")]
    Type { message: String, line: u32 },
    #[error("unreachable statement at line {line}")]
    Unreachable { line: u32 },
}

/// Either front-end failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

/// Parses and resolves in one step.
pub fn load(source: &str, source_name: &str) -> Result<ResolvedProgram, FrontendError> {
    let program = parse_named(source, source_name)?;
    Ok(resolve(&program)?)
}

/// Lines holding more than one statement. The attribution machinery works on
/// whole lines, so analyzed inputs are expected to return an empty list here.
pub fn lint_one_statement_per_line(program: &Program) -> Vec<u32> {
    let mut per_line: BTreeMap<u32, usize> = BTreeMap::new();
    fn visit(stmts: &[ast::Stmt], per_line: &mut BTreeMap<u32, usize>) {
        for s in stmts {
            *per_line.entry(s.line).or_default() += 1;
            match &s.kind {
                ast::StmtKind::If { then_branch, else_branch, .. } => {
                    visit(then_branch, per_line);
                    if let Some(e) = else_branch {
                        visit(e, per_line);
                    }
                }
                ast::StmtKind::While { body, .. } => visit(body, per_line),
                _ => {}
            }
        }
    }
    for m in program.methods() {
        visit(&m.body, &mut per_line);
    }
    per_line.into_iter().filter(|&(_, n)| n > 1).map(|(l, _)| l).collect()
}

//! Pretty-printer producing the one-statement-per-line normal form.

use super::ast::*;
use std::fmt::Write;

pub fn pretty(program: &Program) -> String {
    let mut out = String::new();
    for (i, class) in program.classes.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match &class.superclass {
            Some(sup) => writeln!(out, "class {} extends {} {{", class.name, sup).unwrap(),
            None => writeln!(out, "class {} {{", class.name).unwrap(),
        }
        for field in &class.fields {
            writeln!(out, "  {} {};", field.ty, field.name).unwrap();
        }
        for method in &class.methods {
            let ret = method.ret.as_ref().map_or_else(|| "void".to_string(), |t| t.to_string());
            let params: Vec<String> = method.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
            writeln!(out, "  {} {}({}) {{", ret, method.name, params.join(", ")).unwrap();
            block(&mut out, &method.body, 2);
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for stmt in stmts {
        statement(out, stmt, depth);
    }
}

fn statement(out: &mut String, stmt: &Stmt, depth: usize) {
    indent(out, depth);
    match &stmt.kind {
        StmtKind::LocalDecl { ty, name, init: Some(e) } => writeln!(out, "{ty} {name} = {};", expr(e)).unwrap(),
        StmtKind::LocalDecl { ty, name, init: None } => writeln!(out, "{ty} {name};").unwrap(),
        StmtKind::Assign { target, value } => writeln!(out, "{} = {};", expr(target), expr(value)).unwrap(),
        StmtKind::If { cond, then_branch, else_branch } => {
            writeln!(out, "if ({}) {{", expr(cond)).unwrap();
            block(out, then_branch, depth + 1);
            indent(out, depth);
            match else_branch {
                Some(els) => {
                    out.push_str("} else {\n");
                    block(out, els, depth + 1);
                    indent(out, depth);
                    out.push_str("}\n");
                }
                None => out.push_str("}\n"),
            }
        }
        StmtKind::While { cond, body } => {
            writeln!(out, "while ({}) {{", expr(cond)).unwrap();
            block(out, body, depth + 1);
            indent(out, depth);
            out.push_str("}\n");
        }
        StmtKind::Return(Some(e)) => writeln!(out, "return {};", expr(e)).unwrap(),
        StmtKind::Return(None) => out.push_str("return;\n"),
        StmtKind::Call(e) => writeln!(out, "{};", expr(e)).unwrap(),
        StmtKind::Throw(e) => writeln!(out, "throw {};", expr(e)).unwrap(),
    }
}

/// Renders an expression with the minimum parentheses needed to reparse it identically.
pub fn expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Null => "null".into(),
        ExprKind::This => "this".into(),
        ExprKind::Name(n) => n.clone(),
        ExprKind::New(c) => format!("new {c}()"),
        ExprKind::Field { receiver, name } => format!("{}.{}", postfix_operand(receiver), name),
        ExprKind::Call { receiver, name, args } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            match receiver {
                Some(r) => format!("{}.{}({})", postfix_operand(r), name, args.join(", ")),
                None => format!("{}({})", name, args.join(", ")),
            }
        }
        ExprKind::Unary { op, operand } => {
            let sym = match op {
                UnOp::Not => "!",
                UnOp::Neg => "-",
            };
            match operand.kind {
                ExprKind::Binary { .. } => format!("{sym}({})", expr(operand)),
                _ => format!("{sym}{}", expr(operand)),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let l = match &lhs.kind {
                ExprKind::Binary { op: inner, .. } if inner.precedence() < op.precedence() => format!("({})", expr(lhs)),
                _ => expr(lhs),
            };
            let r = match &rhs.kind {
                ExprKind::Binary { op: inner, .. } if inner.precedence() <= op.precedence() => format!("({})", expr(rhs)),
                _ => expr(rhs),
            };
            format!("{l} {} {r}", op.symbol())
        }
    }
}

fn postfix_operand(e: &Expr) -> String {
    match e.kind {
        ExprKind::Binary { .. } | ExprKind::Unary { .. } => format!("({})", expr(e)),
        _ => expr(e),
    }
}

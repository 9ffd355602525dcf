//! Recursive-descent parser for MJ.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Parses a whole compilation unit.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    parse_named(source, "<input>")
}

pub fn parse_named(source: &str, source_name: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut classes = Vec::new();
    while !p.at(&Tok::Eof) {
        classes.push(p.class_decl()?);
    }
    Ok(Program { source_name: source_name.to_string(), classes })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn at(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.col, format!("expected {expected}, found {}", t.tok.describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if self.at(&tok) {
            Ok(self.advance())
        } else {
            Err(self.error_here(&format!("`{}`", tok.text())))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                self.advance();
                Ok(name)
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    fn type_name(&mut self) -> Result<TypeName, ParseError> {
        match &self.peek().tok {
            Tok::IntKw => {
                self.advance();
                Ok(TypeName::Int)
            }
            Tok::BoolKw => {
                self.advance();
                Ok(TypeName::Bool)
            }
            Tok::Ident(name) => {
                let name = name.clone();
                self.advance();
                Ok(TypeName::Class(name))
            }
            _ => Err(self.error_here("type")),
        }
    }

    fn class_decl(&mut self) -> Result<ClassDecl, ParseError> {
        let start = self.expect(Tok::Class)?;
        let name = self.ident()?;
        let superclass = if self.eat(&Tok::Extends) { Some(self.ident()?) } else { None };
        let open = self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.at(&Tok::RBrace) {
            if self.at(&Tok::Eof) {
                return Err(self.error_here("`}`"));
            }
            let first_line = self.peek().line;
            let ret = if self.eat(&Tok::Void) { None } else { Some(self.type_name()?) };
            let member = self.ident()?;
            if self.at(&Tok::LParen) {
                methods.push(self.method_rest(&name, member, ret, first_line)?);
            } else {
                let Some(ty) = ret else {
                    return Err(self.error_here("`(`"));
                };
                let semi = self.expect(Tok::Semi)?;
                fields.push(FieldDecl { name: member, ty, span: LineSpan::new(first_line, semi.line) });
            }
        }
        let close = self.expect(Tok::RBrace)?;
        Ok(ClassDecl {
            name,
            superclass,
            fields,
            methods,
            span: LineSpan::new(start.line, close.line),
            body_open_line: open.line,
        })
    }

    fn method_rest(
        &mut self,
        owner: &str,
        name: String,
        ret: Option<TypeName>,
        first_line: u32,
    ) -> Result<MethodDecl, ParseError> {
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                let ty = self.type_name()?;
                let pname = self.ident()?;
                params.push(Param { name: pname, ty });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let body = self.stmts_until_rbrace()?;
        let close = self.expect(Tok::RBrace)?;
        Ok(MethodDecl {
            owner: owner.to_string(),
            name,
            params,
            ret,
            body,
            span: LineSpan::new(first_line, close.line),
        })
    }

    fn stmts_until_rbrace(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let mut out = Vec::new();
        while !self.at(&Tok::RBrace) {
            if self.at(&Tok::Eof) {
                return Err(self.error_here("`}`"));
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    /// Body of `if`/`else`/`while`: a braced block or one statement.
    fn branch(&mut self) -> Result<Vec<Stmt>, ParseError> {
        if self.eat(&Tok::LBrace) {
            let body = self.stmts_until_rbrace()?;
            self.expect(Tok::RBrace)?;
            Ok(body)
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let line = self.peek().line;
        let kind = match self.peek().tok.clone() {
            Tok::If => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_branch = self.branch()?;
                let else_branch = if self.eat(&Tok::Else) { Some(self.branch()?) } else { None };
                StmtKind::If { cond, then_branch, else_branch }
            }
            Tok::While => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.branch()?;
                StmtKind::While { cond, body }
            }
            Tok::Return => {
                self.advance();
                let value = if self.at(&Tok::Semi) { None } else { Some(self.expr()?) };
                self.expect(Tok::Semi)?;
                StmtKind::Return(value)
            }
            Tok::Throw => {
                self.advance();
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Throw(value)
            }
            Tok::IntKw | Tok::BoolKw => self.local_decl()?,
            Tok::Ident(_) if matches!(self.peek_at(1), Tok::Ident(_)) => self.local_decl()?,
            _ => {
                let start = self.peek().clone();
                let target = self.expr()?;
                if self.eat(&Tok::Assign) {
                    if !matches!(target.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
                        return Err(ParseError::new(start.line, start.col, "invalid assignment target"));
                    }
                    let value = self.expr()?;
                    self.expect(Tok::Semi)?;
                    StmtKind::Assign { target, value }
                } else {
                    if !matches!(target.kind, ExprKind::Call { .. }) {
                        return Err(ParseError::new(start.line, start.col, "expression statement must be a call"));
                    }
                    self.expect(Tok::Semi)?;
                    StmtKind::Call(target)
                }
            }
        };
        Ok(Stmt { kind, line })
    }

    fn local_decl(&mut self) -> Result<StmtKind, ParseError> {
        let ty = self.type_name()?;
        let name = self.ident()?;
        let init = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
        self.expect(Tok::Semi)?;
        Ok(StmtKind::LocalDecl { ty, name, init })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary_op(tok: &Tok) -> Option<BinOp> {
        Some(match tok {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::Lt => BinOp::Lt,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            _ => return None,
        })
    }

    // Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = Self::binary_op(&self.peek().tok) {
            if op.precedence() < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(op.precedence() + 1)?;
            let pos = lhs.pos;
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, pos };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        let op = match t.tok {
            Tok::Bang => UnOp::Not,
            Tok::Minus => UnOp::Neg,
            _ => return self.postfix(),
        };
        self.advance();
        let operand = self.unary()?;
        Ok(Expr { kind: ExprKind::Unary { op, operand: Box::new(operand) }, pos: Pos { line: t.line, col: t.col } })
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.at(&Tok::Dot) {
            let dot = self.advance();
            let name = self.ident()?;
            let pos = Pos { line: dot.line, col: dot.col };
            e = if self.at(&Tok::LParen) {
                let args = self.args()?;
                Expr { kind: ExprKind::Call { receiver: Some(Box::new(e)), name, args }, pos }
            } else {
                Expr { kind: ExprKind::Field { receiver: Box::new(e), name }, pos }
            };
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        let pos = Pos { line: t.line, col: t.col };
        let kind = match t.tok {
            Tok::Int(v) => {
                self.advance();
                ExprKind::Int(v)
            }
            Tok::True => {
                self.advance();
                ExprKind::Bool(true)
            }
            Tok::False => {
                self.advance();
                ExprKind::Bool(false)
            }
            Tok::Null => {
                self.advance();
                ExprKind::Null
            }
            Tok::This => {
                self.advance();
                ExprKind::This
            }
            Tok::New => {
                self.advance();
                let class = self.ident()?;
                self.expect(Tok::LParen)?;
                self.expect(Tok::RParen)?;
                ExprKind::New(class)
            }
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            Tok::Ident(name) => {
                self.advance();
                if self.at(&Tok::LParen) {
                    let args = self.args()?;
                    ExprKind::Call { receiver: None, name, args }
                } else {
                    ExprKind::Name(name)
                }
            }
            _ => return Err(self.error_here("expression")),
        };
        Ok(Expr { kind, pos })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let p = parse("class A { int f; void m() { f = 1; } }").unwrap();
        assert_eq!(p.classes.len(), 1);
        let a = &p.classes[0];
        assert_eq!(a.fields.len(), 1);
        assert_eq!(a.methods.len(), 1);
        assert_eq!(a.methods[0].body.len(), 1);
        assert_eq!(a.methods[0].body[0].line, 1);
    }

    #[test]
    fn empty_source_is_empty_program() {
        assert!(parse("").unwrap().classes.is_empty());
        assert!(parse("  // nothing\n\n").unwrap().classes.is_empty());
    }

    #[test]
    fn unbalanced_brace_reports_line_one() {
        let err = parse("class A {").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn statement_lines_follow_layout() {
        let src = "class A {\n  int m(int x) {\n    // note\n\n    int y = x;\n    if (y < 3)\n      y = 3;\n    return y;\n  }\n}\n";
        let p = parse(src).unwrap();
        let m = &p.classes[0].methods[0];
        assert_eq!(m.span, LineSpan::new(2, 9));
        let lines: Vec<u32> = m.body.iter().map(|s| s.line).collect();
        assert_eq!(lines, vec![5, 6, 8]);
        let StmtKind::If { then_branch, .. } = &m.body[1].kind else { panic!() };
        assert_eq!(then_branch[0].line, 7);
    }

    #[test]
    fn precedence_and_chains() {
        let p = parse("class A { A n; int v; bool m() { return 1 + 2 * 3 < n.n.v || !(v == 2) && true; } }").unwrap();
        let StmtKind::Return(Some(e)) = &p.classes[0].methods[0].body[0].kind else { panic!() };
        let ExprKind::Binary { op: BinOp::Or, lhs, rhs } = &e.kind else { panic!("{e:?}") };
        assert!(matches!(lhs.kind, ExprKind::Binary { op: BinOp::Lt, .. }));
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinOp::And, .. }));
    }

    #[test]
    fn declarations_versus_assignments() {
        let p = parse("class A { A a; void m() { A b = a; b = a; a.a = b; m(); b.m(); } }").unwrap();
        let kinds: Vec<_> = p.classes[0].methods[0]
            .body
            .iter()
            .map(|s| match s.kind {
                StmtKind::LocalDecl { .. } => "decl",
                StmtKind::Assign { .. } => "assign",
                StmtKind::Call(_) => "call",
                _ => "other",
            })
            .collect();
        assert_eq!(kinds, vec!["decl", "assign", "assign", "call", "call"]);
    }

    #[test]
    fn rejects_non_call_expression_statement() {
        let err = parse("class A { void m() {\n 1 + 2; } }").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn rejects_bad_assignment_target() {
        assert!(parse("class A { void m() { m() = 1; } }").is_err());
    }
}

//! Recursive-descent parser for robot-command programs.
//!
//! Statements need no terminator: an expression statement must be a call,
//! so no statement can begin with a token that would continue the previous
//! expression. A trailing `;` is accepted and ignored.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Deepest permitted nesting of blocks and sub-expressions.
pub const MAX_NESTING: usize = 96;

pub fn parse_statements(src: &str) -> Result<Vec<Stmt>, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, depth: 0 };
    let mut stmts = Vec::new();
    while !p.at_eof() {
        stmts.push(p.statement()?);
    }
    Ok(stmts)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek().tok, Tok::Eof)
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek().tok, Tok::Sym(x) if x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek().tok, Tok::Keyword(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Keyword(k) => format!("keyword `{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.span, format!("expected {expected}, found {}", Self::describe(&t.tok)))
    }

    fn expect_sym(&mut self, s: &str) -> Result<Span, ParseError> {
        if self.is_sym(s) {
            Ok(self.advance().span)
        } else {
            Err(self.error_here(&format!("`{s}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                let span = self.advance().span;
                Ok((name, span))
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    fn unclosed_at_eof(&self, open: Span, err: ParseError) -> ParseError {
        if self.at_eof() && !err.message.starts_with("unclosed") {
            ParseError::new(open, "unclosed `(`")
        } else {
            err
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::new(self.peek().span, "nesting too deep"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let span = self.peek().span;
        let kind = match self.peek().tok.clone() {
            Tok::Keyword("let") => {
                self.advance();
                let (name, _) = self.ident()?;
                self.expect_sym("=")?;
                StmtKind::Let { name, value: self.expr()? }
            }
            Tok::Keyword("if") => return self.if_statement(),
            Tok::Keyword("while") => {
                self.advance();
                let cond = self.paren_cond()?;
                let body = self.block(true)?;
                StmtKind::While { cond, body }
            }
            Tok::Keyword("for") => {
                self.advance();
                let (var, _) = self.ident()?;
                if !self.is_kw("in") {
                    return Err(self.error_here("`in`"));
                }
                self.advance();
                let iter = self.expr()?;
                let body = self.block(true)?;
                StmtKind::ForEach { var, iter, body }
            }
            Tok::Keyword("return") => {
                let line = self.peek().span.line;
                self.advance();
                // a value must start on the same line as `return`
                let ends = self.at_eof()
                    || self.peek().span.line != line
                    || self.is_sym(";")
                    || self.is_sym("}")
                    || matches!(self.peek().tok, Tok::Keyword("let" | "if" | "while" | "for" | "return" | "else"));
                StmtKind::Return(if ends { None } else { Some(self.expr()?) })
            }
            Tok::Ident(name) if matches!(self.peek_at(1), Tok::Sym("=")) => {
                self.advance();
                self.advance();
                StmtKind::Assign { name, value: self.expr()? }
            }
            Tok::Ident(_) if matches!(self.peek_at(1), Tok::Sym("(")) => {
                let e = self.expr()?;
                if !matches!(e.kind, ExprKind::Call { .. }) {
                    return Err(ParseError::new(span, "only calls may be used as statements"));
                }
                StmtKind::Call(e)
            }
            _ => return Err(self.error_here("statement")),
        };
        self.eat_sym(";");
        Ok(Stmt::new(kind, span))
    }

    fn if_statement(&mut self) -> Result<Stmt, ParseError> {
        let span = self.advance().span;
        let cond = self.paren_cond()?;
        let then_body = self.block(false)?;
        let else_body = if self.is_kw("else") {
            self.advance();
            if self.is_kw("if") {
                self.enter()?;
                let nested = self.if_statement();
                self.leave();
                Some(vec![nested?])
            } else {
                Some(self.block(false)?)
            }
        } else {
            None
        };
        Ok(Stmt::new(StmtKind::If { cond, then_body, else_body }, span))
    }

    fn paren_cond(&mut self) -> Result<Expr, ParseError> {
        let open = self.expect_sym("(")?;
        let e = self.expr().map_err(|err| self.unclosed_at_eof(open, err))?;
        if !self.is_sym(")") {
            return Err(ParseError::new(open, "unclosed `(`"));
        }
        self.advance();
        Ok(e)
    }

    fn block(&mut self, non_empty: bool) -> Result<Vec<Stmt>, ParseError> {
        let open = self.expect_sym("{")?;
        self.enter()?;
        let mut body = Vec::new();
        while !self.is_sym("}") {
            if self.at_eof() {
                return Err(ParseError::new(open, "unclosed `{`"));
            }
            body.push(self.statement()?);
        }
        self.advance();
        self.leave();
        if non_empty && body.is_empty() {
            return Err(ParseError::new(open, "loop body must not be empty"));
        }
        Ok(body)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let e = self.binary(1);
        self.leave();
        e
    }

    fn peek_binop(&self) -> Option<BinaryOp> {
        let op = match &self.peek().tok {
            Tok::Sym("+") => BinaryOp::Add,
            Tok::Sym("-") => BinaryOp::Sub,
            Tok::Sym("*") => BinaryOp::Mul,
            Tok::Sym("/") => BinaryOp::Div,
            Tok::Sym("<") => BinaryOp::Lt,
            Tok::Sym(">") => BinaryOp::Gt,
            Tok::Sym("<=") => BinaryOp::Le,
            Tok::Sym(">=") => BinaryOp::Ge,
            Tok::Sym("==") => BinaryOp::Eq,
            Tok::Sym("!=") => BinaryOp::Ne,
            Tok::Keyword("and") => BinaryOp::And,
            Tok::Keyword("or") => BinaryOp::Or,
            _ => return None,
        };
        Some(op)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let span = self.advance().span;
            self.enter()?;
            let rhs = self.binary(prec + 1);
            self.leave();
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs?) }, span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let op = if self.is_kw("not") {
            UnaryOp::Not
        } else if self.is_sym("-") {
            UnaryOp::Neg
        } else {
            return self.postfix();
        };
        let span = self.advance().span;
        self.enter()?;
        let operand = self.unary();
        self.leave();
        Ok(Expr::new(ExprKind::Unary { op, operand: Box::new(operand?) }, span))
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.is_sym("[") {
            let span = self.advance().span;
            let index = self.expr()?;
            self.expect_sym("]")?;
            e = Expr::new(ExprKind::Index { target: Box::new(e), index: Box::new(index) }, span);
        }
        Ok(e)
    }

    fn comma_list(&mut self, close: &str) -> Result<Vec<Expr>, ParseError> {
        let mut items = Vec::new();
        if self.eat_sym(close) {
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.eat_sym(close) {
                return Ok(items);
            }
            if !self.eat_sym(",") {
                return Err(self.error_here(&format!("`,` or `{close}`")));
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let span = self.peek().span;
        let kind = match self.peek().tok.clone() {
            Tok::Number(n) => {
                self.advance();
                ExprKind::Literal(Literal::Number(n))
            }
            Tok::Str(s) => {
                self.advance();
                ExprKind::Literal(Literal::Str(s))
            }
            Tok::Keyword("true") => {
                self.advance();
                ExprKind::Literal(Literal::Bool(true))
            }
            Tok::Keyword("false") => {
                self.advance();
                ExprKind::Literal(Literal::Bool(false))
            }
            Tok::Ident(name) => {
                self.advance();
                if self.eat_sym("(") {
                    ExprKind::Call { name, args: self.comma_list(")")? }
                } else {
                    ExprKind::Var(name)
                }
            }
            Tok::Sym("(") => {
                self.advance();
                let inner = self.expr().map_err(|err| self.unclosed_at_eof(span, err))?;
                if !self.is_sym(")") {
                    return Err(ParseError::new(span, "unclosed `(`"));
                }
                self.advance();
                return Ok(inner);
            }
            Tok::Sym("[") => {
                self.advance();
                ExprKind::List(self.comma_list("]")?)
            }
            _ => return Err(self.error_here("expression")),
        };
        Ok(Expr::new(kind, span))
    }
}

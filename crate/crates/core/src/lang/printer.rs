//! Canonical source formatting: one statement per line, 2-space indent,
//! minimal parentheses.

use std::fmt::Write;

use super::ast::*;

pub fn print_statements(stmts: &[Stmt]) -> String {
    let mut out = String::new();
    for s in stmts {
        write_stmt(&mut out, s, 0);
    }
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_block(out: &mut String, body: &[Stmt], level: usize) {
    out.push_str("{\n");
    for s in body {
        write_stmt(out, s, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn write_stmt(out: &mut String, stmt: &Stmt, level: usize) {
    indent(out, level);
    write_stmt_inline(out, stmt, level);
    out.push('\n');
}

fn write_stmt_inline(out: &mut String, stmt: &Stmt, level: usize) {
    match &stmt.kind {
        StmtKind::Let { name, value } => {
            let _ = write!(out, "let {name} = {}", expr_to_string(value));
        }
        StmtKind::Assign { name, value } => {
            let _ = write!(out, "{name} = {}", expr_to_string(value));
        }
        StmtKind::Call(e) => out.push_str(&expr_to_string(e)),
        StmtKind::Return(None) => out.push_str("return;"),
        StmtKind::Return(Some(e)) => {
            let _ = write!(out, "return {}", expr_to_string(e));
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({}) ", expr_to_string(cond));
            write_block(out, body, level);
        }
        StmtKind::ForEach { var, iter, body } => {
            let _ = write!(out, "for {var} in {} ", expr_to_string(iter));
            write_block(out, body, level);
        }
        StmtKind::If { cond, then_body, else_body } => {
            let _ = write!(out, "if ({}) ", expr_to_string(cond));
            write_block(out, then_body, level);
            match else_body.as_deref() {
                None => {}
                Some([nested @ Stmt { kind: StmtKind::If { .. }, .. }]) => {
                    out.push_str(" else ");
                    write_stmt_inline(out, nested, level);
                }
                Some(body) => {
                    out.push_str(" else ");
                    write_block(out, body, level);
                }
            }
        }
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            '\r' => q.push_str("\\r"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

pub fn format_number(n: f64) -> String {
    // `{}` on f64 is the shortest string that parses back to the same value
    // and never uses exponent notation.
    format!("{n}")
}

/// Writes `e`, parenthesizing if its own precedence is below `min_prec`.
fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    match &e.kind {
        ExprKind::Literal(Literal::Number(n)) => out.push_str(&format_number(*n)),
        ExprKind::Literal(Literal::Str(s)) => out.push_str(&quote(s)),
        ExprKind::Literal(Literal::Bool(b)) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::List(items) => {
            out.push('[');
            write_args(out, items);
            out.push(']');
        }
        ExprKind::Call { name, args } => {
            out.push_str(name);
            out.push('(');
            write_args(out, args);
            out.push(')');
        }
        ExprKind::Index { target, index } => {
            write_expr(out, target, UNARY_PRECEDENCE + 1);
            out.push('[');
            write_expr(out, index, 0);
            out.push(']');
        }
        ExprKind::Unary { op, operand } => {
            let paren = UNARY_PRECEDENCE < min_prec;
            if paren {
                out.push('(');
            }
            out.push_str(match op {
                UnaryOp::Not => "not ",
                UnaryOp::Neg => "-",
            });
            write_expr(out, operand, UNARY_PRECEDENCE);
            if paren {
                out.push(')');
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            write_expr(out, lhs, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs, prec + 1);
            if paren {
                out.push(')');
            }
        }
    }
}

fn write_args(out: &mut String, items: &[Expr]) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, item, 0);
    }
}

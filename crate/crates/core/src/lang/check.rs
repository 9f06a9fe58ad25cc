//! Static checks: unknown builtins, builtin arity, unbound variables.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::builtins::lookup;
use super::Program;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    /// Source did not parse.
    #[serde(rename = "E000")]
    Parse,
    #[serde(rename = "E001")]
    UnknownBuiltin,
    #[serde(rename = "E002")]
    WrongArity,
    #[serde(rename = "E003")]
    UnboundVariable,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Parse => "E000",
            DiagnosticCode::UnknownBuiltin => "E001",
            DiagnosticCode::WrongArity => "E002",
            DiagnosticCode::UnboundVariable => "E003",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: u32,
    pub column: u32,
    pub code: DiagnosticCode,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {} {}", self.line, self.column, self.code.as_str(), self.message)
    }
}

pub fn static_check(program: &Program) -> Vec<Diagnostic> {
    let mut checker = Checker { scopes: vec![HashSet::new()], diags: Vec::new() };
    checker.block(&program.statements, false);
    checker.diags
}

struct Checker {
    scopes: Vec<HashSet<String>>,
    diags: Vec<Diagnostic>,
}

impl Checker {
    fn push(&mut self, span: Span, code: DiagnosticCode, message: String) {
        self.diags.push(Diagnostic { line: span.line, column: span.column, code, message });
    }

    fn bound(&self, name: &str) -> bool {
        self.scopes.iter().rev().any(|s| s.contains(name))
    }

    fn bind(&mut self, name: &str) {
        self.scopes.last_mut().expect("scope").insert(name.to_owned());
    }

    fn block(&mut self, body: &[Stmt], new_scope: bool) {
        if new_scope {
            self.scopes.push(HashSet::new());
        }
        for s in body {
            self.stmt(s);
        }
        if new_scope {
            self.scopes.pop();
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::Let { name, value } => {
                self.expr(value);
                self.bind(name);
            }
            StmtKind::Assign { name, value } => {
                self.expr(value);
                if !self.bound(name) {
                    self.push(
                        stmt.span,
                        DiagnosticCode::UnboundVariable,
                        format!("assignment to unbound variable `{name}`"),
                    );
                }
            }
            StmtKind::If { cond, then_body, else_body } => {
                self.expr(cond);
                self.block(then_body, true);
                if let Some(e) = else_body {
                    self.block(e, true);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.block(body, true);
            }
            StmtKind::ForEach { var, iter, body } => {
                self.expr(iter);
                self.scopes.push(HashSet::from([var.clone()]));
                self.block(body, false);
                self.scopes.pop();
            }
            StmtKind::Call(e) => self.expr(e),
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Literal(_) => {}
            ExprKind::Var(name) => {
                if !self.bound(name) {
                    self.push(e.span, DiagnosticCode::UnboundVariable, format!("unbound variable `{name}`"));
                }
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Unary { operand, .. } => self.expr(operand),
            ExprKind::List(items) => items.iter().for_each(|i| self.expr(i)),
            ExprKind::Index { target, index } => {
                self.expr(target);
                self.expr(index);
            }
            ExprKind::Call { name, args } => {
                match lookup(name) {
                    None => self.push(e.span, DiagnosticCode::UnknownBuiltin, format!("unknown builtin `{name}`")),
                    Some(b) if !b.arity.contains(&args.len()) => self.push(
                        e.span,
                        DiagnosticCode::WrongArity,
                        format!("`{name}` takes {} argument(s), got {}", arity_text(&b.arity), args.len()),
                    ),
                    Some(_) => {}
                }
                args.iter().for_each(|a| self.expr(a));
            }
        }
    }
}

fn arity_text(r: &std::ops::RangeInclusive<usize>) -> String {
    if r.start() == r.end() {
        r.start().to_string()
    } else {
        format!("{} to {}", r.start(), r.end())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn codes(src: &str) -> Vec<DiagnosticCode> {
        static_check(&parse(src).unwrap()).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn unknown_builtin() {
        let d = static_check(&parse("walk_too(1, 2)").unwrap());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, DiagnosticCode::UnknownBuiltin);
        assert_eq!((d[0].line, d[0].column), (1, 1));
    }

    #[test]
    fn unbound_variable() {
        assert_eq!(codes("let x = y + 1"), vec![DiagnosticCode::UnboundVariable]);
        assert_eq!(codes("z = 3"), vec![DiagnosticCode::UnboundVariable]);
    }

    #[test]
    fn wrong_arity() {
        assert_eq!(codes("say()"), vec![DiagnosticCode::WrongArity]);
        assert_eq!(codes("walk_to(1, 2, 3)"), vec![DiagnosticCode::WrongArity]);
        assert!(codes("walk_to(1, 2)").is_empty());
        assert!(codes("walk_to(robot_position())").is_empty());
    }

    #[test]
    fn scoping_rules() {
        assert!(codes("let a = 1\nif (a > 0) { let b = a\nb = 2 }").is_empty());
        assert_eq!(codes("if (true) { let b = 1 }\nsay(str(b))"), vec![DiagnosticCode::UnboundVariable]);
        assert!(codes("for c in find(\"chair\") { say(label(c)) }").is_empty());
        assert_eq!(codes("for c in [1] { say(str(c)) }\nsay(str(c))"), vec![DiagnosticCode::UnboundVariable]);
    }

    #[test]
    fn diagnostics_serialize_as_records() {
        let d = static_check(&parse("walk_too(1, 2)").unwrap());
        let json = serde_json::to_string(&d[0]).unwrap();
        assert_eq!(json, r#"{"line":1,"column":1,"code":"E001","message":"unknown builtin `walk_too`"}"#);
    }
}

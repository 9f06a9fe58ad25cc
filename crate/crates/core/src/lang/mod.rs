//! The robot command language: a small sandboxed imperative language whose
//! builtins drive the simulated robot.
//!
//! ```
//! use robobench::lang::{parse, pretty_print, static_check};
//!
//! let program = parse("let d = distance([0, 0], [3, 4])\nif (d > 4) { say(\"far\") }").unwrap();
//! assert!(static_check(&program).is_empty());
//! assert_eq!(parse(&pretty_print(&program)).unwrap(), program);
//! ```

pub mod ast;
mod builtins;
mod check;
mod interp;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use sha2::{Digest, Sha256};

pub use builtins::{api_reference, lookup as lookup_builtin, Builtin, BUILTINS};
pub use check::{static_check, Diagnostic, DiagnosticCode};
pub use interp::{
    execute, run_source, ExecStatus, ExecutionOutcome, Limits, Value, MAX_LIST_DEPTH, MAX_LIST_LEN, MAX_STRING_LEN,
};
pub use parser::MAX_NESTING;

use ast::{Span, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError { line: span.line, column: span.column, message: message.into() }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic { line: self.line, column: self.column, code: DiagnosticCode::Parse, message: self.message.clone() }
    }
}

/// A parsed program. Equality is structural: the source hash and node
/// positions are ignored.
#[derive(Debug, Clone)]
pub struct Program {
    pub statements: Vec<Stmt>,
    source_hash: String,
}

impl Program {
    /// Wraps statements built in code; the hash is taken over their
    /// canonical printed form.
    pub fn from_statements(statements: Vec<Stmt>) -> Self {
        let text = printer::print_statements(&statements);
        Program { statements, source_hash: hex::encode(Sha256::digest(text.as_bytes())) }
    }

    /// Hex SHA-256 of the source text this program was parsed from.
    pub fn source_hash(&self) -> &str {
        &self.source_hash
    }
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.statements == other.statements
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_print(self))
    }
}

pub fn parse(source: &str) -> Result<Program, ParseError> {
    let statements = parser::parse_statements(source)?;
    Ok(Program { statements, source_hash: hex::encode(Sha256::digest(source.as_bytes())) })
}

/// Canonical text for a program; `parse(pretty_print(p)) == p`.
pub fn pretty_print(program: &Program) -> String {
    printer::print_statements(&program.statements)
}

/// Parses and checks; parse failures are reported as a single diagnostic.
pub fn validate_source(source: &str) -> Vec<Diagnostic> {
    match parse(source) {
        Ok(p) => static_check(&p),
        Err(e) => vec![e.to_diagnostic()],
    }
}

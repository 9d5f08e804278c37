//! Parser and pretty-printer for the Python-style snippet language.
//!
//! The accepted language is deliberately small: assignments (plain and
//! augmented), call statements, `print(...)`, `if`/`elif`/`else`, `while`
//! and `for ... in ...`. Blocks are delimited by indentation; tabs in
//! indentation and comments are rejected.

mod ast;
mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use ast::{AssignOp, BinOp, Expr, Program, Stmt, StmtKind, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Parses a snippet. The program id is derived from the source text.
pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    parse_with_id(source, &content_id(source))
}

pub fn parse_with_id(source: &str, source_id: &str) -> Result<Program, SyntaxError> {
    let statements = parser::parse_statements(source)?;
    Ok(Program {
        statements,
        source_text: source.to_string(),
        source_id: source_id.to_string(),
    })
}

/// Deterministic pretty-printed text; `parse(canonical_text(p))` is
/// structurally equal to `p`.
pub fn canonical_text(program: &Program) -> String {
    printer::program_text(&program.statements)
}

/// One-line rendering of a statement, or of the header of a compound
/// statement (without the trailing colon).
pub fn statement_label(stmt: &Stmt) -> String {
    printer::header_text(&stmt.kind)
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonical_text(self))
    }
}

// FNV-1a, stable across platforms and toolchains.
fn content_id(source: &str) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in source.bytes() {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("src-{hash:016x}")
}

//! Textual model language.
//!
//! ```text
//! # two-state example
//! param L = 0.5;
//! param C = 0.9 coverage;
//! state 1 "up" class = operational;
//! state 2 "down" class = fail_safe;
//! trans 1 -> 2 rate = L * C kind = failure;
//! init 1 = 1.0;
//! option horizon = 4380;
//! ```
//!
//! Rate expressions support `+`, `-`, `*` and parentheses over numbers and
//! parameter names. `#` starts a comment running to the end of the line.

mod lexer;
mod parser;
mod serialize;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use parser::{parse, parse_unvalidated};
pub use serialize::{format_number, serialize};

/// 1-based location of a token in the source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        SourceSpan {
            line: line.max(1),
            column: column.max(1),
            length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntactic,
    Semantic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
            kind,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Lexical => "lexical",
            ParseErrorKind::Syntactic => "syntax",
            ParseErrorKind::Semantic => "semantic",
        };
        write!(
            f,
            "{}:{}: {} error: {}",
            self.span.line, self.span.column, kind, self.message
        )
    }
}

/// Collected errors of one parse, in source order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ParseErrors {}

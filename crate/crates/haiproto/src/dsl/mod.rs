//! Textual notation: lexer, recursive-descent parser and canonical printer.

mod lexer;
mod parser;
mod printer;

pub use lexer::{lex, Tok, Token};
pub use parser::parse_type;
pub use printer::{print, print_action, print_message, print_pattern, print_scenario};

use crate::diag::{Diagnostic, Span};
use crate::model::{ActionDef, Message, Pattern, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Role(String),
    Action(ActionDef),
    Message(Message),
    Pattern(Pattern),
    Scenario(Scenario),
    /// A `//` line between declarations, kept so formatting preserves it.
    Comment(String),
}

#[derive(Debug, Clone, Eq)]
pub struct SourceFile {
    pub path: String,
    pub decls: Vec<Decl>,
    /// Position of each declaration's name, parallel to `decls`.
    pub spans: Vec<Span>,
}

impl PartialEq for SourceFile {
    /// Structural: positions are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.path == other.path && self.decls == other.decls
    }
}

impl SourceFile {
    pub fn span_of(&self, index: usize) -> Option<Span> {
        self.spans.get(index).copied()
    }
}

/// Parse anonymous text; diagnostics carry the path `<input>`.
pub fn parse(text: &str) -> Result<SourceFile, Vec<Diagnostic>> {
    parser::parse_source("<input>", text)
}

pub fn parse_named(path: &str, text: &str) -> Result<SourceFile, Vec<Diagnostic>> {
    parser::parse_source(path, text)
}

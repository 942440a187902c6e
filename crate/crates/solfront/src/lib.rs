//! Lightweight Solidity frontend: a tolerant lexer and parser plus the
//! subtree and def-use extractors consumed by the metric and analysis
//! crates. This is not a semantic compiler; it recovers enough structure
//! from possibly-malformed contract text to support token-level metrics,
//! syntax matching and pattern-based vulnerability detection.

pub mod ast;
pub mod dataflow;
pub mod lexer;
pub mod parser;
pub mod subtree;

pub use ast::{AstNode, ContractAst, NodeKind};
pub use dataflow::{def_use_edges, DefUseEdge};
pub use lexer::{
    is_keyword, strip_comments, tokenize, ContractSource, Token, TokenKind, TokenStream,
};
pub use parser::parse;
pub use subtree::subtrees;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("lex error at byte {offset}: {message}")]
    Lex { offset: usize, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty source text requires origin \"generated\", got {0:?}")]
    EmptySource(String),
}

/// True iff exactly one top-level `contract`/`library`/`interface`
/// declaration exists. Libraries and interfaces count: a file shipping a
/// contract plus its interface is still a multi-declaration file.
pub fn is_single_contract(ast: &ContractAst) -> bool {
    ast.contract_count() == 1
}

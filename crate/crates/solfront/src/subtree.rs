//! Canonical subtree enumeration for syntax matching. Identifiers and
//! literals collapse to `ID`/`LIT` placeholders so the multiset is
//! invariant under alpha-renaming.

use crate::ast::{AstNode, ContractAst, NodeKind};
use std::collections::HashMap;

fn label(kind: &NodeKind) -> String {
    match kind {
        NodeKind::SourceUnit => "Unit".into(),
        NodeKind::Pragma => "Pragma".into(),
        NodeKind::ContractDef { .. } => "Contract".into(),
        NodeKind::FunctionDef { .. } => "Function".into(),
        NodeKind::ModifierDef { .. } => "Modifier".into(),
        NodeKind::EventDef { .. } => "Event".into(),
        NodeKind::StateVarDecl => "VarDecl".into(),
        NodeKind::Block => "Block".into(),
        NodeKind::If => "If".into(),
        NodeKind::For => "For".into(),
        NodeKind::While => "While".into(),
        NodeKind::Require => "Require".into(),
        NodeKind::ExpressionStmt => "Stmt".into(),
        NodeKind::Assign => "Assign".into(),
        NodeKind::Call => "Call".into(),
        NodeKind::CallOptions => "CallOpts".into(),
        NodeKind::MemberAccess { .. } => "Member".into(),
        NodeKind::Index => "Index".into(),
        NodeKind::Binary { op } => format!("Bin<{op}>"),
        NodeKind::Unary { op } => format!("Un<{op}>"),
        NodeKind::Tuple => "Tuple".into(),
        NodeKind::Identifier { .. } => "ID".into(),
        NodeKind::Literal { .. } => "LIT".into(),
        NodeKind::Opaque => "Opaque".into(),
    }
}

fn serialize(node: &AstNode, out: &mut String) {
    out.push_str(&label(&node.kind));
    if !node.children.is_empty() {
        out.push('(');
        for (i, child) in node.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            serialize(child, out);
        }
        out.push(')');
    }
}

/// Multiset of canonical serializations of every subtree with depth at
/// least `min_depth`.
pub fn subtrees(ast: &ContractAst, min_depth: usize) -> HashMap<String, usize> {
    let mut out = HashMap::new();
    collect(&ast.root, min_depth, &mut out);
    out
}

fn collect(node: &AstNode, min_depth: usize, out: &mut HashMap<String, usize>) -> usize {
    let mut depth = 0;
    for child in &node.children {
        depth = depth.max(collect(child, min_depth, out));
    }
    depth += 1;
    if depth >= min_depth {
        let mut s = String::new();
        serialize(node, &mut s);
        *out.entry(s).or_insert(0) += 1;
    }
    depth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::{tokenize, ContractSource};
    use crate::parser::parse;

    fn ast_of(text: &str) -> ContractAst {
        let src = ContractSource::new(text, "test").unwrap();
        parse(&tokenize(&src).unwrap()).unwrap()
    }

    /// Brute-force oracle: enumerate nodes, compute each depth
    /// independently, count serializations.
    fn oracle(node: &AstNode, min_depth: usize, out: &mut HashMap<String, usize>) {
        if node.depth() >= min_depth {
            let mut s = String::new();
            serialize(node, &mut s);
            *out.entry(s).or_insert(0) += 1;
        }
        for child in &node.children {
            oracle(child, min_depth, out);
        }
    }

    #[test]
    fn matches_bruteforce_enumeration() {
        let ast = ast_of(
            "pragma solidity ^0.8.0; contract A { uint a; function f(uint x) public { a = x + 1; if (a > 2) { a = 0; } } }",
        );
        for min_depth in 1..=4 {
            let mut expected = HashMap::new();
            oracle(&ast.root, min_depth, &mut expected);
            assert_eq!(subtrees(&ast, min_depth), expected);
        }
    }

    #[test]
    fn deterministic_on_identical_asts() {
        let text = "contract A { function f() public { uint a = 1; } }";
        assert_eq!(subtrees(&ast_of(text), 2), subtrees(&ast_of(text), 2));
    }

    #[test]
    fn invariant_under_identifier_renaming() {
        let a = ast_of("contract A { uint total; function f(uint x) public { total = x; } }");
        let b = ast_of("contract Z { uint sum; function g(uint y) public { sum = y; } }");
        assert_eq!(subtrees(&a, 2), subtrees(&b, 2));
    }

    #[test]
    fn empty_contract_min_depth_two() {
        let counts = subtrees(&ast_of("contract A {}"), 2);
        // Only the SourceUnit(Contract) chain reaches depth 2.
        let total: usize = counts.values().sum();
        assert_eq!(total, 1);
        assert!(counts.contains_key("Unit(Contract)"));
    }
}

//! Def-use edge extraction. Per function body, an edge connects each read
//! of a variable to its most recent textual assignment or declaration.
//! Variables are renamed `var_k` by order of first definition inside the
//! function, so the edge set is invariant under alpha-renaming.

use crate::ast::{AstNode, ContractAst, NodeKind};
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DefUseEdge {
    pub def_site: usize,
    pub use_site: usize,
    pub var: String,
}

pub fn def_use_edges(ast: &ContractAst) -> BTreeSet<DefUseEdge> {
    let mut edges = BTreeSet::new();
    for func in ast.functions() {
        let mut walker = Walker::default();
        // Parameters are definitions at function entry.
        if let Some(params) = func
            .children
            .iter()
            .find(|c| matches!(c.kind, NodeKind::Tuple))
        {
            for param in &params.children {
                if let NodeKind::Identifier { name } = &param.kind {
                    walker.define(name);
                }
            }
        }
        for child in &func.children {
            if matches!(child.kind, NodeKind::Block) {
                walker.visit(child);
            }
        }
        edges.extend(walker.edges);
    }
    edges
}

#[derive(Default)]
struct Walker {
    site: usize,
    defs: HashMap<String, usize>,
    first_def: HashMap<String, usize>,
    edges: Vec<DefUseEdge>,
}

impl Walker {
    fn define(&mut self, name: &str) {
        let next = self.first_def.len();
        self.first_def.entry(name.to_string()).or_insert(next);
        self.defs.insert(name.to_string(), self.site);
        self.site += 1;
    }

    fn read(&mut self, name: &str) {
        if let Some(&def_site) = self.defs.get(name) {
            let var = format!("var_{}", self.first_def[name]);
            self.edges.push(DefUseEdge {
                def_site,
                use_site: self.site,
                var,
            });
            self.site += 1;
        }
    }

    fn visit(&mut self, node: &AstNode) {
        match &node.kind {
            NodeKind::Assign => {
                if node.children.len() == 2 {
                    self.visit(&node.children[1]);
                    self.visit_target(&node.children[0]);
                } else {
                    for child in &node.children {
                        self.visit(child);
                    }
                }
            }
            NodeKind::StateVarDecl => {
                if node.children.len() > 1 {
                    self.visit(&node.children[1]);
                }
                if let Some(NodeKind::Identifier { name }) =
                    node.children.first().map(|c| &c.kind)
                {
                    let name = name.clone();
                    self.define(&name);
                }
            }
            NodeKind::Identifier { name } => {
                let name = name.clone();
                self.read(&name);
            }
            _ => {
                for child in &node.children {
                    self.visit(child);
                }
            }
        }
    }

    /// Assignment target: the written base variable is a definition,
    /// subscripts inside it are still reads.
    fn visit_target(&mut self, node: &AstNode) {
        match &node.kind {
            NodeKind::Identifier { name } => {
                let name = name.clone();
                self.define(&name);
            }
            NodeKind::Index => {
                if node.children.len() > 1 {
                    self.visit(&node.children[1]);
                }
                if let Some(base) = node.children.first() {
                    self.visit_target(base);
                }
            }
            NodeKind::MemberAccess { .. } => {
                if let Some(base) = node.children.first() {
                    self.visit_target(base);
                }
            }
            NodeKind::Tuple => {
                for child in &node.children {
                    self.visit_target(child);
                }
            }
            _ => self.visit(node),
        }
    }
}

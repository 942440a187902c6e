//! Lightweight parse tree. Nodes carry byte spans back into the source so
//! detector findings can report locations. The tree is intentionally
//! shallow on semantics: no types, no inheritance resolution.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    SourceUnit,
    Pragma,
    ContractDef { name: String },
    FunctionDef { name: String },
    ModifierDef { name: String },
    EventDef { name: String },
    StateVarDecl,
    Block,
    If,
    For,
    While,
    Require,
    ExpressionStmt,
    Assign,
    Call,
    CallOptions,
    MemberAccess { member: String },
    Index,
    Binary { op: String },
    Unary { op: String },
    Tuple,
    Identifier { name: String },
    Literal { text: String },
    /// Unparseable statement tail swallowed during recovery.
    Opaque,
}

#[derive(Debug, Clone)]
pub struct AstNode {
    pub kind: NodeKind,
    pub children: Vec<AstNode>,
    pub span: (usize, usize),
}

impl AstNode {
    pub fn new(kind: NodeKind, span: (usize, usize)) -> Self {
        Self {
            kind,
            children: Vec::new(),
            span,
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(AstNode::depth).max().unwrap_or(0)
    }

    /// Pre-order walk over the subtree rooted here.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a AstNode)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }

    pub fn contains_kind(&self, pred: &dyn Fn(&NodeKind) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |n| {
            if pred(&n.kind) {
                found = true;
            }
        });
        found
    }
}

#[derive(Debug, Clone)]
pub struct ContractAst {
    pub root: AstNode,
    /// True iff parsing produced no opaque recovery nodes.
    pub clean: bool,
}

impl ContractAst {
    /// Number of top-level `contract`/`library`/`interface` declarations.
    pub fn contract_count(&self) -> usize {
        self.root
            .children
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::ContractDef { .. }))
            .count()
    }

    /// All function definitions in the unit, in source order.
    pub fn functions(&self) -> Vec<&AstNode> {
        let mut out = Vec::new();
        self.root.walk(&mut |n| {
            if matches!(n.kind, NodeKind::FunctionDef { .. }) {
                out.push(n);
            }
        });
        out
    }
}

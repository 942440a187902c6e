//! Best-effort recursive-descent parser. Statement tails that do not fit
//! the grammar are swallowed into opaque nodes instead of failing the
//! whole parse; only unrecoverable top-level structure (contract braces
//! that never close) is a hard error. Model-generated Solidity is often
//! malformed, and metric computation must still produce a tree.

use crate::ast::{AstNode, ContractAst, NodeKind};
use crate::lexer::{Token, TokenKind, TokenStream};
use crate::FrontendError;

pub fn parse(stream: &TokenStream) -> Result<ContractAst, FrontendError> {
    let mut parser = Parser {
        toks: &stream.tokens,
        pos: 0,
        opaque: false,
    };
    let root = parser.source_unit()?;
    Ok(ContractAst {
        root,
        clean: !parser.opaque,
    })
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    opaque: bool,
}

const ELEMENTARY_TYPES: &[&str] = &["address", "bool", "string", "byte", "bytes", "int", "uint"];
const LOCATIONS: &[&str] = &["memory", "storage", "calldata", "payable"];

fn is_type_keyword(lex: &str) -> bool {
    if ELEMENTARY_TYPES.contains(&lex) || lex == "mapping" {
        return true;
    }
    for prefix in ["uint", "int", "bytes"] {
        if let Some(rest) = lex.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, off: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + off)
    }

    fn lex(&self) -> &str {
        self.peek().map_or("", |t| t.lexeme.as_str())
    }

    fn lex_at(&self, off: usize) -> &str {
        self.peek_at(off).map_or("", |t| t.lexeme.as_str())
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, lex: &str) -> bool {
        if self.lex() == lex {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn span_since(&self, start: usize) -> (usize, usize) {
        let lo = self.toks.get(start).map_or(0, |t| t.span.0);
        let hi = if self.pos > start {
            self.toks[self.pos - 1].span.1
        } else {
            lo
        };
        (lo, hi)
    }

    // ---- top level ------------------------------------------------------

    fn source_unit(&mut self) -> Result<AstNode, FrontendError> {
        let mut unit = AstNode::new(NodeKind::SourceUnit, (0, 0));
        while !self.at_end() {
            match self.lex() {
                "pragma" => {
                    let node = self.pragma();
                    unit.children.push(node);
                }
                "import" | "using" => {
                    self.skip_to_semicolon();
                }
                "contract" | "library" | "interface" => {
                    let node = self.contract_def()?;
                    unit.children.push(node);
                }
                "abstract" => {
                    self.pos += 1;
                }
                _ => {
                    if self.lex() == "}" {
                        return Err(FrontendError::Parse(
                            "unbalanced brace at top level".into(),
                        ));
                    }
                    // Stray tokens before the first declaration: skip, but a
                    // brace group here must still balance.
                    if self.lex() == "{" {
                        self.skip_balanced_braces()?;
                    } else {
                        self.pos += 1;
                    }
                    self.opaque = true;
                }
            }
        }
        unit.span = (
            self.toks.first().map_or(0, |t| t.span.0),
            self.toks.last().map_or(0, |t| t.span.1),
        );
        Ok(unit)
    }

    fn pragma(&mut self) -> AstNode {
        let start = self.pos;
        self.pos += 1; // pragma
        let mut node = AstNode::new(NodeKind::Pragma, (0, 0));
        while !self.at_end() && self.lex() != ";" {
            let tok = self.bump().unwrap();
            node.children.push(AstNode::new(
                NodeKind::Literal {
                    text: tok.lexeme.clone(),
                },
                tok.span,
            ));
        }
        self.eat(";");
        node.span = self.span_since(start);
        node
    }

    fn skip_to_semicolon(&mut self) {
        while !self.at_end() && self.lex() != ";" {
            self.pos += 1;
        }
        self.eat(";");
    }

    fn skip_balanced_braces(&mut self) -> Result<(), FrontendError> {
        let open_at = self.peek().map_or(0, |t| t.span.0);
        let mut depth = 0usize;
        while let Some(tok) = self.bump() {
            match tok.lexeme.as_str() {
                "{" => depth += 1,
                "}" => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        Err(FrontendError::Parse(format!(
            "brace opened at byte {open_at} never closes"
        )))
    }

    fn contract_def(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        self.pos += 1; // contract/library/interface
        let name = if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.bump().unwrap().lexeme.clone()
        } else {
            String::new()
        };
        // Inheritance list: `is Base, Other(arg)`.
        while !self.at_end() && self.lex() != "{" {
            self.pos += 1;
        }
        if !self.eat("{") {
            return Err(FrontendError::Parse(format!(
                "contract {name} has no body"
            )));
        }
        let mut node = AstNode::new(NodeKind::ContractDef { name }, (0, 0));
        while !self.at_end() && self.lex() != "}" {
            if let Some(member) = self.contract_member()? {
                node.children.push(member);
            }
        }
        if !self.eat("}") {
            return Err(FrontendError::Parse(
                "contract body never closes".into(),
            ));
        }
        node.span = self.span_since(start);
        Ok(node)
    }

    fn contract_member(&mut self) -> Result<Option<AstNode>, FrontendError> {
        match self.lex() {
            "function" | "constructor" | "receive" | "fallback" => {
                Ok(Some(self.function_def()?))
            }
            "modifier" => Ok(Some(self.modifier_def()?)),
            "event" | "error" => Ok(Some(self.event_def())),
            "struct" | "enum" => {
                // Not modeled; skip the braced body.
                while !self.at_end() && self.lex() != "{" {
                    self.pos += 1;
                }
                if self.lex() == "{" {
                    self.skip_balanced_braces()?;
                }
                Ok(None)
            }
            "using" => {
                self.skip_to_semicolon();
                Ok(None)
            }
            _ => {
                let start = self.pos;
                match self.var_decl_stmt() {
                    Some(node) => Ok(Some(node)),
                    None => {
                        self.pos = start;
                        Ok(Some(self.recover_statement(start)))
                    }
                }
            }
        }
    }

    fn function_def(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        let intro = self.bump().unwrap().lexeme.clone();
        let name = if intro == "function"
            && self
                .peek()
                .is_some_and(|t| t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword)
            && self.lex() != "("
        {
            self.bump().unwrap().lexeme.clone()
        } else if intro == "function" {
            String::new()
        } else {
            intro.clone()
        };
        let mut node = AstNode::new(NodeKind::FunctionDef { name }, (0, 0));
        node.children.push(self.param_list(start));
        // Header tail: visibility/mutability keywords, `returns (...)`, and
        // custom modifiers (kept as Identifier children for the analyzers).
        while !self.at_end() && self.lex() != "{" && self.lex() != ";" {
            match self.lex() {
                "public" | "private" | "internal" | "external" | "pure" | "view" | "payable"
                | "virtual" | "override" | "constant" => {
                    self.pos += 1;
                }
                "returns" => {
                    self.pos += 1;
                    if self.lex() == "(" {
                        self.skip_balanced_parens();
                    }
                }
                _ => {
                    let tok = self.bump().unwrap();
                    if tok.kind == TokenKind::Identifier {
                        node.children.push(AstNode::new(
                            NodeKind::Identifier {
                                name: tok.lexeme.clone(),
                            },
                            tok.span,
                        ));
                        if self.lex() == "(" {
                            self.skip_balanced_parens();
                        }
                    }
                }
            }
        }
        if self.lex() == "{" {
            node.children.push(self.block()?);
        } else {
            self.eat(";");
        }
        node.span = self.span_since(start);
        Ok(node)
    }

    /// Parameter list collected as a Tuple of the declared names.
    fn param_list(&mut self, fallback: usize) -> AstNode {
        let start = self.pos;
        let mut tuple = AstNode::new(NodeKind::Tuple, (0, 0));
        if !self.eat("(") {
            tuple.span = self.span_since(fallback);
            return tuple;
        }
        let mut group: Vec<&'a Token> = Vec::new();
        let mut depth = 1usize;
        while let Some(tok) = self.bump() {
            match tok.lexeme.as_str() {
                "(" | "[" => {
                    depth += 1;
                    group.clear();
                }
                ")" | "]" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                "," if depth == 1 => {
                    Self::push_param(&mut tuple, &group);
                    group.clear();
                }
                _ => group.push(tok),
            }
        }
        Self::push_param(&mut tuple, &group);
        tuple.span = self.span_since(start);
        tuple
    }

    fn push_param(tuple: &mut AstNode, group: &[&Token]) {
        // The parameter name is the trailing identifier of `type [loc] name`.
        if group.len() < 2 {
            return;
        }
        if let Some(last) = group.last() {
            if last.kind == TokenKind::Identifier {
                tuple.children.push(AstNode::new(
                    NodeKind::Identifier {
                        name: last.lexeme.clone(),
                    },
                    last.span,
                ));
            }
        }
    }

    fn skip_balanced_parens(&mut self) {
        let mut depth = 0usize;
        while let Some(tok) = self.bump() {
            match tok.lexeme.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        return;
                    }
                }
                _ => {}
            }
        }
    }

    fn modifier_def(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        self.pos += 1; // modifier
        let name = if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.bump().unwrap().lexeme.clone()
        } else {
            String::new()
        };
        let mut node = AstNode::new(NodeKind::ModifierDef { name }, (0, 0));
        if self.lex() == "(" {
            node.children.push(self.param_list(start));
        }
        while !self.at_end() && self.lex() != "{" && self.lex() != ";" {
            self.pos += 1;
        }
        if self.lex() == "{" {
            node.children.push(self.block()?);
        } else {
            self.eat(";");
        }
        node.span = self.span_since(start);
        Ok(node)
    }

    fn event_def(&mut self) -> AstNode {
        let start = self.pos;
        self.pos += 1; // event/error
        let name = if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.bump().unwrap().lexeme.clone()
        } else {
            String::new()
        };
        if self.lex() == "(" {
            self.skip_balanced_parens();
        }
        self.skip_to_semicolon();
        let mut node = AstNode::new(NodeKind::EventDef { name }, (0, 0));
        node.span = self.span_since(start);
        node
    }

    // ---- statements -----------------------------------------------------

    fn block(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        if !self.eat("{") {
            return Err(FrontendError::Parse("expected block".into()));
        }
        let mut node = AstNode::new(NodeKind::Block, (0, 0));
        while !self.at_end() && self.lex() != "}" {
            node.children.push(self.statement()?);
        }
        if !self.eat("}") {
            return Err(FrontendError::Parse("block never closes".into()));
        }
        node.span = self.span_since(start);
        Ok(node)
    }

    fn statement(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        match self.lex() {
            "{" => self.block(),
            "unchecked" if self.lex_at(1) == "{" => {
                self.pos += 1;
                self.block()
            }
            "if" => self.if_stmt(),
            "for" => self.for_stmt(),
            "while" => self.while_stmt(),
            "do" => self.do_stmt(),
            "require" | "assert" => self.require_stmt(),
            "return" => {
                self.pos += 1;
                let mut node = AstNode::new(NodeKind::ExpressionStmt, (0, 0));
                if self.lex() != ";" {
                    match self.expression() {
                        Ok(expr) => node.children.push(expr),
                        Err(_) => return Ok(self.recover_statement(start)),
                    }
                }
                if !self.eat(";") {
                    return Ok(self.recover_statement(start));
                }
                node.span = self.span_since(start);
                Ok(node)
            }
            "emit" => {
                self.pos += 1;
                match self.expression() {
                    Ok(expr) if self.eat(";") => {
                        let mut node = AstNode::new(NodeKind::ExpressionStmt, (0, 0));
                        node.children.push(expr);
                        node.span = self.span_since(start);
                        Ok(node)
                    }
                    _ => Ok(self.recover_statement(start)),
                }
            }
            "break" | "continue" | "throw" => {
                self.pos += 1;
                self.eat(";");
                let mut node = AstNode::new(NodeKind::ExpressionStmt, (0, 0));
                node.span = self.span_since(start);
                Ok(node)
            }
            "revert" | "delete" => {
                self.pos += 1;
                match self.expression() {
                    Ok(expr) if self.eat(";") => {
                        let mut node = AstNode::new(NodeKind::ExpressionStmt, (0, 0));
                        node.children.push(expr);
                        node.span = self.span_since(start);
                        Ok(node)
                    }
                    _ => Ok(self.recover_statement(start)),
                }
            }
            "assembly" => {
                self.pos += 1;
                while !self.at_end() && self.lex() != "{" {
                    self.pos += 1;
                }
                if self.lex() == "{" && self.skip_balanced_braces().is_err() {
                    return Err(FrontendError::Parse("assembly block never closes".into()));
                }
                let mut node = AstNode::new(NodeKind::ExpressionStmt, (0, 0));
                node.children
                    .push(AstNode::new(NodeKind::Opaque, self.span_since(start)));
                self.opaque = true;
                node.span = self.span_since(start);
                Ok(node)
            }
            "(" if self.is_tuple_assignment() => self.tuple_assignment(start),
            _ => {
                if self.starts_var_decl() {
                    if let Some(node) = self.var_decl_stmt() {
                        return Ok(node);
                    }
                    self.pos = start;
                    return Ok(self.recover_statement(start));
                }
                match self.expression() {
                    Ok(expr) if self.eat(";") => {
                        let mut node = AstNode::new(NodeKind::ExpressionStmt, (0, 0));
                        node.children.push(expr);
                        node.span = self.span_since(start);
                        Ok(node)
                    }
                    _ => {
                        self.pos = start;
                        Ok(self.recover_statement(start))
                    }
                }
            }
        }
    }

    /// Swallow an unparseable statement tail into an opaque node. Stops
    /// after a top-level `;` or before a closing `}`.
    fn recover_statement(&mut self, start: usize) -> AstNode {
        self.opaque = true;
        if self.pos == start {
            self.pos += 1;
        }
        let mut depth = 0usize;
        while let Some(tok) = self.peek() {
            match tok.lexeme.as_str() {
                "(" | "[" | "{" => {
                    depth += 1;
                    self.pos += 1;
                }
                ")" | "]" => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    self.pos += 1;
                }
                "}" => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    self.pos += 1;
                }
                ";" if depth == 0 => {
                    self.pos += 1;
                    break;
                }
                _ => self.pos += 1,
            }
        }
        let span = self.span_since(start);
        let mut node = AstNode::new(NodeKind::ExpressionStmt, span);
        node.children.push(AstNode::new(NodeKind::Opaque, span));
        node
    }

    fn if_stmt(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        self.pos += 1; // if
        let mut node = AstNode::new(NodeKind::If, (0, 0));
        if !self.eat("(") {
            return Ok(self.recover_statement(start));
        }
        match self.expression() {
            Ok(cond) if self.eat(")") => node.children.push(cond),
            _ => {
                self.pos = start;
                return Ok(self.recover_statement(start));
            }
        }
        node.children.push(self.statement()?);
        if self.eat("else") {
            node.children.push(self.statement()?);
        }
        node.span = self.span_since(start);
        Ok(node)
    }

    fn for_stmt(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        self.pos += 1; // for
        let mut node = AstNode::new(NodeKind::For, (0, 0));
        if !self.eat("(") {
            return Ok(self.recover_statement(start));
        }
        // init
        if !self.eat(";") {
            let stmt_start = self.pos;
            if self.starts_var_decl() {
                match self.var_decl_stmt() {
                    Some(init) => node.children.push(init),
                    None => {
                        self.pos = start;
                        return Ok(self.recover_statement(start));
                    }
                }
            } else {
                match self.expression() {
                    Ok(init) if self.eat(";") => node.children.push(init),
                    _ => {
                        self.pos = stmt_start.min(start);
                        return Ok(self.recover_statement(start));
                    }
                }
            }
        }
        // condition
        if !self.eat(";") {
            match self.expression() {
                Ok(cond) if self.eat(";") => node.children.push(cond),
                _ => {
                    self.pos = start;
                    return Ok(self.recover_statement(start));
                }
            }
        }
        // post
        if !self.eat(")") {
            match self.expression() {
                Ok(post) if self.eat(")") => node.children.push(post),
                _ => {
                    self.pos = start;
                    return Ok(self.recover_statement(start));
                }
            }
        }
        node.children.push(self.statement()?);
        node.span = self.span_since(start);
        Ok(node)
    }

    fn while_stmt(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        self.pos += 1; // while
        let mut node = AstNode::new(NodeKind::While, (0, 0));
        if !self.eat("(") {
            return Ok(self.recover_statement(start));
        }
        match self.expression() {
            Ok(cond) if self.eat(")") => node.children.push(cond),
            _ => {
                self.pos = start;
                return Ok(self.recover_statement(start));
            }
        }
        node.children.push(self.statement()?);
        node.span = self.span_since(start);
        Ok(node)
    }

    fn do_stmt(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        self.pos += 1; // do
        let body = self.statement()?;
        let mut node = AstNode::new(NodeKind::While, (0, 0));
        if self.eat("while") && self.eat("(") {
            match self.expression() {
                Ok(cond) if self.eat(")") => {
                    node.children.push(cond);
                    self.eat(";");
                }
                _ => {
                    self.pos = start;
                    return Ok(self.recover_statement(start));
                }
            }
        }
        node.children.push(body);
        node.span = self.span_since(start);
        Ok(node)
    }

    fn require_stmt(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        self.pos += 1; // require/assert
        let mut node = AstNode::new(NodeKind::Require, (0, 0));
        if !self.eat("(") {
            return Ok(self.recover_statement(start));
        }
        loop {
            match self.expression() {
                Ok(arg) => node.children.push(arg),
                Err(_) => {
                    self.pos = start;
                    return Ok(self.recover_statement(start));
                }
            }
            if !self.eat(",") {
                break;
            }
        }
        if !self.eat(")") || !self.eat(";") {
            self.pos = start;
            return Ok(self.recover_statement(start));
        }
        node.span = self.span_since(start);
        Ok(node)
    }

    fn is_tuple_assignment(&self) -> bool {
        // `(bool ok, ) = ...;`
        let mut depth = 0usize;
        let mut off = 0usize;
        while let Some(tok) = self.peek_at(off) {
            match tok.lexeme.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        return self.lex_at(off + 1) == "=";
                    }
                }
                ";" => return false,
                _ => {}
            }
            off += 1;
        }
        false
    }

    fn tuple_assignment(&mut self, start: usize) -> Result<AstNode, FrontendError> {
        self.pos += 1; // (
        let mut tuple = AstNode::new(NodeKind::Tuple, (0, 0));
        let tuple_start = self.pos - 1;
        let mut group: Vec<&'a Token> = Vec::new();
        let mut depth = 1usize;
        while let Some(tok) = self.bump() {
            match tok.lexeme.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                "," if depth == 1 => {
                    Self::push_tuple_component(&mut tuple, &group);
                    group.clear();
                }
                _ => group.push(tok),
            }
        }
        Self::push_tuple_component(&mut tuple, &group);
        tuple.span = self.span_since(tuple_start);
        if !self.eat("=") {
            self.pos = start;
            return Ok(self.recover_statement(start));
        }
        let rhs = match self.expression() {
            Ok(e) => e,
            Err(_) => {
                self.pos = start;
                return Ok(self.recover_statement(start));
            }
        };
        if !self.eat(";") {
            self.pos = start;
            return Ok(self.recover_statement(start));
        }
        let mut assign = AstNode::new(NodeKind::Assign, (0, 0));
        assign.children.push(tuple);
        assign.children.push(rhs);
        assign.span = self.span_since(start);
        let mut stmt = AstNode::new(NodeKind::ExpressionStmt, assign.span);
        stmt.children.push(assign);
        Ok(stmt)
    }

    fn push_tuple_component(tuple: &mut AstNode, group: &[&Token]) {
        // Components look like `bool ok` (fresh declaration) or `ok`.
        if let Some(last) = group.last() {
            if last.kind == TokenKind::Identifier {
                tuple.children.push(AstNode::new(
                    NodeKind::Identifier {
                        name: last.lexeme.clone(),
                    },
                    last.span,
                ));
            }
        }
    }

    fn starts_var_decl(&self) -> bool {
        let first = match self.peek() {
            Some(t) => t,
            None => return false,
        };
        if first.kind == TokenKind::Keyword && is_type_keyword(&first.lexeme) {
            return true;
        }
        if first.kind == TokenKind::Identifier {
            let second = self.lex_at(1);
            if self.peek_at(1).map(|t| t.kind) == Some(TokenKind::Identifier) {
                return true;
            }
            if second == "[" && self.lex_at(2) == "]" {
                return true;
            }
        }
        false
    }

    /// `type [loc] name [= expr] ;` at contract or function scope.
    fn var_decl_stmt(&mut self) -> Option<AstNode> {
        let start = self.pos;
        if !self.consume_type() {
            return None;
        }
        // Attribute keywords between type and name.
        while LOCATIONS.contains(&self.lex())
            || matches!(self.lex(), "public" | "private" | "internal" | "constant" | "immutable")
        {
            self.pos += 1;
        }
        let name_tok = self.peek()?;
        if name_tok.kind != TokenKind::Identifier {
            return None;
        }
        let name_tok = self.bump().unwrap();
        let mut node = AstNode::new(NodeKind::StateVarDecl, (0, 0));
        node.children.push(AstNode::new(
            NodeKind::Identifier {
                name: name_tok.lexeme.clone(),
            },
            name_tok.span,
        ));
        if self.eat("=") {
            match self.expression() {
                Ok(init) => node.children.push(init),
                Err(_) => return None,
            }
        }
        if !self.eat(";") {
            return None;
        }
        node.span = self.span_since(start);
        Some(node)
    }

    fn consume_type(&mut self) -> bool {
        match self.lex() {
            "mapping" => {
                self.pos += 1;
                if self.lex() == "(" {
                    self.skip_balanced_parens();
                }
            }
            lex if is_type_keyword(lex) => {
                self.pos += 1;
            }
            _ => {
                if self.peek().map(|t| t.kind) == Some(TokenKind::Identifier) {
                    self.pos += 1;
                } else {
                    return false;
                }
            }
        }
        // Array suffixes.
        while self.lex() == "[" {
            let mut depth = 0usize;
            loop {
                match self.lex() {
                    "[" => depth += 1,
                    "]" => {
                        depth -= 1;
                        self.pos += 1;
                        if depth == 0 {
                            break;
                        }
                        continue;
                    }
                    "" => return false,
                    _ => {}
                }
                self.pos += 1;
            }
        }
        true
    }

    // ---- expressions ----------------------------------------------------

    fn expression(&mut self) -> Result<AstNode, FrontendError> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        let lhs = self.ternary()?;
        let op = self.lex();
        if matches!(
            op,
            "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "|=" | "&=" | "^=" | "<<=" | ">>="
        ) {
            self.pos += 1;
            let rhs = self.assignment()?;
            let mut node = AstNode::new(NodeKind::Assign, (0, 0));
            node.children.push(lhs);
            node.children.push(rhs);
            node.span = self.span_since(start);
            return Ok(node);
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        let cond = self.binary(0)?;
        if self.eat("?") {
            let then = self.expression()?;
            if !self.eat(":") {
                return Err(FrontendError::Parse("expected `:` in ternary".into()));
            }
            let other = self.expression()?;
            let mut node = AstNode::new(NodeKind::Binary { op: "?:".into() }, (0, 0));
            node.children.push(cond);
            node.children.push(then);
            node.children.push(other);
            node.span = self.span_since(start);
            return Ok(node);
        }
        Ok(cond)
    }

    fn binary_precedence(op: &str) -> Option<u8> {
        Some(match op {
            "||" => 1,
            "&&" => 2,
            "|" => 3,
            "^" => 4,
            "&" => 5,
            "==" | "!=" => 6,
            "<" | ">" | "<=" | ">=" => 7,
            "<<" | ">>" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            "**" => 11,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        let mut lhs = self.unary()?;
        while let Some(prec) = Self::binary_precedence(self.lex()) {
            if prec < min_prec {
                break;
            }
            let op = self.bump().unwrap().lexeme.clone();
            let rhs = self.binary(prec + 1)?;
            let mut node = AstNode::new(NodeKind::Binary { op }, (0, 0));
            node.children.push(lhs);
            node.children.push(rhs);
            node.span = self.span_since(start);
            lhs = node;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        match self.lex() {
            "!" | "~" | "-" | "+" | "++" | "--" | "delete" | "new" => {
                let op = self.bump().unwrap().lexeme.clone();
                let operand = self.unary()?;
                let mut node = AstNode::new(NodeKind::Unary { op }, (0, 0));
                node.children.push(operand);
                node.span = self.span_since(start);
                Ok(node)
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        let mut expr = self.primary()?;
        loop {
            match self.lex() {
                "(" => {
                    self.pos += 1;
                    let mut call = AstNode::new(NodeKind::Call, (0, 0));
                    call.children.push(expr);
                    if self.lex() != ")" {
                        loop {
                            call.children.push(self.expression()?);
                            if !self.eat(",") {
                                break;
                            }
                        }
                    }
                    if !self.eat(")") {
                        return Err(FrontendError::Parse("call never closes".into()));
                    }
                    call.span = self.span_since(start);
                    expr = call;
                }
                "[" => {
                    self.pos += 1;
                    let mut index = AstNode::new(NodeKind::Index, (0, 0));
                    index.children.push(expr);
                    if self.lex() != "]" {
                        index.children.push(self.expression()?);
                    }
                    if !self.eat("]") {
                        return Err(FrontendError::Parse("index never closes".into()));
                    }
                    index.span = self.span_since(start);
                    expr = index;
                }
                "." => {
                    self.pos += 1;
                    let member = match self.bump() {
                        Some(tok)
                            if tok.kind == TokenKind::Identifier
                                || tok.kind == TokenKind::Keyword =>
                        {
                            tok.lexeme.clone()
                        }
                        _ => return Err(FrontendError::Parse("expected member name".into())),
                    };
                    let mut access = AstNode::new(NodeKind::MemberAccess { member }, (0, 0));
                    access.children.push(expr);
                    access.span = self.span_since(start);
                    expr = access;
                }
                "{" if self.looks_like_call_options() => {
                    self.pos += 1;
                    let mut opts = AstNode::new(NodeKind::CallOptions, (0, 0));
                    opts.children.push(expr);
                    while self.lex() != "}" && !self.at_end() {
                        // `name: value` pairs.
                        let name_tok = self.bump().unwrap();
                        let mut name = AstNode::new(
                            NodeKind::Identifier {
                                name: name_tok.lexeme.clone(),
                            },
                            name_tok.span,
                        );
                        if self.eat(":") {
                            name.children.push(self.expression()?);
                        }
                        opts.children.push(name);
                        if !self.eat(",") {
                            break;
                        }
                    }
                    if !self.eat("}") {
                        return Err(FrontendError::Parse("call options never close".into()));
                    }
                    opts.span = self.span_since(start);
                    expr = opts;
                }
                "++" | "--" => {
                    let op = self.bump().unwrap().lexeme.clone();
                    let mut node = AstNode::new(NodeKind::Unary { op }, (0, 0));
                    node.children.push(expr);
                    node.span = self.span_since(start);
                    expr = node;
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn looks_like_call_options(&self) -> bool {
        let first = self.peek_at(1);
        first.is_some_and(|t| {
            (t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword)
                && self.lex_at(2) == ":"
        })
    }

    fn primary(&mut self) -> Result<AstNode, FrontendError> {
        let start = self.pos;
        let tok = self
            .peek()
            .ok_or_else(|| FrontendError::Parse("unexpected end of input".into()))?;
        match tok.kind {
            TokenKind::Identifier => {
                let tok = self.bump().unwrap();
                Ok(AstNode::new(
                    NodeKind::Identifier {
                        name: tok.lexeme.clone(),
                    },
                    tok.span,
                ))
            }
            TokenKind::Number | TokenKind::Str | TokenKind::PragmaVersion => {
                let tok = self.bump().unwrap();
                Ok(AstNode::new(
                    NodeKind::Literal {
                        text: tok.lexeme.clone(),
                    },
                    tok.span,
                ))
            }
            TokenKind::Keyword => match tok.lexeme.as_str() {
                "true" | "false" => {
                    let tok = self.bump().unwrap();
                    Ok(AstNode::new(
                        NodeKind::Literal {
                            text: tok.lexeme.clone(),
                        },
                        tok.span,
                    ))
                }
                lex if is_type_keyword(lex) || matches!(lex, "payable" | "require" | "revert") => {
                    // Elementary type casts (`uint(x)`, `address(this)`) and
                    // builtin calls behave like identifiers in expressions.
                    let tok = self.bump().unwrap();
                    Ok(AstNode::new(
                        NodeKind::Identifier {
                            name: tok.lexeme.clone(),
                        },
                        tok.span,
                    ))
                }
                "this" => {
                    let tok = self.bump().unwrap();
                    Ok(AstNode::new(
                        NodeKind::Identifier {
                            name: tok.lexeme.clone(),
                        },
                        tok.span,
                    ))
                }
                other => Err(FrontendError::Parse(format!(
                    "unexpected keyword `{other}` in expression"
                ))),
            },
            TokenKind::Punctuation => match tok.lexeme.as_str() {
                "(" => {
                    self.pos += 1;
                    let mut items = vec![];
                    if self.lex() != ")" {
                        loop {
                            if self.lex() == "," {
                                // Skipped tuple slot.
                            } else {
                                items.push(self.expression()?);
                            }
                            if !self.eat(",") {
                                break;
                            }
                        }
                    }
                    if !self.eat(")") {
                        return Err(FrontendError::Parse("paren never closes".into()));
                    }
                    if items.len() == 1 {
                        Ok(items.pop().unwrap())
                    } else {
                        let mut node = AstNode::new(NodeKind::Tuple, self.span_since(start));
                        node.children = items;
                        Ok(node)
                    }
                }
                "[" => {
                    self.pos += 1;
                    let mut node = AstNode::new(NodeKind::Tuple, (0, 0));
                    if self.lex() != "]" {
                        loop {
                            node.children.push(self.expression()?);
                            if !self.eat(",") {
                                break;
                            }
                        }
                    }
                    if !self.eat("]") {
                        return Err(FrontendError::Parse("array literal never closes".into()));
                    }
                    node.span = self.span_since(start);
                    Ok(node)
                }
                other => Err(FrontendError::Parse(format!(
                    "unexpected token `{other}` in expression"
                ))),
            },
        }
    }
}

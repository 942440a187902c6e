//! Pattern detectors for the eight DASP vulnerability classes. These are
//! syntactic approximations running on the tolerant parse tree: no call
//! graph, no symbolic execution. Each detector is independent and the
//! result is their union, so one snippet can carry several classes.
//!
//! Detection runs on the comment-stripped source, which makes the verdict
//! (and every finding span) invariant under comment edits. Spans index the
//! stripped text.

use crate::{Confidence, VulnClass, VulnFinding};
use solfront::{parse, strip_comments, tokenize, AstNode, ContractAst, NodeKind};
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct DetectOutcome {
    pub findings: Vec<VulnFinding>,
    /// Source failed to lex or parse; the empty finding list is not a
    /// clean bill of health.
    pub analysis_failed: bool,
}

pub fn detect(source: &solfront::ContractSource) -> DetectOutcome {
    let ast = strip_comments(source)
        .and_then(|stripped| tokenize(&stripped))
        .and_then(|stream| parse(&stream));
    let ast = match ast {
        Ok(ast) => ast,
        Err(_) => {
            return DetectOutcome {
                findings: Vec::new(),
                analysis_failed: true,
            }
        }
    };
    let mut findings = Vec::new();
    detect_reentrancy(&ast, &mut findings);
    detect_access_control(&ast, &mut findings);
    detect_arithmetic(&ast, &mut findings);
    detect_unchecked_call(&ast, &mut findings);
    detect_dos(&ast, &mut findings);
    detect_bad_randomness(&ast, &mut findings);
    detect_front_running(&ast, &mut findings);
    detect_time_manipulation(&ast, &mut findings);
    findings.sort_by_key(|f| (f.span, f.class));
    findings.dedup();
    DetectOutcome {
        findings,
        analysis_failed: false,
    }
}

fn finding(class: VulnClass, span: (usize, usize), detector: &str) -> VulnFinding {
    VulnFinding {
        class,
        span,
        detector: detector.to_string(),
        confidence: if class == VulnClass::FR {
            Confidence::Heuristic
        } else {
            Confidence::High
        },
    }
}

// ---- shared expression helpers ------------------------------------------

const LOW_LEVEL: &[&str] = &["call", "delegatecall", "staticcall", "send"];

struct CallInfo {
    member: String,
    transfers_value: bool,
}

/// Classify a `Call` node as an external low-level/value call, looking
/// through `{value: ...}` options and the legacy `.call.value(x)(...)`
/// chain.
fn classify_call(call: &AstNode) -> Option<CallInfo> {
    let callee = call.children.first()?;
    match &callee.kind {
        NodeKind::MemberAccess { member }
            if LOW_LEVEL.contains(&member.as_str()) || member == "transfer" =>
        {
            Some(CallInfo {
                member: member.clone(),
                transfers_value: member == "send" || member == "transfer",
            })
        }
        NodeKind::CallOptions => {
            let inner = callee.children.first()?;
            if let NodeKind::MemberAccess { member } = &inner.kind {
                if LOW_LEVEL.contains(&member.as_str()) || member == "transfer" {
                    let has_value_opt = callee.children[1..].iter().any(
                        |c| matches!(&c.kind, NodeKind::Identifier { name } if name == "value"),
                    );
                    return Some(CallInfo {
                        member: member.clone(),
                        transfers_value: has_value_opt
                            || member == "send"
                            || member == "transfer",
                    });
                }
            }
            None
        }
        NodeKind::Call => {
            // `target.call.value(x)(...)`
            let value_access = callee.children.first()?;
            if let NodeKind::MemberAccess { member } = &value_access.kind {
                if member == "value" {
                    if let Some(base) = value_access.children.first() {
                        if let NodeKind::MemberAccess { member: m } = &base.kind {
                            if LOW_LEVEL.contains(&m.as_str()) {
                                return Some(CallInfo {
                                    member: m.clone(),
                                    transfers_value: true,
                                });
                            }
                        }
                    }
                }
            }
            None
        }
        _ => None,
    }
}

fn identifier_names(node: &AstNode) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    node.walk(&mut |n| {
        if let NodeKind::Identifier { name } = &n.kind {
            names.insert(name.clone());
        }
    });
    names
}

/// Base storage/local names written by an assignment left-hand side.
fn write_targets(lhs: &AstNode, out: &mut Vec<String>) {
    match &lhs.kind {
        NodeKind::Identifier { name } => out.push(name.clone()),
        NodeKind::Index | NodeKind::MemberAccess { .. } => {
            if let Some(base) = lhs.children.first() {
                write_targets(base, out);
            }
        }
        NodeKind::Tuple => {
            for child in &lhs.children {
                write_targets(child, out);
            }
        }
        _ => {}
    }
}

fn is_member_of(node: &AstNode, base: &str, member: &str) -> bool {
    if let NodeKind::MemberAccess { member: m } = &node.kind {
        if m == member {
            return matches!(
                node.children.first().map(|c| &c.kind),
                Some(NodeKind::Identifier { name }) if name == base
            );
        }
    }
    false
}

fn contains_member_of(node: &AstNode, base: &str, member: &str) -> bool {
    let mut found = false;
    node.walk(&mut |n| {
        if is_member_of(n, base, member) {
            found = true;
        }
    });
    found
}

/// A function counts as guarded when its body requires anything or a
/// custom modifier is attached.
fn is_guarded(func: &AstNode) -> bool {
    let has_modifier = func
        .children
        .iter()
        .any(|c| matches!(c.kind, NodeKind::Identifier { .. }));
    has_modifier || func.contains_kind(&|k| matches!(k, NodeKind::Require))
}

fn function_name(func: &AstNode) -> &str {
    match &func.kind {
        NodeKind::FunctionDef { name } => name,
        _ => "",
    }
}

// ---- RE ------------------------------------------------------------------

enum Event<'a> {
    Guard(BTreeSet<String>),
    ValueCall(&'a AstNode),
    Write(String),
}

/// Flatten a function body into source-ordered guard/call/write events.
/// Assignment right-hand sides are visited before the write they feed.
fn collect_events<'a>(node: &'a AstNode, events: &mut Vec<Event<'a>>) {
    match &node.kind {
        NodeKind::Require | NodeKind::If | NodeKind::While => {
            if let Some(cond) = node.children.first() {
                events.push(Event::Guard(identifier_names(cond)));
            }
            for child in &node.children {
                collect_events(child, events);
            }
        }
        NodeKind::Assign => {
            if let Some(rhs) = node.children.get(1) {
                collect_events(rhs, events);
            }
            if let Some(lhs) = node.children.first() {
                let mut targets = Vec::new();
                write_targets(lhs, &mut targets);
                for t in targets {
                    events.push(Event::Write(t));
                }
            }
        }
        NodeKind::StateVarDecl => {
            if let Some(init) = node.children.get(1) {
                collect_events(init, events);
            }
            if let Some(AstNode {
                kind: NodeKind::Identifier { name },
                ..
            }) = node.children.first()
            {
                events.push(Event::Write(name.clone()));
            }
        }
        NodeKind::Call => {
            if classify_call(node).is_some_and(|c| c.transfers_value) {
                events.push(Event::ValueCall(node));
            }
            for child in &node.children {
                collect_events(child, events);
            }
        }
        _ => {
            for child in &node.children {
                collect_events(child, events);
            }
        }
    }
}

/// External value transfer followed by a write to a variable some earlier
/// guard read before the call: state is updated after handing control to
/// the payee, so the guard can be replayed reentrantly.
fn detect_reentrancy(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    for func in ast.functions() {
        let mut events = Vec::new();
        collect_events(func, &mut events);
        let mut guards: BTreeSet<String> = BTreeSet::new();
        let mut pending: Vec<(&AstNode, BTreeSet<String>)> = Vec::new();
        for event in events {
            match event {
                Event::Guard(names) => guards.extend(names),
                Event::ValueCall(call) => pending.push((call, guards.clone())),
                Event::Write(name) => {
                    for (call, snapshot) in &pending {
                        if snapshot.contains(&name) {
                            findings.push(finding(
                                VulnClass::RE,
                                call.span,
                                "re-call-before-state-update",
                            ));
                        }
                    }
                }
            }
        }
    }
}

// ---- AC ------------------------------------------------------------------

fn detect_access_control(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    // tx.origin inside an authorization condition.
    ast.root.walk(&mut |node| {
        if matches!(node.kind, NodeKind::Require | NodeKind::If) {
            if let Some(cond) = node.children.first() {
                if contains_member_of(cond, "tx", "origin") {
                    findings.push(finding(VulnClass::AC, cond.span, "ac-tx-origin-auth"));
                }
            }
        }
    });
    // Privileged effects reachable without any guard.
    for func in ast.functions() {
        if function_name(func) == "constructor" || is_guarded(func) {
            continue;
        }
        func.walk(&mut |node| match &node.kind {
            NodeKind::Call => {
                if matches!(
                    node.children.first().map(|c| &c.kind),
                    Some(NodeKind::Identifier { name }) if name == "selfdestruct"
                ) {
                    findings.push(finding(
                        VulnClass::AC,
                        node.span,
                        "ac-unguarded-selfdestruct",
                    ));
                }
            }
            NodeKind::Assign => {
                let mut targets = Vec::new();
                if let Some(lhs) = node.children.first() {
                    write_targets(lhs, &mut targets);
                }
                if targets.iter().any(|t| t == "owner") {
                    findings.push(finding(VulnClass::AC, node.span, "ac-unguarded-owner-write"));
                }
            }
            _ => {}
        });
    }
}

// ---- AR ------------------------------------------------------------------

fn pragma_minor(ast: &ContractAst) -> Option<(u32, u32)> {
    for child in &ast.root.children {
        if !matches!(child.kind, NodeKind::Pragma) {
            continue;
        }
        for lit in &child.children {
            if let NodeKind::Literal { text } = &lit.kind {
                let digits = text.trim_start_matches(['^', '~', '>', '<', '=']);
                let mut parts = digits.split('.');
                if let (Some(maj), Some(min)) = (parts.next(), parts.next()) {
                    if let (Ok(maj), Ok(min)) = (maj.parse(), min.parse()) {
                        return Some((maj, min));
                    }
                }
            }
        }
    }
    None
}

fn uses_checked_math(ast: &ContractAst) -> bool {
    let mut found = false;
    ast.root.walk(&mut |node| match &node.kind {
        NodeKind::Identifier { name } if name == "SafeMath" => found = true,
        NodeKind::MemberAccess { member }
            if matches!(member.as_str(), "add" | "sub" | "mul" | "div") =>
        {
            found = true
        }
        _ => {}
    });
    found
}

/// Unchecked arithmetic: `+`/`-`/`*` over at least one variable operand
/// under a pre-0.8 pragma with no checked-math library in sight.
fn detect_arithmetic(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    let Some(version) = pragma_minor(ast) else {
        return;
    };
    if version >= (0, 8) || uses_checked_math(ast) {
        return;
    }
    ast.root.walk(&mut |node| {
        if let NodeKind::Binary { op } = &node.kind {
            if matches!(op.as_str(), "+" | "-" | "*")
                && node.contains_kind(&|k| matches!(k, NodeKind::Identifier { .. }))
            {
                findings.push(finding(VulnClass::AR, node.span, "ar-unchecked-arith"));
            }
        }
    });
}

// ---- ULLC ----------------------------------------------------------------

/// A low-level call used as a bare statement: the boolean result is
/// neither checked nor assigned. `transfer` is exempt — it reverts.
fn detect_unchecked_call(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    ast.root.walk(&mut |node| {
        if !matches!(node.kind, NodeKind::ExpressionStmt) {
            return;
        }
        let Some(expr) = node.children.first() else {
            return;
        };
        if !matches!(expr.kind, NodeKind::Call) {
            return;
        }
        if let Some(info) = classify_call(expr) {
            if LOW_LEVEL.contains(&info.member.as_str()) {
                findings.push(finding(VulnClass::ULLC, expr.span, "ullc-ignored-result"));
            }
        }
    });
}

// ---- DoS -----------------------------------------------------------------

/// Loop bounded by a dynamic array length that performs external calls:
/// one participant can grow the array until the loop exceeds block gas.
fn detect_dos(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    ast.root.walk(&mut |node| {
        if !matches!(node.kind, NodeKind::For | NodeKind::While) {
            return;
        }
        let reads_length =
            node.contains_kind(&|k| matches!(k, NodeKind::MemberAccess { member } if member == "length"));
        if !reads_length {
            return;
        }
        let mut calls_out = false;
        node.walk(&mut |n| {
            if matches!(n.kind, NodeKind::Call) && classify_call(n).is_some() {
                calls_out = true;
            }
        });
        if calls_out {
            findings.push(finding(VulnClass::DoS, node.span, "dos-unbounded-loop-call"));
        }
    });
}

// ---- BR ------------------------------------------------------------------

fn is_block_attr_entropy(node: &AstNode) -> bool {
    if let NodeKind::Call = node.kind {
        if matches!(
            node.children.first().map(|c| &c.kind),
            Some(NodeKind::Identifier { name }) if name == "blockhash"
        ) {
            return true;
        }
    }
    is_member_of(node, "block", "difficulty") || is_member_of(node, "block", "prevrandao")
}

/// Randomness from block attributes. `blockhash`/`difficulty`/`prevrandao`
/// are entropy sources wherever they appear; `block.timestamp` only counts
/// here when it feeds a modulo or an index (its plain scheduling uses
/// belong to TM).
fn detect_bad_randomness(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    ast.root.walk(&mut |node| {
        if is_block_attr_entropy(node) {
            findings.push(finding(VulnClass::BR, node.span, "br-block-attr-entropy"));
        }
        let timestamp_fed = match &node.kind {
            NodeKind::Binary { op } if op == "%" => node
                .children
                .iter()
                .any(|c| contains_member_of(c, "block", "timestamp")),
            NodeKind::Index => node
                .children
                .get(1)
                .is_some_and(|sub| contains_member_of(sub, "block", "timestamp")),
            _ => false,
        };
        if timestamp_fed {
            findings.push(finding(VulnClass::BR, node.span, "br-timestamp-entropy"));
        }
    });
}

// ---- FR (heuristic) ------------------------------------------------------

const ORDERING_NAMES: &[&str] = &["price", "bid", "fee", "order"];

/// State-changing function that rewrites a stored price/bid/fee/ordering
/// value with no guard at all: trivially frontrunnable. Always heuristic
/// confidence — name-based, excluded from hard evaluation gates.
fn detect_front_running(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    for func in ast.functions() {
        if function_name(func) == "constructor" || is_guarded(func) {
            continue;
        }
        func.walk(&mut |node| {
            if !matches!(node.kind, NodeKind::Assign) {
                return;
            }
            let mut targets = Vec::new();
            if let Some(lhs) = node.children.first() {
                write_targets(lhs, &mut targets);
            }
            let ordering = targets.iter().any(|t| {
                let lower = t.to_lowercase();
                ORDERING_NAMES.iter().any(|w| lower.contains(w))
            });
            if ordering {
                findings.push(finding(VulnClass::FR, node.span, "fr-unguarded-ordering-write"));
            }
        });
    }
}

// ---- TM ------------------------------------------------------------------

fn has_time_source(node: &AstNode) -> bool {
    let mut found = false;
    node.walk(&mut |n| {
        if is_member_of(n, "block", "timestamp")
            || matches!(&n.kind, NodeKind::Identifier { name } if name == "now")
        {
            found = true;
        }
    });
    found
}

/// `block.timestamp`/`now` steering a condition or written into state.
/// Purely observational uses (event arguments) do not count.
fn detect_time_manipulation(ast: &ContractAst, findings: &mut Vec<VulnFinding>) {
    ast.root.walk(&mut |node| {
        let context: Vec<&AstNode> = match &node.kind {
            NodeKind::Require | NodeKind::If | NodeKind::While => {
                node.children.first().into_iter().collect()
            }
            NodeKind::For if !node.children.is_empty() => {
                node.children[..node.children.len() - 1].iter().collect()
            }
            NodeKind::Assign | NodeKind::StateVarDecl => vec![node],
            _ => Vec::new(),
        };
        if context.iter().any(|part| has_time_source(part)) {
            findings.push(finding(VulnClass::TM, node.span, "tm-timestamp-dependence"));
        }
    });
}

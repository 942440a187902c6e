//! Compile checking. When a `solc` binary is configured (and its version is
//! compatible with the source's pragma) the verdict comes from actually
//! running it; otherwise we fall back to the internal tolerant parser in
//! strict mode and flag the result as approximate.

use crate::SecError;
use serde::{Deserialize, Serialize};
use solfront::{parse, strip_comments, tokenize, ContractSource};
use std::io::Write;
use std::path::Path;
use std::process::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompileTool {
    ExternalSolc,
    /// Approximate verdict; every downstream report must carry this flag.
    InternalParser,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileResult {
    pub compiled: bool,
    pub tool: CompileTool,
    pub diagnostics: Vec<String>,
}

/// One pragma constraint like `^0.8.0` or `>=0.6.2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Caret,
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

type Version = (u32, u32, u32);

fn parse_version(text: &str) -> Option<Version> {
    let mut parts = text.split('.');
    let major = parts.next()?.parse().ok()?;
    let minor = parts.next()?.parse().ok()?;
    let patch = parts.next().map_or(Some(0), |p| p.parse().ok())?;
    if parts.next().is_some() {
        return None;
    }
    Some((major, minor, patch))
}

/// Extract `(bound, version)` pairs from the first `pragma solidity` line.
/// Returns an empty list when no pragma (or no parseable constraint) exists.
fn pragma_constraints(text: &str) -> Vec<(Bound, Version)> {
    let Some(start) = text.find("pragma solidity") else {
        return Vec::new();
    };
    let rest = &text[start + "pragma solidity".len()..];
    let Some(end) = rest.find(';') else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut chars = rest[..end].char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let bound = match c {
            '^' | '~' => {
                chars.next();
                Bound::Caret
            }
            '>' | '<' => {
                chars.next();
                let eq = matches!(chars.peek(), Some((_, '=')));
                if eq {
                    chars.next();
                }
                match (c, eq) {
                    ('>', true) => Bound::Ge,
                    ('>', false) => Bound::Gt,
                    ('<', true) => Bound::Le,
                    _ => Bound::Lt,
                }
            }
            '=' => {
                chars.next();
                Bound::Eq
            }
            c if c.is_ascii_digit() => Bound::Eq,
            _ => {
                chars.next();
                continue;
            }
        };
        let vstart = chars.peek().map_or(i, |&(j, _)| j);
        let mut vend = vstart;
        while let Some(&(j, c)) = chars.peek() {
            if c.is_ascii_digit() || c == '.' {
                vend = j + c.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        if let Some(v) = parse_version(&rest[vstart..vend]) {
            out.push((bound, v));
        }
    }
    out
}

fn satisfies(v: Version, constraints: &[(Bound, Version)]) -> bool {
    constraints.iter().all(|&(bound, c)| match bound {
        Bound::Caret => v >= c && v.0 == c.0 && (c.0 > 0 || v.1 == c.1),
        Bound::Ge => v >= c,
        Bound::Gt => v > c,
        Bound::Le => v <= c,
        Bound::Lt => v < c,
        Bound::Eq => v == c,
    })
}

fn solc_version(solc: &Path) -> Result<Option<Version>, SecError> {
    let output = Command::new(solc)
        .arg("--version")
        .output()
        .map_err(|e| SecError::ToolSpawn {
            tool: solc.display().to_string(),
            message: e.to_string(),
        })?;
    let text = String::from_utf8_lossy(&output.stdout);
    // The version line looks like "Version: 0.8.17+commit...".
    Ok(text
        .split_whitespace()
        .filter_map(|w| parse_version(w.split('+').next().unwrap_or(w)))
        .next())
}

fn internal_check(source: &ContractSource, diagnostics: Vec<String>) -> CompileResult {
    let verdict = strip_comments(source)
        .and_then(|stripped| tokenize(&stripped))
        .and_then(|stream| {
            if stream.tokens.is_empty() {
                return Ok(false);
            }
            Ok(parse(&stream).map(|ast| ast.clean).unwrap_or(false))
        });
    match verdict {
        Ok(compiled) => CompileResult {
            compiled,
            tool: CompileTool::InternalParser,
            diagnostics,
        },
        Err(e) => CompileResult {
            compiled: false,
            tool: CompileTool::InternalParser,
            diagnostics: {
                let mut d = diagnostics;
                d.push(e.to_string());
                d
            },
        },
    }
}

/// Compile-check `source`. `solc` is the configured external compiler, if
/// any. A configured binary that cannot be spawned is a `ToolSpawn` error —
/// never silently reported as a compile failure.
pub fn compile_check(
    source: &ContractSource,
    solc: Option<&Path>,
) -> Result<CompileResult, SecError> {
    let Some(solc) = solc else {
        return Ok(internal_check(source, Vec::new()));
    };
    let version = solc_version(solc)?;
    let constraints = pragma_constraints(&source.text);
    if let Some(v) = version {
        if !constraints.is_empty() && !satisfies(v, &constraints) {
            return Ok(internal_check(
                source,
                vec![format!(
                    "solc {}.{}.{} does not satisfy the source pragma; internal fallback",
                    v.0, v.1, v.2
                )],
            ));
        }
    }
    let mut file = tempfile::Builder::new()
        .suffix(".sol")
        .tempfile()
        .map_err(SecError::Io)?;
    file.write_all(source.text.as_bytes()).map_err(SecError::Io)?;
    let output = Command::new(solc)
        .arg(file.path())
        .output()
        .map_err(|e| SecError::ToolSpawn {
            tool: solc.display().to_string(),
            message: e.to_string(),
        })?;
    let stderr = String::from_utf8_lossy(&output.stderr).to_string();
    let compiled = output.status.success() && !stderr.contains("Error");
    let diagnostics = stderr
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect();
    Ok(CompileResult {
        compiled,
        tool: CompileTool::ExternalSolc,
        diagnostics,
    })
}

//! Tolerant Solidity lexer. Comments (including NatSpec) are recorded as
//! skipped spans rather than tokens; pragma version literals such as
//! `0.8.0` get their own token kind because they do not fit the ordinary
//! number grammar.

use crate::FrontendError;

#[derive(Debug, Clone)]
pub struct ContractSource {
    pub text: String,
    pub origin: String,
}

impl ContractSource {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Result<Self, FrontendError> {
        let text = text.into();
        let origin = origin.into();
        if text.is_empty() && origin != "generated" {
            return Err(FrontendError::EmptySource(origin));
        }
        Ok(Self { text, origin })
    }

    /// Source produced by a model rather than read from a corpus file.
    pub fn generated(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            origin: "generated".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Number,
    Str,
    Punctuation,
    PragmaVersion,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: (usize, usize),
}

#[derive(Debug, Clone, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    /// Byte spans of comments that were skipped during lexing.
    pub skipped: Vec<(usize, usize)>,
}

const KEYWORDS: &[&str] = &[
    "abstract", "address", "anonymous", "assembly", "assert", "bool", "break", "byte", "bytes",
    "calldata", "catch", "constant", "constructor", "continue", "contract", "delete", "do",
    "else", "emit", "enum", "error", "event", "external", "fallback", "false", "for", "function",
    "if", "immutable", "import", "indexed", "int", "interface", "internal", "is", "library",
    "mapping", "memory", "modifier", "new", "override", "payable", "pragma", "private", "public",
    "pure", "receive", "require", "return", "returns", "revert", "storage", "string", "struct",
    "throw", "true", "try", "uint", "unchecked", "using", "view", "virtual", "while",
];

/// Keywords plus the sized elementary types (`uint256`, `bytes32`, ...).
pub fn is_keyword(word: &str) -> bool {
    if KEYWORDS.binary_search(&word).is_ok() {
        return true;
    }
    for prefix in ["uint", "int", "bytes"] {
        if let Some(rest) = word.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<u8> {
        self.src.get(self.pos + off).copied()
    }

    fn run(&mut self) -> Result<TokenStream, FrontendError> {
        let mut out = TokenStream::default();
        while let Some(b) = self.peek() {
            match b {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                }
                b'/' if self.peek_at(1) == Some(b'/') => {
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c != b'\n') {
                        self.pos += 1;
                    }
                    out.skipped.push((start, self.pos));
                }
                b'/' if self.peek_at(1) == Some(b'*') => {
                    let start = self.pos;
                    self.pos += 2;
                    loop {
                        match self.peek() {
                            None => {
                                return Err(FrontendError::Lex {
                                    offset: start,
                                    message: "unterminated block comment".into(),
                                })
                            }
                            Some(b'*') if self.peek_at(1) == Some(b'/') => {
                                self.pos += 2;
                                break;
                            }
                            _ => self.pos += 1,
                        }
                    }
                    out.skipped.push((start, self.pos));
                }
                b'"' | b'\'' => {
                    let tok = self.string(b)?;
                    out.tokens.push(tok);
                }
                b'0'..=b'9' => {
                    let tok = self.number();
                    out.tokens.push(tok);
                }
                b if b.is_ascii_alphabetic() || b == b'_' || b == b'$' => {
                    let tok = self.word();
                    out.tokens.push(tok);
                }
                _ => {
                    let tok = self.punct();
                    out.tokens.push(tok);
                }
            }
        }
        Ok(out)
    }

    fn string(&mut self, quote: u8) -> Result<Token, FrontendError> {
        let start = self.pos;
        self.pos += 1;
        loop {
            match self.peek() {
                None | Some(b'\n') => {
                    return Err(FrontendError::Lex {
                        offset: start,
                        message: "unterminated string literal".into(),
                    })
                }
                Some(b'\\') => self.pos += 2,
                Some(c) if c == quote => {
                    self.pos += 1;
                    break;
                }
                _ => self.pos += 1,
            }
        }
        Ok(self.token(TokenKind::Str, start))
    }

    fn number(&mut self) -> Token {
        let start = self.pos;
        if self.peek() == Some(b'0') && matches!(self.peek_at(1), Some(b'x') | Some(b'X')) {
            self.pos += 2;
            while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
                self.pos += 1;
            }
            return self.token(TokenKind::Number, start);
        }
        let mut dots = 0;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        while self.peek() == Some(b'.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            dots += 1;
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if dots < 2 && matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mut ahead = 1;
            if matches!(self.peek_at(1), Some(b'+') | Some(b'-')) {
                ahead = 2;
            }
            if self.peek_at(ahead).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += ahead;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let kind = if dots >= 2 {
            TokenKind::PragmaVersion
        } else {
            TokenKind::Number
        };
        self.token(kind, start)
    }

    fn word(&mut self) -> Token {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'$')
        {
            self.pos += 1;
        }
        let lexeme = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let kind = if is_keyword(lexeme) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        self.token(kind, start)
    }

    fn punct(&mut self) -> Token {
        const THREE: &[&str] = &[">>=", "<<=", "**="];
        const TWO: &[&str] = &[
            "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=",
            "=>", "->", "++", "--", "<<", ">>", "**",
        ];
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let len = if THREE.iter().any(|op| rest.starts_with(op.as_bytes())) {
            3
        } else if TWO.iter().any(|op| rest.starts_with(op.as_bytes())) {
            2
        } else {
            // Advance over a full UTF-8 scalar so spans stay on char
            // boundaries for non-ASCII garbage in model output.
            let mut l = 1;
            while self.pos + l < self.src.len() && (self.src[self.pos + l] & 0xC0) == 0x80 {
                l += 1;
            }
            l
        };
        self.pos += len;
        self.token(TokenKind::Punctuation, start)
    }

    fn token(&self, kind: TokenKind, start: usize) -> Token {
        Token {
            kind,
            lexeme: String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
            span: (start, self.pos),
        }
    }
}

pub fn tokenize(source: &ContractSource) -> Result<TokenStream, FrontendError> {
    Lexer {
        src: source.text.as_bytes(),
        pos: 0,
    }
    .run()
}

/// Remove `//`, `/* */` and NatSpec (`///`, `/** */`) comments. A comment
/// that occupies a whole line takes the line (and its newline) with it;
/// an inline comment is deleted byte-for-byte.
pub fn strip_comments(source: &ContractSource) -> Result<ContractSource, FrontendError> {
    let stream = tokenize(source)?;
    let text = source.text.as_bytes();
    let mut delete: Vec<(usize, usize)> = Vec::with_capacity(stream.skipped.len());
    for &(start, end) in &stream.skipped {
        let line_start = text[..start]
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |p| p + 1);
        let line_end = text[end..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(text.len(), |p| end + p);
        let prefix_ws = text[line_start..start]
            .iter()
            .all(|b| b.is_ascii_whitespace());
        let suffix_ws = text[end..line_end].iter().all(|b| b.is_ascii_whitespace());
        if prefix_ws && suffix_ws {
            delete.push((line_start, (line_end + 1).min(text.len())));
        } else {
            delete.push((start, end));
        }
    }
    let mut out = Vec::with_capacity(text.len());
    let mut cursor = 0;
    for (start, end) in delete {
        if start > cursor {
            out.extend_from_slice(&text[cursor..start]);
        }
        cursor = cursor.max(end);
    }
    out.extend_from_slice(&text[cursor..]);
    Ok(ContractSource {
        text: String::from_utf8(out).expect("deletion respects char boundaries"),
        origin: source.origin.clone(),
    })
}

//! Lossless tokenizer. The token stream partitions the source exactly:
//! every byte belongs to one token, and concatenating token texts
//! reconstructs the input byte-for-byte.
//!
//! Lexing is line/regex-level with language-specific string and comment
//! rules; no parse tree is built. Unknown symbols become one-character
//! punctuation tokens so arbitrary inputs still lex losslessly; only
//! unterminated strings and block comments are hard errors.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{LanguageId, LanguageProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Keyword,
    Operator,
    Identifier,
    NumericLiteral,
    StringLiteral,
    Comment,
    Whitespace,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offsets `[start, end)` into the source.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Whitespace | TokenKind::Comment)
    }
}

#[derive(Debug, Clone)]
pub struct TokenStream {
    pub source: String,
    pub tokens: Vec<Token>,
}

impl TokenStream {
    /// Concatenation of all token texts; equals `source` by construction.
    pub fn reconstruct(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn kinds(&self) -> Vec<TokenKind> {
        self.tokens.iter().map(|t| t.kind).collect()
    }
}

/// Tokenize `source` under `profile`'s vocabulary.
///
/// Identifiers matching the keyword table come back as `Keyword`; builtins
/// stay `Identifier` (protection is the binder's call, not the lexer's).
pub fn tokenize(source: &str, profile: &LanguageProfile) -> Result<TokenStream> {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
        tokens: Vec::new(),
        profile,
    };
    lexer.run()?;
    Ok(TokenStream {
        source: source.to_string(),
        tokens: lexer.tokens,
    })
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    tokens: Vec<Token>,
    profile: &'a LanguageProfile,
}

impl<'a> Lexer<'a> {
    fn run(&mut self) -> Result<()> {
        while self.pos < self.src.len() {
            let start = self.pos;
            let c = self.peek_char();
            if c.is_whitespace() {
                self.lex_whitespace();
            } else if self.at_comment_start() {
                self.lex_comment()?;
            } else if self.at_string_start() {
                self.lex_string()?;
            } else if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
                self.lex_number();
            } else if is_ident_start(c, self.profile.language_id) {
                self.lex_word();
            } else if let Some(len) = self.match_operator() {
                self.emit(TokenKind::Operator, start, start + len);
            } else {
                // Catch-all: one char of punctuation keeps lexing total.
                self.emit(TokenKind::Punctuation, start, start + c.len_utf8());
            }
            debug_assert!(self.pos > start, "lexer must always make progress");
        }
        Ok(())
    }

    fn peek_char(&self) -> char {
        self.src[self.pos..].chars().next().unwrap()
    }

    fn peek_at(&self, byte_offset: usize) -> Option<char> {
        self.src.get(self.pos + byte_offset..)?.chars().next()
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn emit(&mut self, kind: TokenKind, start: usize, end: usize) {
        debug_assert!(end > start);
        self.tokens.push(Token {
            kind,
            text: self.src[start..end].to_string(),
            span: start..end,
        });
        self.pos = end;
    }

    fn lex_whitespace(&mut self) {
        let start = self.pos;
        let mut end = self.pos;
        for c in self.src[self.pos..].chars() {
            if c.is_whitespace() {
                end += c.len_utf8();
            } else {
                break;
            }
        }
        self.emit(TokenKind::Whitespace, start, end);
    }

    fn at_comment_start(&self) -> bool {
        let rest = self.rest();
        match self.profile.language_id {
            LanguageId::Python => rest.starts_with('#'),
            _ => rest.starts_with("//") || rest.starts_with("/*"),
        }
    }

    fn lex_comment(&mut self) -> Result<()> {
        let start = self.pos;
        let rest = self.rest();
        if rest.starts_with("/*") {
            match rest.find_at(2, "*/") {
                Some(end_rel) => {
                    self.emit(TokenKind::Comment, start, start + end_rel + 2);
                    Ok(())
                }
                None => Err(Error::Lex {
                    offset: start,
                    reason: "unterminated block comment".into(),
                }),
            }
        } else {
            // Line comment: up to but not including the newline.
            let end_rel = rest.find('\n').unwrap_or(rest.len());
            self.emit(TokenKind::Comment, start, start + end_rel);
            Ok(())
        }
    }

    fn at_string_start(&self) -> bool {
        let c = self.peek_char();
        if c == '"' || c == '\'' {
            return true;
        }
        self.profile.language_id == LanguageId::Python && self.python_string_prefix_len() > 0
    }

    /// Byte length of a Python string prefix (r, b, u, f, rb, ...) at the
    /// cursor, or 0 when the cursor is not at a prefixed string.
    fn python_string_prefix_len(&self) -> usize {
        let rest = self.rest();
        let mut len = 0;
        for c in rest.chars().take(2) {
            if matches!(c, 'r' | 'R' | 'b' | 'B' | 'u' | 'U' | 'f' | 'F') {
                len += 1;
            } else {
                break;
            }
        }
        if len == 0 {
            return 0;
        }
        match rest[len..].chars().next() {
            Some('"') | Some('\'') => len,
            _ => 0,
        }
    }

    fn lex_string(&mut self) -> Result<()> {
        let start = self.pos;
        let mut cursor = self.pos;
        if self.profile.language_id == LanguageId::Python {
            cursor += self.python_string_prefix_len();
        }
        let rest = &self.src[cursor..];
        let quote = rest.chars().next().unwrap();

        if self.profile.language_id == LanguageId::Python {
            let triple: String = std::iter::repeat_n(quote, 3).collect();
            if rest.starts_with(&triple) {
                return self.lex_quoted(start, cursor + 3, &triple, true);
            }
        }
        let closer = quote.to_string();
        let multiline = false;
        self.lex_quoted(start, cursor + quote.len_utf8(), &closer, multiline)
    }

    /// Scan from `body_start` for `closer`, honoring backslash escapes.
    /// Single-line strings error out at a raw newline.
    fn lex_quoted(&mut self, start: usize, body_start: usize, closer: &str, multiline: bool) -> Result<()> {
        let mut i = body_start;
        let bytes = self.src.as_bytes();
        while i < bytes.len() {
            if self.src[i..].starts_with(closer) {
                self.emit(TokenKind::StringLiteral, start, i + closer.len());
                return Ok(());
            }
            let c = self.src[i..].chars().next().unwrap();
            if c == '\\' {
                i += 1;
                if i < bytes.len() {
                    i += self.src[i..].chars().next().unwrap().len_utf8();
                }
                continue;
            }
            if c == '\n' && !multiline {
                break;
            }
            i += c.len_utf8();
        }
        Err(Error::Lex {
            offset: start,
            reason: "unterminated string literal".into(),
        })
    }

    fn lex_number(&mut self) {
        let start = self.pos;
        let src = self.src;
        let bytes = src.as_bytes();
        let mut i = self.pos;
        let hex = src[i..].starts_with("0x") || src[i..].starts_with("0X");
        while i < bytes.len() {
            let c = src[i..].chars().next().unwrap();
            let exp_marker = if hex { ['p', 'P'] } else { ['e', 'E'] };
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                i += 1;
            } else if (c == '+' || c == '-')
                && i > start
                && exp_marker.contains(&(bytes[i - 1] as char))
            {
                // Exponent sign, as in 1e-5 or 0x1p+3.
                i += 1;
            } else {
                break;
            }
        }
        self.emit(TokenKind::NumericLiteral, start, i);
    }

    fn lex_word(&mut self) {
        let start = self.pos;
        let mut end = self.pos;
        for c in self.src[self.pos..].chars() {
            let first = end == start;
            let ok = if first {
                is_ident_start(c, self.profile.language_id)
            } else {
                is_ident_continue(c, self.profile.language_id)
            };
            if ok {
                end += c.len_utf8();
            } else {
                break;
            }
        }
        let kind = if self.profile.is_keyword(&self.src[start..end]) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        self.emit(kind, start, end);
    }

    fn match_operator(&self) -> Option<usize> {
        let rest = self.rest();
        let max = self.profile.max_operator_len().min(rest.len());
        for len in (1..=max).rev() {
            if !rest.is_char_boundary(len) {
                continue;
            }
            if self.profile.operators.contains(&rest[..len]) {
                return Some(len);
            }
        }
        None
    }
}

fn is_ident_start(c: char, language: LanguageId) -> bool {
    c == '_'
        || c.is_alphabetic()
        || (c == '$' && matches!(language, LanguageId::Java | LanguageId::C | LanguageId::Cpp))
}

fn is_ident_continue(c: char, language: LanguageId) -> bool {
    c.is_ascii_digit() || is_ident_start(c, language)
}

trait FindAt {
    fn find_at(&self, from: usize, needle: &str) -> Option<usize>;
}

impl FindAt for &str {
    fn find_at(&self, from: usize, needle: &str) -> Option<usize> {
        self[from..].find(needle).map(|i| i + from)
    }
}

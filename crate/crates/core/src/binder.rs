//! Groups every identifier occurrence in a unit by name and assigns each
//! name one class: variable, method definition, method invocation, or
//! protected.
//!
//! Grouping is name-level, not scope-level: all occurrences of the same
//! text inside one unit share a symbol, so a later rename stays consistent
//! across the whole unit. Classification is total; anything unresolvable
//! falls back to `Variable`, which a consistent rename cannot break at unit
//! scope.
//!
//! Protection rules, applied before everything else:
//!   - builtin names from the language profile;
//!   - names in qualified/member position (after `.`, `->`, `::`), and
//!     names before a scope-resolution `::` (namespace heads); the receiver
//!     before a member dot stays renameable;
//!   - names on preprocessor-directive lines (C/C++) and import lines
//!     (Java/Python), and annotation/decorator names after `@`;
//!   - Python keyword-argument names at call sites;
//!   - capitalized names with type-position evidence and no unit-local
//!     definition (C-family), which keeps external type references intact.

use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::lexer::{Token, TokenKind, TokenStream};
use crate::profile::{LanguageId, LanguageProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentifierClass {
    Variable,
    MethodDefinition,
    MethodInvocation,
    Protected,
}

impl IdentifierClass {
    /// The classes a rename may target.
    pub const RENAMEABLE: [IdentifierClass; 3] = [
        IdentifierClass::Variable,
        IdentifierClass::MethodDefinition,
        IdentifierClass::MethodInvocation,
    ];

    pub fn is_renameable(self) -> bool {
        self != IdentifierClass::Protected
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IdentifierClass::Variable => "variable",
            IdentifierClass::MethodDefinition => "method_definition",
            IdentifierClass::MethodInvocation => "method_invocation",
            IdentifierClass::Protected => "protected",
        }
    }
}

/// One named symbol and every place it occurs.
#[derive(Debug, Clone)]
pub struct Symbol {
    pub name: String,
    pub class: IdentifierClass,
    /// Byte spans of all occurrences, in stream order.
    pub occurrences: Vec<Range<usize>>,
}

/// All non-builtin identifiers of a unit, keyed by name, in first-occurrence
/// order. Builtin-named identifiers are implicitly protected and carry no
/// entry.
#[derive(Debug, Clone, Default)]
pub struct IdentifierTable {
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

impl IdentifierTable {
    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.index.get(name).map(|&i| &self.symbols[i])
    }

    pub fn class_of(&self, name: &str) -> Option<IdentifierClass> {
        self.get(name).map(|s| s.class)
    }

    /// Symbols in order of first occurrence in the token stream.
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Total occurrence count across all symbols.
    pub fn occurrence_count(&self) -> usize {
        self.symbols.iter().map(|s| s.occurrences.len()).sum()
    }

    fn push_occurrence(&mut self, name: &str, span: Range<usize>) {
        match self.index.get(name) {
            Some(&i) => self.symbols[i].occurrences.push(span),
            None => {
                self.index.insert(name.to_string(), self.symbols.len());
                self.symbols.push(Symbol {
                    name: name.to_string(),
                    class: IdentifierClass::Variable,
                    occurrences: vec![span],
                });
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ParenKind {
    /// Opened right after an identifier: call arguments (or a definition's
    /// parameter list, tracked separately).
    Call,
    /// Parameter list of a Python `def`.
    Def,
    /// Grouping, tuples, conditions.
    Group,
}

#[derive(Debug, Default, Clone, Copy)]
struct Evidence {
    protected: bool,
    type_position: bool,
    definition: bool,
    invocation: bool,
}

/// Classify every identifier of `stream` into an [`IdentifierTable`].
///
/// `stream` must have been produced by [`crate::lexer::tokenize`] with the
/// same `profile`.
pub fn classify_identifiers(stream: &TokenStream, profile: &LanguageProfile) -> IdentifierTable {
    let ctx = UnitContext::new(stream, profile);
    let mut evidence: HashMap<&str, Evidence> = HashMap::new();
    let mut table = IdentifierTable::default();

    for (sig_pos, &tok_idx) in ctx.sig.iter().enumerate() {
        let tok = &stream.tokens[tok_idx];
        if tok.kind != TokenKind::Identifier {
            continue;
        }
        if profile.is_builtin(&tok.text) {
            continue;
        }
        table.push_occurrence(&tok.text, tok.span.clone());
        let occurrence = ctx.occurrence_evidence(sig_pos);
        let entry = evidence.entry(tok.text.as_str()).or_default();
        entry.protected |= occurrence.protected;
        entry.type_position |= occurrence.type_position;
        entry.definition |= occurrence.definition;
        entry.invocation |= occurrence.invocation;
    }

    let c_family = profile.language_id != LanguageId::Python;
    for symbol in &mut table.symbols {
        let ev = evidence[symbol.name.as_str()];
        let capitalized = symbol.name.chars().next().is_some_and(|c| c.is_uppercase());
        let type_like = c_family && capitalized && ev.type_position && !ev.definition;
        symbol.class = if ev.protected || type_like {
            IdentifierClass::Protected
        } else if ev.definition {
            IdentifierClass::MethodDefinition
        } else if ev.invocation {
            IdentifierClass::MethodInvocation
        } else {
            IdentifierClass::Variable
        };
    }
    table
}

/// Precomputed positional context shared by all occurrence checks.
struct UnitContext<'a> {
    stream: &'a TokenStream,
    profile: &'a LanguageProfile,
    /// Indices of significant (non-trivia) tokens, in order.
    sig: Vec<usize>,
    /// Line number of each significant token.
    line: Vec<usize>,
    /// Innermost paren kind at each significant token, if inside parens.
    paren: Vec<Option<ParenKind>>,
    /// Lines whose first significant token opens a protected region:
    /// preprocessor directives (C/C++) and import/package lines (Java,
    /// Python).
    protected_lines: Vec<bool>,
}

impl<'a> UnitContext<'a> {
    fn new(stream: &'a TokenStream, profile: &'a LanguageProfile) -> Self {
        let sig: Vec<usize> = stream
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_trivia())
            .map(|(i, _)| i)
            .collect();

        let newlines: Vec<usize> = stream
            .source
            .bytes()
            .enumerate()
            .filter(|&(_, b)| b == b'\n')
            .map(|(i, _)| i)
            .collect();
        let line_of = |offset: usize| newlines.partition_point(|&nl| nl < offset);
        let line: Vec<usize> = sig
            .iter()
            .map(|&i| line_of(stream.tokens[i].span.start))
            .collect();

        let line_count = newlines.len() + 1;
        let mut protected_lines = vec![false; line_count];
        let mut seen_line = usize::MAX;
        for (pos, &tok_idx) in sig.iter().enumerate() {
            if line[pos] == seen_line {
                continue;
            }
            seen_line = line[pos];
            let tok = &stream.tokens[tok_idx];
            let leads_protected_line = match profile.language_id {
                LanguageId::C | LanguageId::Cpp => tok.text == "#",
                LanguageId::Java => tok.kind == TokenKind::Keyword && matches!(tok.text.as_str(), "import" | "package"),
                LanguageId::Python => tok.kind == TokenKind::Keyword && matches!(tok.text.as_str(), "import" | "from"),
            };
            if leads_protected_line {
                protected_lines[seen_line] = true;
            }
        }

        // Paren-kind context, used for Python keyword arguments.
        let mut paren = vec![None; sig.len()];
        let mut stack: Vec<ParenKind> = Vec::new();
        for pos in 0..sig.len() {
            paren[pos] = stack.last().copied();
            let tok = &stream.tokens[sig[pos]];
            match tok.text.as_str() {
                "(" => {
                    let kind = match pos.checked_sub(1).map(|p| &stream.tokens[sig[p]]) {
                        Some(prev) if prev.kind == TokenKind::Identifier => {
                            let is_def_name = pos >= 2 && {
                                let before = &stream.tokens[sig[pos - 2]];
                                before.kind == TokenKind::Keyword
                                    && profile.definition_keywords.contains(&before.text)
                            };
                            if is_def_name {
                                ParenKind::Def
                            } else {
                                ParenKind::Call
                            }
                        }
                        _ => ParenKind::Group,
                    };
                    stack.push(kind);
                }
                ")" => {
                    stack.pop();
                }
                _ => {}
            }
        }

        Self {
            stream,
            profile,
            sig,
            line,
            paren,
            protected_lines,
        }
    }

    fn sig_token(&self, pos: usize) -> &Token {
        &self.stream.tokens[self.sig[pos]]
    }

    fn prev(&self, pos: usize) -> Option<&Token> {
        pos.checked_sub(1).map(|p| self.sig_token(p))
    }

    fn next(&self, pos: usize) -> Option<&Token> {
        if pos + 1 < self.sig.len() {
            Some(self.sig_token(pos + 1))
        } else {
            None
        }
    }

    fn occurrence_evidence(&self, pos: usize) -> Evidence {
        let profile = self.profile;
        let prev = self.prev(pos);
        let next = self.next(pos);

        let mut ev = Evidence::default();

        // Qualified/member position, or a namespace head before `::`.
        if let Some(p) = prev {
            if profile.qualification_separators.contains(&p.text) {
                ev.protected = true;
            }
        }
        if let Some(n) = next {
            if profile.scope_resolution_separators.contains(&n.text) {
                ev.protected = true;
            }
        }
        if self.protected_lines[self.line[pos]] {
            ev.protected = true;
        }
        match profile.language_id {
            // Annotation names reference external declarations.
            LanguageId::Java => {
                if prev.is_some_and(|p| p.text == "@") {
                    ev.protected = true;
                }
            }
            // Decorators open a line; mid-line `@` is matrix multiplication.
            LanguageId::Python => {
                if prev.is_some_and(|p| p.text == "@")
                    && pos >= 1
                    && self.is_line_leader(pos - 1)
                {
                    ev.protected = true;
                }
                if self.is_python_kwarg(pos) {
                    ev.protected = true;
                }
            }
            _ => {}
        }

        if profile.language_id == LanguageId::Python {
            ev.definition = prev.is_some_and(|p| {
                p.kind == TokenKind::Keyword && profile.definition_keywords.contains(&p.text)
            });
        } else {
            ev.type_position = prev.is_some_and(|p| {
                p.kind == TokenKind::Keyword && profile.type_introducers.contains(&p.text)
            }) || next.is_some_and(|n| n.kind == TokenKind::Identifier);
            ev.definition = self.is_c_family_definition(pos);
        }

        ev.invocation = next.is_some_and(|n| n.text == "(");
        ev
    }

    fn is_line_leader(&self, pos: usize) -> bool {
        pos == 0 || self.line[pos - 1] != self.line[pos]
    }

    /// Keyword-argument name at a call site: `f(x=1)`. Parameter defaults in
    /// a `def` header bind locally and stay renameable.
    fn is_python_kwarg(&self, pos: usize) -> bool {
        if self.paren[pos] != Some(ParenKind::Call) {
            return false;
        }
        let after_opener = self
            .prev(pos)
            .is_some_and(|p| p.text == "(" || p.text == ",");
        let before_assign = self
            .next(pos)
            .is_some_and(|n| n.kind == TokenKind::Operator && n.text == "=");
        after_opener && before_assign
    }

    /// Function/method definition shape: `name ( ... ) <modifiers> {`.
    ///
    /// The scan after the closing paren skips identifier/keyword modifier
    /// tokens (const, noexcept, throws-lists, trailing return types) before
    /// requiring an opening brace.
    fn is_c_family_definition(&self, pos: usize) -> bool {
        let profile = self.profile;
        if let Some(p) = self.prev(pos) {
            if p.kind == TokenKind::Keyword && p.text == "new" {
                return false;
            }
            if profile.qualification_separators.contains(&p.text) {
                return false;
            }
        }
        if self.next(pos).is_none_or(|n| n.text != "(") {
            return false;
        }

        // Find the matching close paren.
        let mut depth = 0usize;
        let mut cursor = pos + 1;
        loop {
            if cursor >= self.sig.len() {
                return false;
            }
            match self.sig_token(cursor).text.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            cursor += 1;
        }

        // Skip modifier tokens between the parameter list and the body.
        const SKIP_LIMIT: usize = 64;
        let mut skipped = 0;
        cursor += 1;
        while cursor < self.sig.len() && skipped < SKIP_LIMIT {
            let tok = self.sig_token(cursor);
            match tok.kind {
                TokenKind::Identifier | TokenKind::Keyword => {}
                _ => match tok.text.as_str() {
                    "{" => return true,
                    "," | "::" | "<" | ">" | "*" | "&" | "->" | "[" | "]" => {}
                    _ => return false,
                },
            }
            cursor += 1;
            skipped += 1;
        }
        false
    }
}

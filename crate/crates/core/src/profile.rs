//! Per-language token vocabularies and the syntactic cues used to classify
//! identifiers.
//!
//! Keyword, builtin, and operator tables are shipped as data files (one per
//! language, embedded at compile time) in a line-oriented format: one token
//! per line, UTF-8, with `[keywords]` / `[builtins]` / `[operators]` section
//! headers. Qualification separators and definition keywords are structural
//! properties of each language and live here in code.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::fnv1a64;

/// The languages this toolkit can transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageId {
    C,
    Cpp,
    Java,
    Python,
}

impl LanguageId {
    pub const ALL: [LanguageId; 4] = [
        LanguageId::C,
        LanguageId::Cpp,
        LanguageId::Java,
        LanguageId::Python,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LanguageId::C => "c",
            LanguageId::Cpp => "cpp",
            LanguageId::Java => "java",
            LanguageId::Python => "python",
        }
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LanguageId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c" => Ok(LanguageId::C),
            "cpp" | "c++" | "cxx" => Ok(LanguageId::Cpp),
            "java" => Ok(LanguageId::Java),
            "python" | "py" => Ok(LanguageId::Python),
            other => Err(Error::UnsupportedLanguage(other.to_string())),
        }
    }
}

/// Fixed token vocabulary and identifier-classification cues for one language.
///
/// Immutable after load; safe to share across threads.
#[derive(Debug, Clone)]
pub struct LanguageProfile {
    pub language_id: LanguageId,
    pub keywords: BTreeSet<String>,
    /// Standard-library names that are never renamed.
    pub builtins: BTreeSet<String>,
    pub operators: BTreeSet<String>,
    /// Member/scope access tokens. A name directly after one of these is in
    /// qualified (member) position.
    pub qualification_separators: BTreeSet<String>,
    /// Separators that also protect the name *before* them (`std::swap`
    /// protects `std`); member dots do not, so receivers stay renameable.
    pub scope_resolution_separators: BTreeSet<String>,
    /// Tokens that introduce a function/method definition (`def` in Python).
    /// Empty for languages where definitions are recognized by shape.
    pub definition_keywords: BTreeSet<String>,
    /// Keywords that mark the next identifier as a type name.
    pub type_introducers: BTreeSet<String>,
}

impl LanguageProfile {
    /// Longest operator length, used for maximal-munch operator lexing.
    pub fn max_operator_len(&self) -> usize {
        self.operators.iter().map(|op| op.len()).max().unwrap_or(1)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.keywords.contains(text)
    }

    pub fn is_builtin(&self, text: &str) -> bool {
        self.builtins.contains(text)
    }

    /// Stable content digest; equal across runs for equal profile data.
    pub fn digest(&self) -> u64 {
        let mut buf = String::new();
        buf.push_str(self.language_id.as_str());
        for section in [
            &self.keywords,
            &self.builtins,
            &self.operators,
            &self.qualification_separators,
            &self.scope_resolution_separators,
            &self.definition_keywords,
            &self.type_introducers,
        ] {
            buf.push('\x1f');
            for entry in section.iter() {
                buf.push_str(entry);
                buf.push('\n');
            }
        }
        fnv1a64(buf.as_bytes())
    }
}

const C_PROFILE_DATA: &str = include_str!("../data/profiles/c.profile");
const CPP_PROFILE_DATA: &str = include_str!("../data/profiles/cpp.profile");
const JAVA_PROFILE_DATA: &str = include_str!("../data/profiles/java.profile");
const PYTHON_PROFILE_DATA: &str = include_str!("../data/profiles/python.profile");

/// Parse the `[keywords]` / `[builtins]` / `[operators]` sections of a
/// profile data file.
pub fn parse_profile_data(data: &str) -> Result<(BTreeSet<String>, BTreeSet<String>, BTreeSet<String>)> {
    let mut keywords = BTreeSet::new();
    let mut builtins = BTreeSet::new();
    let mut operators = BTreeSet::new();
    let mut current: Option<&mut BTreeSet<String>> = None;
    for line in data.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[keywords]" => current = Some(&mut keywords),
            "[builtins]" => current = Some(&mut builtins),
            "[operators]" => current = Some(&mut operators),
            entry if entry.starts_with('[') => {
                return Err(Error::MalformedProfile(format!("unknown section {entry}")));
            }
            entry => match current {
                Some(ref mut section) => {
                    section.insert(entry.to_string());
                }
                None => {
                    return Err(Error::MalformedProfile(format!(
                        "entry {entry:?} before any section header"
                    )));
                }
            },
        }
    }
    if keywords.is_empty() {
        return Err(Error::MalformedProfile("empty keyword section".into()));
    }
    Ok((keywords, builtins, operators))
}

fn collect(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn build_profile(language_id: LanguageId) -> LanguageProfile {
    let data = match language_id {
        LanguageId::C => C_PROFILE_DATA,
        LanguageId::Cpp => CPP_PROFILE_DATA,
        LanguageId::Java => JAVA_PROFILE_DATA,
        LanguageId::Python => PYTHON_PROFILE_DATA,
    };
    let (keywords, builtins, operators) =
        parse_profile_data(data).expect("embedded profile data is well-formed");

    let (quals, scopes, defs, types) = match language_id {
        LanguageId::C => (collect(&[".", "->"]), collect(&[]), collect(&[]), collect(&["struct", "union", "enum"])),
        LanguageId::Cpp => (
            collect(&[".", "->", "::"]),
            collect(&["::"]),
            collect(&[]),
            collect(&["struct", "union", "enum", "class", "typename", "new"]),
        ),
        LanguageId::Java => (
            collect(&[".", "::"]),
            collect(&["::"]),
            collect(&[]),
            collect(&["class", "interface", "enum", "new", "extends", "implements", "instanceof", "throws"]),
        ),
        LanguageId::Python => (collect(&["."]), collect(&[]), collect(&["def"]), collect(&[])),
    };

    let profile = LanguageProfile {
        language_id,
        keywords,
        builtins,
        operators,
        qualification_separators: quals,
        scope_resolution_separators: scopes,
        definition_keywords: defs,
        type_introducers: types,
    };

    // Load-time invariants: sections are pairwise disjoint and the fixed
    // keyword counts hold.
    assert!(
        profile.keywords.is_disjoint(&profile.builtins),
        "{language_id}: keywords and builtins overlap"
    );
    assert!(
        profile.keywords.is_disjoint(&profile.operators),
        "{language_id}: keywords and operators overlap"
    );
    assert!(
        profile.builtins.is_disjoint(&profile.operators),
        "{language_id}: builtins and operators overlap"
    );
    match language_id {
        LanguageId::C => assert_eq!(profile.keywords.len(), 32, "C keyword count"),
        LanguageId::Python => assert_eq!(profile.keywords.len(), 35, "Python keyword count"),
        _ => {}
    }
    for sep in &profile.qualification_separators {
        assert!(
            profile.operators.contains(sep),
            "{language_id}: qualification separator {sep:?} missing from operators"
        );
    }

    profile
}

/// Returns the immutable profile for `language_id`. Repeated calls return
/// the same content; profiles are cached for the process lifetime.
pub fn load_profile(language_id: LanguageId) -> &'static LanguageProfile {
    static CACHE: OnceLock<[LanguageProfile; 4]> = OnceLock::new();
    let profiles = CACHE.get_or_init(|| {
        [
            build_profile(LanguageId::C),
            build_profile(LanguageId::Cpp),
            build_profile(LanguageId::Java),
            build_profile(LanguageId::Python),
        ]
    });
    match language_id {
        LanguageId::C => &profiles[0],
        LanguageId::Cpp => &profiles[1],
        LanguageId::Java => &profiles[2],
        LanguageId::Python => &profiles[3],
    }
}

/// Parse a language name, mapping unknown names to the unsupported-language
/// error rather than panicking.
pub fn load_profile_by_name(name: &str) -> Result<&'static LanguageProfile> {
    Ok(load_profile(name.parse::<LanguageId>()?))
}

//! Corpus-transformation toolkit that anonymizes user-defined names in
//! source code.
//!
//! A source unit is lexed into a lossless token stream, its identifiers are
//! grouped and classified (variable, method definition, method invocation,
//! protected), and the renameable classes are consistently rewritten under
//! sequential, random, or meaningful naming schemes. Crossing the four
//! target sets with the two non-sequential schemes yields eight dataset
//! variants per corpus. An evaluation harness scores the result two ways:
//! literal token matching, which degrades under anonymization, and
//! structural fingerprinting, which is invariant to it.

pub mod binder;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod golden;
pub mod hash;
pub mod lexer;
pub mod naming;
pub mod profile;
pub mod transform;

pub use binder::{classify_identifiers, IdentifierClass, IdentifierTable};
pub use corpus::{
    load_records, read_records, transform_corpus, DatasetRecord, RecordReader, StatsReport,
};
pub use error::{Error, Result};
pub use eval::{
    clone_eval, search_eval, structure_fingerprint, CloneBackend, CloneEval, Fingerprint,
    SearchSummary,
};
pub use lexer::{tokenize, Token, TokenKind, TokenStream};
pub use naming::{build_vocabulary, NamingScheme, SeededGenerator, Vocabulary};
pub use profile::{load_profile, LanguageId, LanguageProfile};
pub use transform::{
    apply_renames, canonical_variants, generate_variants, plan_renames, transform_unit,
    AnonymizationSpec, RenameMap,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported language: {0}")]
    UnsupportedLanguage(String),

    #[error("lexing failed at byte {offset}: {reason}")]
    Lex { offset: usize, reason: String },

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("duplicate record id {id:?} at line {line}")]
    DuplicateId { id: String, line: usize },

    #[error("meaningful naming scheme requires a vocabulary")]
    MissingVocabulary,

    #[error("protected names are never generated")]
    ProtectedNameGeneration,

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("clone corpus is degenerate: {0}")]
    DegenerateCloneCorpus(String),

    #[error("malformed profile data: {0}")]
    MalformedProfile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

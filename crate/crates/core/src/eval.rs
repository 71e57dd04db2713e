//! Desk-scale evaluators that separate the two channels a code model can
//! read: the literal channel (identifier spellings) and the structural
//! channel (everything renaming cannot touch).
//!
//! The literal side is a tf-idf docstring-to-code ranker and a raw-token
//! Jaccard clone scorer. The structural side fingerprints a unit as the set
//! of hashed k-grams over its class-normalized token sequence: renameable
//! identifiers collapse to their class placeholder, trivia drops out, and
//! every other token keeps its text. Any valid rename of a unit leaves that
//! sequence unchanged, so the fingerprint is alpha-renaming-invariant by
//! construction.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binder::{classify_identifiers, IdentifierClass, IdentifierTable};
use crate::corpus::DatasetRecord;
use crate::error::{Error, Result};
use crate::hash::{derive_seed, fnv1a64};
use crate::lexer::{tokenize, TokenKind, TokenStream};
use crate::profile::load_profile;

pub const DEFAULT_GRAM_LEN: usize = 5;
pub const DEFAULT_CLONE_THRESHOLD: f64 = 0.7;

/// Set of 64-bit k-gram hashes over a class-normalized token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    grams: BTreeSet<u64>,
}

impl Fingerprint {
    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    /// Set Jaccard similarity; two empty fingerprints count as identical.
    pub fn jaccard(&self, other: &Fingerprint) -> f64 {
        if self.grams.is_empty() && other.grams.is_empty() {
            return 1.0;
        }
        let intersection = self.grams.intersection(&other.grams).count();
        let union = self.grams.len() + other.grams.len() - intersection;
        intersection as f64 / union as f64
    }
}

fn class_placeholder(class: IdentifierClass) -> &'static str {
    match class {
        IdentifierClass::Variable => "\u{1}v",
        IdentifierClass::MethodDefinition => "\u{1}d",
        IdentifierClass::MethodInvocation => "\u{1}i",
        IdentifierClass::Protected => unreachable!("protected names keep their text"),
    }
}

/// The normalized token sequence a fingerprint is built from.
fn normalized_sequence<'a>(stream: &'a TokenStream, table: &'a IdentifierTable) -> Vec<&'a str> {
    stream
        .tokens
        .iter()
        .filter(|t| !t.is_trivia())
        .map(|t| {
            if t.kind == TokenKind::Identifier {
                match table.class_of(&t.text) {
                    Some(class) if class.is_renameable() => class_placeholder(class),
                    _ => t.text.as_str(),
                }
            } else {
                t.text.as_str()
            }
        })
        .collect()
}

/// Fingerprint a unit with k-grams of length `k` (at least 2; shorter units
/// hash as a single whole-sequence gram).
pub fn structure_fingerprint(stream: &TokenStream, table: &IdentifierTable, k: usize) -> Fingerprint {
    let k = k.max(2);
    let seq = normalized_sequence(stream, table);
    let mut grams = BTreeSet::new();
    let hash_window = |window: &[&str]| {
        let mut buf = Vec::new();
        for (i, part) in window.iter().enumerate() {
            if i > 0 {
                buf.push(0x1f);
            }
            buf.extend_from_slice(part.as_bytes());
        }
        fnv1a64(&buf)
    };
    if seq.is_empty() {
        return Fingerprint { grams };
    }
    if seq.len() < k {
        grams.insert(hash_window(&seq));
        return Fingerprint { grams };
    }
    for window in seq.windows(k) {
        grams.insert(hash_window(window));
    }
    Fingerprint { grams }
}

/// Convenience: lex, classify, and fingerprint a record's code.
pub fn fingerprint_record(record: &DatasetRecord, k: usize) -> Result<Fingerprint> {
    let profile = load_profile(record.language);
    let stream = tokenize(&record.code, profile)?;
    let table = classify_identifiers(&stream, profile);
    Ok(structure_fingerprint(&stream, &table, k))
}

/// Raw token-text multiset for the literal backend (trivia excluded).
fn literal_counts(record: &DatasetRecord) -> Result<HashMap<String, u32>> {
    let profile = load_profile(record.language);
    let stream = tokenize(&record.code, profile)?;
    let mut counts = HashMap::new();
    for token in stream.tokens.iter().filter(|t| !t.is_trivia()) {
        *counts.entry(token.text.clone()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Multiset Jaccard: sum of min counts over sum of max counts.
fn multiset_jaccard(a: &HashMap<String, u32>, b: &HashMap<String, u32>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let mut min_sum = 0u64;
    let mut max_sum = 0u64;
    for (token, &ca) in a {
        let cb = b.get(token).copied().unwrap_or(0);
        min_sum += ca.min(cb) as u64;
        max_sum += ca.max(cb) as u64;
    }
    for (token, &cb) in b {
        if !a.contains_key(token) {
            max_sum += cb as u64;
        }
    }
    if max_sum == 0 {
        return 1.0;
    }
    min_sum as f64 / max_sum as f64
}

// ---------------------------------------------------------------------------
// Natural-language code search
// ---------------------------------------------------------------------------

/// Ranking outcome for one query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub query_id: String,
    pub ranked_ids: Vec<String>,
    /// 1.0 when the query's own code ranked first.
    pub accuracy_at_1: f64,
    /// Reciprocal rank of the query's own code.
    pub reciprocal_rank: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSummary {
    pub accuracy_at_1: f64,
    pub mrr: f64,
    pub queries: usize,
    /// Records without a docstring, excluded from querying.
    pub excluded: usize,
    pub candidates_per_query: usize,
}

/// Split an identifier into lowercase subtokens on underscores and case
/// boundaries: `parseHTTPResponse` becomes `parse`, `http`, `response`.
fn split_subtokens(identifier: &str, out: &mut Vec<String>) {
    for part in identifier.split(|c: char| c == '_' || !c.is_ascii_alphanumeric()) {
        if part.is_empty() {
            continue;
        }
        let bytes = part.as_bytes();
        let mut start = 0;
        for i in 1..bytes.len() {
            let prev = bytes[i - 1] as char;
            let cur = bytes[i] as char;
            let next_lower = bytes.get(i + 1).is_some_and(|b| (*b as char).is_lowercase());
            let boundary = (prev.is_lowercase() || prev.is_ascii_digit()) && cur.is_uppercase()
                || prev.is_uppercase() && cur.is_uppercase() && next_lower;
            if boundary {
                out.push(part[start..i].to_lowercase());
                start = i;
            }
        }
        out.push(part[start..].to_lowercase());
    }
}

/// Bag of lowercase terms for one code unit: identifier and keyword
/// subtokens plus word runs from strings and comments. This is exactly the
/// literal channel; operators and punctuation carry no lexical signal.
fn code_terms(record: &DatasetRecord) -> Vec<String> {
    let profile = load_profile(record.language);
    let mut terms = Vec::new();
    match tokenize(&record.code, profile) {
        Ok(stream) => {
            for token in &stream.tokens {
                match token.kind {
                    TokenKind::Identifier | TokenKind::Keyword => {
                        split_subtokens(&token.text, &mut terms)
                    }
                    TokenKind::StringLiteral | TokenKind::Comment => {
                        split_subtokens(&token.text, &mut terms)
                    }
                    TokenKind::NumericLiteral => terms.push(token.text.to_lowercase()),
                    _ => {}
                }
            }
        }
        // Unlexable code still participates through a plain word split.
        Err(_) => split_subtokens(&record.code, &mut terms),
    }
    terms
}

fn docstring_terms(docstring: &str) -> Vec<String> {
    let mut terms = Vec::new();
    split_subtokens(docstring, &mut terms);
    terms
}

fn term_counts(terms: Vec<String>) -> HashMap<String, f64> {
    let mut counts: HashMap<String, f64> = HashMap::new();
    for term in terms {
        *counts.entry(term).or_insert(0.0) += 1.0;
    }
    counts
}

/// Rank each record's docstring against its own code plus seeded
/// distractors using tf-idf cosine similarity over code terms.
///
/// Ties break by ascending record id, which keeps zero-overlap pools at
/// exact chance level.
pub fn search_eval(
    records: &[DatasetRecord],
    candidates_per_query: usize,
    seed: u64,
) -> Result<(SearchSummary, Vec<SearchResult>)> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let candidates_per_query = candidates_per_query.clamp(1, records.len());

    let docs: Vec<HashMap<String, f64>> = records
        .iter()
        .map(|r| term_counts(code_terms(r)))
        .collect();

    // Document frequencies over the whole pool.
    let mut df: HashMap<&str, f64> = HashMap::new();
    for doc in &docs {
        for term in doc.keys() {
            *df.entry(term.as_str()).or_insert(0.0) += 1.0;
        }
    }
    let n = records.len() as f64;
    let idf = |term: &str| ((n + 1.0) / (df.get(term).copied().unwrap_or(0.0) + 1.0)).ln() + 1.0;

    let doc_norms: Vec<f64> = docs
        .iter()
        .map(|doc| {
            doc.iter()
                .map(|(t, tf)| (tf * idf(t)).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();

    let mut results = Vec::new();
    let mut excluded = 0usize;
    for (qi, record) in records.iter().enumerate() {
        let Some(docstring) = record.docstring.as_deref().filter(|d| !d.trim().is_empty()) else {
            excluded += 1;
            continue;
        };
        let query = term_counts(docstring_terms(docstring));

        // Candidate pool: own code plus seeded distinct distractors.
        let mut rng = ChaCha8Rng::from_seed(derive_seed(seed, &["search", &record.id]));
        let mut others: Vec<usize> = (0..records.len()).filter(|&i| i != qi).collect();
        others.shuffle(&mut rng);
        let mut pool: Vec<usize> = vec![qi];
        pool.extend(others.into_iter().take(candidates_per_query - 1));

        let mut scored: Vec<(usize, f64)> = pool
            .iter()
            .map(|&di| {
                let dot: f64 = query
                    .iter()
                    .map(|(term, qtf)| {
                        let w = idf(term);
                        docs[di].get(term).map_or(0.0, |dtf| (qtf * w) * (dtf * w))
                    })
                    .sum();
                let score = if doc_norms[di] > 0.0 { dot / doc_norms[di] } else { 0.0 };
                (di, score)
            })
            .collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| records[a.0].id.cmp(&records[b.0].id))
        });

        let rank = scored.iter().position(|&(di, _)| di == qi).unwrap() + 1;
        results.push(SearchResult {
            query_id: record.id.clone(),
            ranked_ids: scored.iter().map(|&(di, _)| records[di].id.clone()).collect(),
            accuracy_at_1: if rank == 1 { 1.0 } else { 0.0 },
            reciprocal_rank: 1.0 / rank as f64,
        });
    }

    if results.is_empty() {
        return Err(Error::DegenerateCloneCorpus("no record has a docstring".into()));
    }
    let q = results.len() as f64;
    let summary = SearchSummary {
        accuracy_at_1: results.iter().map(|r| r.accuracy_at_1).sum::<f64>() / q,
        mrr: results.iter().map(|r| r.reciprocal_rank).sum::<f64>() / q,
        queries: results.len(),
        excluded,
        candidates_per_query,
    };
    Ok((summary, results))
}

// ---------------------------------------------------------------------------
// Clone detection
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CloneBackend {
    /// Jaccard over raw token-text multisets; sees identifier spellings.
    LiteralTokens,
    /// Jaccard over structural fingerprints; blind to renames.
    StructuralFingerprint,
}

impl CloneBackend {
    pub fn as_str(self) -> &'static str {
        match self {
            CloneBackend::LiteralTokens => "literal",
            CloneBackend::StructuralFingerprint => "structural",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloneVerdict {
    pub pair: (String, String),
    pub similarity: f64,
    pub predicted: bool,
    pub actual: bool,
    pub backend: CloneBackend,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloneEval {
    pub backend: CloneBackend,
    pub threshold: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub positives: usize,
    pub negatives: usize,
    #[serde(skip)]
    pub verdicts: Vec<CloneVerdict>,
}

/// Score within-group pairs as positives against an equal-sized seeded
/// sample of cross-group pairs.
pub fn clone_eval(
    records: &[DatasetRecord],
    backend: CloneBackend,
    threshold: f64,
    seed: u64,
) -> Result<CloneEval> {
    let mut groups: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, record) in records.iter().enumerate() {
        if let Some(group) = record.clone_group.as_deref() {
            groups.entry(group).or_default().push(i);
        }
    }

    let mut positives: Vec<(usize, usize)> = Vec::new();
    let mut grouped: Vec<(&str, &Vec<usize>)> = groups.iter().map(|(k, v)| (*k, v)).collect();
    grouped.sort_by_key(|(k, _)| *k);
    for (_, members) in &grouped {
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                positives.push((members[i], members[j]));
            }
        }
    }
    if positives.is_empty() {
        return Err(Error::DegenerateCloneCorpus("no within-group pair".into()));
    }

    // Seeded cross-group negatives, deduplicated, equal in count to the
    // positives when enough exist.
    let labeled: Vec<usize> = grouped.iter().flat_map(|(_, m)| m.iter().copied()).collect();
    let group_of: HashMap<usize, &str> = grouped
        .iter()
        .flat_map(|(g, m)| m.iter().map(move |&i| (i, *g)))
        .collect();
    let mut rng = ChaCha8Rng::from_seed(derive_seed(seed, &["clone-negatives"]));
    let mut negatives: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut attempts = 0usize;
    let max_attempts = positives.len().saturating_mul(200).max(10_000);
    while negatives.len() < positives.len() && attempts < max_attempts {
        attempts += 1;
        let a = labeled[rng.gen_range(0..labeled.len())];
        let b = labeled[rng.gen_range(0..labeled.len())];
        if group_of[&a] == group_of[&b] {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            negatives.push(key);
        }
    }
    if negatives.is_empty() {
        return Err(Error::DegenerateCloneCorpus("no cross-group pair".into()));
    }

    // Pairwise features, computed once per record. Unlexable records drop
    // their pairs.
    let mut fingerprints: Vec<Option<Fingerprint>> = Vec::new();
    let mut literals: Vec<Option<HashMap<String, u32>>> = Vec::new();
    for record in records {
        match backend {
            CloneBackend::StructuralFingerprint => {
                fingerprints.push(fingerprint_record(record, DEFAULT_GRAM_LEN).ok());
                literals.push(None);
            }
            CloneBackend::LiteralTokens => {
                literals.push(literal_counts(record).ok());
                fingerprints.push(None);
            }
        }
    }

    let similarity = |a: usize, b: usize| -> Option<f64> {
        match backend {
            CloneBackend::StructuralFingerprint => {
                Some(fingerprints[a].as_ref()?.jaccard(fingerprints[b].as_ref()?))
            }
            CloneBackend::LiteralTokens => {
                Some(multiset_jaccard(literals[a].as_ref()?, literals[b].as_ref()?))
            }
        }
    };

    let mut verdicts = Vec::with_capacity(positives.len() + negatives.len());
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut tn = 0usize;
    let mut fn_ = 0usize;
    for (&(a, b), actual) in positives
        .iter()
        .map(|p| (p, true))
        .chain(negatives.iter().map(|p| (p, false)))
    {
        let Some(sim) = similarity(a, b) else { continue };
        let predicted = sim >= threshold;
        match (predicted, actual) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
        verdicts.push(CloneVerdict {
            pair: (records[a].id.clone(), records[b].id.clone()),
            similarity: sim,
            predicted,
            actual,
            backend,
        });
    }

    let total = (tp + fp + tn + fn_) as f64;
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(CloneEval {
        backend,
        threshold,
        accuracy: if total > 0.0 { (tp + tn) as f64 / total } else { 0.0 },
        precision,
        recall,
        f1,
        positives: positives.len(),
        negatives: negatives.len(),
        verdicts,
    })
}

/// One row of a metric report file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricRow {
    pub variant_tag: String,
    pub metric: String,
    pub value: f64,
    pub n: usize,
}

/// Write metric rows as a JSON report file.
pub fn write_metric_report(path: &std::path::Path, rows: &[MetricRow]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, rows).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    use std::io::Write as _;
    file.write_all(b"\n")?;
    Ok(())
}

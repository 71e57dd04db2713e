//! Rename planning and application for one unit, and the eight-variant
//! dataset generation that crosses four target sets with the random and
//! meaningful naming strategies.
//!
//! Formatting is never touched: only identifier token texts change, so the
//! output differs from the input in exactly the renamed occurrences.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::binder::{classify_identifiers, IdentifierClass, IdentifierTable};
use crate::corpus::DatasetRecord;
use crate::error::{Error, Result};
use crate::hash::fnv1a64;
use crate::lexer::{TokenKind, TokenStream};
use crate::naming::{
    meaningful_name, random_name, sequential_name, unit_reserved, NamingScheme, SeededGenerator,
    Vocabulary,
};
use crate::profile::{load_profile, LanguageProfile};

/// One dataset variant: which identifier classes to rename, with which
/// naming scheme, under which corpus seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnonymizationSpec {
    pub targets: BTreeSet<IdentifierClass>,
    pub scheme: NamingScheme,
    pub seed: u64,
}

impl AnonymizationSpec {
    pub fn new<I>(targets: I, scheme: NamingScheme, seed: u64) -> Self
    where
        I: IntoIterator<Item = IdentifierClass>,
    {
        let targets: BTreeSet<IdentifierClass> = targets
            .into_iter()
            .filter(|c| c.is_renameable())
            .collect();
        Self { targets, scheme, seed }
    }

    pub fn identity(seed: u64) -> Self {
        Self::new([], NamingScheme::Sequential, seed)
    }

    /// Variant tag. The eight canonical combinations use the fixed tags
    /// `var.rand` ... `all.mean`; anything else derives a tag from its
    /// parts.
    pub fn variant_tag(&self) -> String {
        if self.targets.is_empty() {
            return "identity".to_string();
        }
        let all = self.targets.len() == IdentifierClass::RENAMEABLE.len();
        let target_part = if all {
            "all".to_string()
        } else {
            self.targets
                .iter()
                .map(|c| match c {
                    IdentifierClass::Variable => "var",
                    IdentifierClass::MethodDefinition => "mdef",
                    IdentifierClass::MethodInvocation => "minv",
                    IdentifierClass::Protected => unreachable!("filtered at construction"),
                })
                .collect::<Vec<_>>()
                .join("+")
        };
        format!("{}.{}", target_part, self.scheme.as_str())
    }

    /// Stable digest of (targets, scheme, seed), recorded in transform
    /// annotations and stats.
    pub fn digest(&self) -> String {
        let key = format!("{}#{}", self.variant_tag(), self.seed);
        format!("{:016x}", fnv1a64(key.as_bytes()))
    }
}

/// The eight dataset variants: {variable, method definition, method
/// invocation, all three} x {random, meaningful}, in tag order.
pub fn canonical_variants(seed: u64) -> Vec<AnonymizationSpec> {
    use IdentifierClass::*;
    let target_sets: [Vec<IdentifierClass>; 4] = [
        vec![Variable],
        vec![MethodDefinition],
        vec![MethodInvocation],
        vec![Variable, MethodDefinition, MethodInvocation],
    ];
    let mut specs = Vec::with_capacity(8);
    for targets in target_sets {
        for scheme in [NamingScheme::Random, NamingScheme::Meaningful] {
            specs.push(AnonymizationSpec::new(targets.clone(), scheme, seed));
        }
    }
    specs
}

/// Canonical variant tags, in generation order.
pub fn canonical_tags() -> [&'static str; 8] {
    [
        "var.rand", "var.mean", "mdef.rand", "mdef.mean", "minv.rand", "minv.mean", "all.rand",
        "all.mean",
    ]
}

/// Injective old-name to new-name mapping for one unit, in first-occurrence
/// order.
#[derive(Debug, Clone, Default)]
pub struct RenameMap {
    pairs: Vec<(String, String)>,
    index: HashMap<String, usize>,
}

impl RenameMap {
    pub fn get(&self, old: &str) -> Option<&str> {
        self.index.get(old).map(|&i| self.pairs[i].1.as_str())
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn insert(&mut self, old: String, new: String) {
        debug_assert!(!self.index.contains_key(&old));
        self.index.insert(old.clone(), self.pairs.len());
        self.pairs.push((old, new));
    }

    /// No two old names map to the same new name.
    pub fn is_injective(&self) -> bool {
        let values: std::collections::HashSet<&str> =
            self.pairs.iter().map(|(_, n)| n.as_str()).collect();
        values.len() == self.pairs.len()
    }
}

/// A planned rename map plus bookkeeping the stats report needs.
#[derive(Debug, Clone, Default)]
pub struct RenamePlan {
    pub map: RenameMap,
    pub renames_by_class: HashMap<IdentifierClass, u64>,
    /// Meaningful draws that had to fall back to random names.
    pub random_fallbacks: u64,
}

/// Assign one fresh name to every symbol whose class is targeted.
///
/// Fresh means: not a keyword or builtin of the unit's language, not any
/// identifier the unit already contains, and not a name issued earlier for
/// this unit. Symbols outside the targets and protected symbols are absent
/// from the map.
pub fn plan_renames(
    table: &IdentifierTable,
    spec: &AnonymizationSpec,
    gen: &mut SeededGenerator,
    vocab: Option<&Vocabulary>,
    profile: &LanguageProfile,
) -> Result<RenamePlan> {
    if spec.scheme == NamingScheme::Meaningful && vocab.is_none() {
        return Err(Error::MissingVocabulary);
    }
    let mut plan = RenamePlan::default();
    if spec.targets.is_empty() {
        return Ok(plan);
    }

    let mut reserved = unit_reserved(profile, table.symbols().iter().map(|s| s.name.clone()));
    let mut var_counter = 0u64;
    let mut fun_counter = 0u64;

    for symbol in table.symbols() {
        if !spec.targets.contains(&symbol.class) || !symbol.class.is_renameable() {
            continue;
        }
        let fresh = match spec.scheme {
            NamingScheme::Sequential => {
                let counter = match symbol.class {
                    IdentifierClass::Variable => &mut var_counter,
                    _ => &mut fun_counter,
                };
                loop {
                    *counter += 1;
                    let candidate = sequential_name(symbol.class, *counter)?;
                    if !reserved.contains(&candidate) {
                        break candidate;
                    }
                }
            }
            NamingScheme::Random => random_name(gen, &reserved),
            NamingScheme::Meaningful => {
                let draw = meaningful_name(vocab.unwrap(), symbol.class, gen, &reserved);
                if draw.random_fallback {
                    plan.random_fallbacks += 1;
                }
                draw.name
            }
        };
        reserved.insert(fresh.clone());
        *plan.renames_by_class.entry(symbol.class).or_insert(0) += 1;
        plan.map.insert(symbol.name.clone(), fresh);
    }
    Ok(plan)
}

/// Rewrite the stream's identifier tokens through `map`. Every other token
/// (whitespace, comments, strings, operators) is emitted byte-identically.
pub fn apply_renames(stream: &TokenStream, map: &RenameMap) -> String {
    let mut out = String::with_capacity(stream.source.len());
    for token in &stream.tokens {
        match map.get(&token.text) {
            Some(new) if token.kind == TokenKind::Identifier => out.push_str(new),
            _ => out.push_str(&token.text),
        }
    }
    out
}

/// Annotation attached to transformed records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformNote {
    pub variant: String,
    pub spec_digest: String,
    pub renames: u64,
}

/// Result of transforming one record.
#[derive(Debug, Clone)]
pub struct TransformOutcome {
    pub record: DatasetRecord,
    /// True when the record failed to lex and was passed through unchanged.
    pub skipped: bool,
    pub renames_by_class: HashMap<IdentifierClass, u64>,
    pub random_fallbacks: u64,
}

fn pass_through(record: &DatasetRecord) -> TransformOutcome {
    TransformOutcome {
        record: record.clone(),
        skipped: true,
        renames_by_class: HashMap::new(),
        random_fallbacks: 0,
    }
}

fn apply_plan(
    record: &DatasetRecord,
    stream: &TokenStream,
    plan: RenamePlan,
    spec: &AnonymizationSpec,
) -> TransformOutcome {
    let mut out = record.clone();
    out.code = apply_renames(stream, &plan.map);
    if !spec.targets.is_empty() {
        out.transform = Some(TransformNote {
            variant: spec.variant_tag(),
            spec_digest: spec.digest(),
            renames: plan.map.len() as u64,
        });
    }
    TransformOutcome {
        record: out,
        skipped: false,
        renames_by_class: plan.renames_by_class,
        random_fallbacks: plan.random_fallbacks,
    }
}

/// Transform one record under one spec. Records that fail to lex pass
/// through unchanged and are marked skipped; docstrings and clone labels are
/// never touched.
pub fn transform_unit(
    record: &DatasetRecord,
    spec: &AnonymizationSpec,
    vocab: Option<&Vocabulary>,
) -> Result<TransformOutcome> {
    let profile = load_profile(record.language);
    let stream = match crate::lexer::tokenize(&record.code, profile) {
        Ok(stream) => stream,
        Err(Error::Lex { .. }) => return Ok(pass_through(record)),
        Err(other) => return Err(other),
    };
    let table = classify_identifiers(&stream, profile);
    let mut gen = SeededGenerator::new(spec.seed, &record.id, &spec.variant_tag());
    let plan = plan_renames(&table, spec, &mut gen, vocab, profile)?;
    Ok(apply_plan(record, &stream, plan, spec))
}

/// Transform one record under several specs, reusing a single lex+classify
/// pass across all rename plans. This is what the corpus driver calls per
/// record. Each spec carries its own seed.
pub fn transform_units_shared(
    record: &DatasetRecord,
    specs: &[AnonymizationSpec],
    vocab: &Vocabulary,
) -> Result<Vec<TransformOutcome>> {
    let profile = load_profile(record.language);
    let stream = match crate::lexer::tokenize(&record.code, profile) {
        Ok(stream) => stream,
        Err(Error::Lex { .. }) => {
            return Ok(specs.iter().map(|_| pass_through(record)).collect());
        }
        Err(other) => return Err(other),
    };
    let table = classify_identifiers(&stream, profile);
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut gen = SeededGenerator::new(spec.seed, &record.id, &spec.variant_tag());
        let plan = plan_renames(&table, spec, &mut gen, Some(vocab), profile)?;
        out.push(apply_plan(record, &stream, plan, spec));
    }
    Ok(out)
}

/// Produce the eight canonical variants of one record.
pub fn generate_variants(
    record: &DatasetRecord,
    seed: u64,
    vocab: &Vocabulary,
) -> Result<Vec<(String, TransformOutcome)>> {
    let specs = canonical_variants(seed);
    let outcomes = transform_units_shared(record, &specs, vocab)?;
    Ok(specs
        .iter()
        .map(|spec| spec.variant_tag())
        .zip(outcomes)
        .collect())
}

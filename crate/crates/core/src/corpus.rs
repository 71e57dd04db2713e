//! Line-delimited corpus I/O and the corpus-wide transform driver.
//!
//! Records stream through in file order with constant memory in corpus
//! length (the only per-record state kept is an 8-byte id hash for
//! duplicate detection). The driver fans record chunks out to a worker
//! pool; per-record sub-seeding keeps results independent of worker count,
//! and writes are serialized by input index so output order always matches
//! input order.
//!
//! Pass-through lines (unsupported language, lex failure, identity
//! transform, language-filter miss) are emitted as the original raw bytes,
//! so untouched records round-trip byte-for-byte no matter how the input
//! was formatted.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binder::IdentifierClass;
use crate::error::{Error, Result};
use crate::hash::{fnv1a64, StreamDigest};
use crate::naming::Vocabulary;
use crate::profile::LanguageId;
use crate::transform::{transform_units_shared, AnonymizationSpec, TransformNote};

/// One function/method sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    /// Stable unique key within a corpus file.
    pub id: String,
    pub language: LanguageId,
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub docstring: Option<String>,
    /// Records sharing a group are clone-positive pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clone_group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformNote>,
}

/// Wire form kept permissive so unsupported languages surface as skips, not
/// parse failures.
#[derive(Debug, Deserialize)]
struct WireRecord {
    id: String,
    language: String,
    code: String,
    #[serde(default)]
    docstring: Option<String>,
    #[serde(default)]
    clone_group: Option<String>,
    #[serde(default)]
    transform: Option<TransformNote>,
}

#[derive(Debug, Clone)]
pub enum ParseOutcome {
    Supported(DatasetRecord),
    UnsupportedLanguage { id: String, language: String },
}

/// One line of a corpus file: parse outcome plus the raw bytes for
/// pass-through writing.
#[derive(Debug, Clone)]
pub struct CorpusLine {
    pub line_no: usize,
    pub raw: String,
    pub outcome: ParseOutcome,
}

/// Streaming reader over a line-delimited record file. Yields lines in file
/// order; memory use does not grow with record size beyond the duplicate-id
/// hash set.
pub struct RecordReader {
    reader: BufReader<File>,
    line_no: usize,
    seen_ids: HashSet<u64>,
}

impl RecordReader {
    pub fn open(path: &Path) -> Result<Self> {
        Ok(Self {
            reader: BufReader::new(File::open(path)?),
            line_no: 0,
            seen_ids: HashSet::new(),
        })
    }

    fn parse_line(&mut self, raw: &str) -> Result<CorpusLine> {
        let wire: WireRecord = serde_json::from_str(raw).map_err(|e| Error::MalformedRecord {
            line: self.line_no,
            reason: e.to_string(),
        })?;
        if !self.seen_ids.insert(fnv1a64(wire.id.as_bytes())) {
            return Err(Error::DuplicateId {
                id: wire.id,
                line: self.line_no,
            });
        }
        let outcome = match wire.language.parse::<LanguageId>() {
            Ok(language) => ParseOutcome::Supported(DatasetRecord {
                id: wire.id,
                language,
                code: wire.code,
                docstring: wire.docstring,
                clone_group: wire.clone_group,
                transform: wire.transform,
            }),
            Err(_) => ParseOutcome::UnsupportedLanguage {
                id: wire.id,
                language: wire.language,
            },
        };
        Ok(CorpusLine {
            line_no: self.line_no,
            raw: raw.to_string(),
            outcome,
        })
    }
}

impl Iterator for RecordReader {
    type Item = Result<CorpusLine>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = String::new();
        match self.reader.read_line(&mut buf) {
            Ok(0) => None,
            Ok(_) => {
                self.line_no += 1;
                let raw = buf.trim_end_matches('\n').trim_end_matches('\r');
                if raw.is_empty() {
                    return Some(Err(Error::MalformedRecord {
                        line: self.line_no,
                        reason: "empty line".into(),
                    }));
                }
                Some(self.parse_line(raw))
            }
            Err(e) => Some(Err(e.into())),
        }
    }
}

/// Open a streaming reader over `path`.
pub fn read_records(path: &Path) -> Result<RecordReader> {
    RecordReader::open(path)
}

/// Load a whole corpus strictly: malformed lines, duplicate ids, and
/// unsupported languages are all errors. Evaluation entry points use this.
pub fn load_records(path: &Path) -> Result<Vec<DatasetRecord>> {
    let mut records = Vec::new();
    for line in read_records(path)? {
        let line = line?;
        match line.outcome {
            ParseOutcome::Supported(record) => records.push(record),
            ParseOutcome::UnsupportedLanguage { language, .. } => {
                return Err(Error::UnsupportedLanguage(language));
            }
        }
    }
    Ok(records)
}

/// Serialize one record as a JSONL line (no trailing newline).
pub fn record_to_line(record: &DatasetRecord) -> String {
    serde_json::to_string(record).expect("record serialization is infallible")
}

/// Per-variant statistics for one transform run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsReport {
    pub variant_tag: String,
    pub seed: u64,
    pub records_total: u64,
    pub records_skipped: u64,
    pub renames_by_class: BTreeMap<IdentifierClass, u64>,
    pub vocabulary_fallback_used: bool,
    /// 64-bit content hash of the emitted variant file, hex-encoded.
    pub corpus_digest: String,
}

/// Harvest a meaningful-name vocabulary from a corpus file, streaming one
/// record at a time.
pub fn harvest_vocabulary(path: &Path) -> Result<Vocabulary> {
    let mut builder = crate::naming::VocabularyBuilder::new();
    for line in read_records(path)? {
        if let ParseOutcome::Supported(record) = line?.outcome {
            builder.add_unit(record.language, &record.code);
        }
    }
    Ok(builder.build(&path.display().to_string()))
}

struct VariantSink {
    writer: BufWriter<File>,
    digest: StreamDigest,
    skipped: u64,
    renames_by_class: BTreeMap<IdentifierClass, u64>,
    random_fallbacks: u64,
}

struct SpecOut {
    line: String,
    skipped: bool,
    renames_by_class: HashMap<IdentifierClass, u64>,
    random_fallbacks: u64,
}

const CHUNK_SIZE: usize = 128;

/// Transform a corpus file under each spec, writing one output file and one
/// stats file per variant into `output_dir`.
///
/// Output files are named `<input-stem>.<variant-tag>.jsonl`, record order
/// matches input order, and results are identical for any `workers` value.
/// I/O failures abort and remove partial outputs; per-record lexing
/// failures only increment skip counts.
pub fn transform_corpus(
    input: &Path,
    output_dir: &Path,
    specs: &[AnonymizationSpec],
    seed: u64,
    workers: usize,
    vocab: &Vocabulary,
    language_filter: Option<LanguageId>,
) -> Result<Vec<StatsReport>> {
    std::fs::create_dir_all(output_dir)?;
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());

    let variant_paths: Vec<PathBuf> = specs
        .iter()
        .map(|spec| output_dir.join(format!("{stem}.{}.jsonl", spec.variant_tag())))
        .collect();
    let stats_paths: Vec<PathBuf> = specs
        .iter()
        .map(|spec| output_dir.join(format!("{stem}.{}.stats.json", spec.variant_tag())))
        .collect();

    let run = || -> Result<Vec<StatsReport>> {
        let mut sinks = Vec::with_capacity(specs.len());
        for path in &variant_paths {
            let file = File::create(path)?;
            sinks.push(VariantSink {
                writer: BufWriter::new(file),
                digest: StreamDigest::new(),
                skipped: 0,
                renames_by_class: BTreeMap::new(),
                random_fallbacks: 0,
            });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;

        let records_total = drive(input, specs, vocab, language_filter, &mut sinks, &pool)?;

        let mut reports = Vec::with_capacity(specs.len());
        for (spec, mut sink) in specs.iter().zip(sinks) {
            sink.writer.flush()?;
            reports.push(StatsReport {
                variant_tag: spec.variant_tag(),
                seed,
                records_total,
                records_skipped: sink.skipped,
                renames_by_class: sink.renames_by_class,
                vocabulary_fallback_used: vocab.fallback_used || sink.random_fallbacks > 0,
                corpus_digest: format!("{:016x}", sink.digest.finish()),
            });
        }
        for (report, path) in reports.iter().zip(&stats_paths) {
            let mut file = File::create(path)?;
            serde_json::to_writer_pretty(&mut file, report)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            file.write_all(b"\n")?;
        }
        Ok(reports)
    };

    run().inspect_err(|_| {
        // Partial-output cleanup, best effort.
        for path in variant_paths.iter().chain(&stats_paths) {
            let _ = std::fs::remove_file(path);
        }
    })
}

fn drive(
    input: &Path,
    specs: &[AnonymizationSpec],
    vocab: &Vocabulary,
    language_filter: Option<LanguageId>,
    sinks: &mut [VariantSink],
    pool: &rayon::ThreadPool,
) -> Result<u64> {
    let mut reader = read_records(input)?;
    let mut records_total = 0u64;
    loop {
        let mut chunk = Vec::with_capacity(CHUNK_SIZE);
        for line in reader.by_ref().take(CHUNK_SIZE) {
            chunk.push(line?);
        }
        if chunk.is_empty() {
            break;
        }
        records_total += chunk.len() as u64;

        let processed: Result<Vec<Vec<SpecOut>>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|line| process_line(line, specs, vocab, language_filter))
                .collect()
        });

        for outputs in processed? {
            for (sink, out) in sinks.iter_mut().zip(outputs) {
                sink.writer.write_all(out.line.as_bytes())?;
                sink.writer.write_all(b"\n")?;
                sink.digest.update(out.line.as_bytes());
                sink.digest.update(b"\n");
                if out.skipped {
                    sink.skipped += 1;
                }
                for (class, count) in out.renames_by_class {
                    *sink.renames_by_class.entry(class).or_insert(0) += count;
                }
                sink.random_fallbacks += out.random_fallbacks;
            }
        }
    }
    Ok(records_total)
}

fn process_line(
    line: &CorpusLine,
    specs: &[AnonymizationSpec],
    vocab: &Vocabulary,
    language_filter: Option<LanguageId>,
) -> Result<Vec<SpecOut>> {
    let pass_through_all = || {
        specs
            .iter()
            .map(|_| SpecOut {
                line: line.raw.clone(),
                skipped: true,
                renames_by_class: HashMap::new(),
                random_fallbacks: 0,
            })
            .collect()
    };

    let record = match &line.outcome {
        ParseOutcome::Supported(record) => record,
        ParseOutcome::UnsupportedLanguage { .. } => return Ok(pass_through_all()),
    };
    if language_filter.is_some_and(|lang| record.language != lang) {
        return Ok(pass_through_all());
    }

    let outcomes = transform_units_shared(record, specs, vocab)?;
    Ok(outcomes
        .into_iter()
        .zip(specs)
        .map(|(outcome, spec)| {
            // Untouched records keep their raw input bytes.
            let untouched = outcome.skipped || spec.targets.is_empty();
            SpecOut {
                line: if untouched {
                    line.raw.clone()
                } else {
                    record_to_line(&outcome.record)
                },
                skipped: outcome.skipped,
                renames_by_class: outcome.renames_by_class,
                random_fallbacks: outcome.random_fallbacks,
            }
        })
        .collect())
}

//! `codemask` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. All randomness flows
//! from `--seed` (or the `ANON_SEED` environment variable), never from the
//! clock, so identical command lines produce identical output files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use codemask_core::binder::IdentifierClass;
use codemask_core::corpus::{self, ParseOutcome};
use codemask_core::eval::{self, CloneBackend, MetricRow};
use codemask_core::golden;
use codemask_core::naming::{NamingScheme, Vocabulary};
use codemask_core::profile::LanguageId;
use codemask_core::transform::{canonical_tags, canonical_variants, AnonymizationSpec};
use codemask_core::{DatasetRecord, StatsReport};

#[derive(Parser)]
#[command(
    name = "codemask",
    version,
    about = "Anonymize user-defined names in source-code corpora and measure what that does to literal vs. structural code similarity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a corpus into anonymized dataset variants
    Transform(TransformArgs),
    /// Summarize a corpus file (languages, docstrings, clone groups)
    Stats(StatsArgs),
    /// Docstring-to-code search evaluation over a corpus and its variants
    EvalSearch(EvalSearchArgs),
    /// Clone-detection evaluation over a corpus and its variants
    EvalClone(EvalCloneArgs),
    /// Reproduce the pinned rename fixture and verify it byte-for-byte
    GoldenCheck,
}

#[derive(Args)]
struct TransformArgs {
    /// Input corpus (JSONL, one record per line)
    #[arg(long)]
    input: PathBuf,
    /// Output directory for variant and stats files
    #[arg(long = "out")]
    output_dir: PathBuf,
    /// Variant selector: `all8`, a full tag like `var.rand`, or a target
    /// set (`var`, `mdef`, `minv`, `all`) combined with --scheme
    #[arg(long, default_value = "all8")]
    targets: String,
    /// Naming scheme for a bare target set: rand, mean, or seq
    #[arg(long)]
    scheme: Option<SchemeArg>,
    /// Corpus seed; every generated name derives from it
    #[arg(long, env = "ANON_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the logical CPU count)
    #[arg(long)]
    workers: Option<usize>,
    /// Only transform records of this language; others pass through
    #[arg(long)]
    language: Option<String>,
    /// Corpus to harvest the meaningful-name vocabulary from
    /// (defaults to the input corpus)
    #[arg(long)]
    vocab_source: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct EvalSearchArgs {
    /// Original corpus (records need docstrings)
    #[arg(long)]
    input: PathBuf,
    /// Directory holding `<stem>.<tag>.jsonl` variant files
    #[arg(long)]
    variants_dir: Option<PathBuf>,
    /// Candidates ranked per query (the query's own code plus distractors)
    #[arg(long, default_value_t = 100)]
    candidates: usize,
    #[arg(long, env = "ANON_SEED", default_value_t = 0)]
    seed: u64,
    /// Where to write the metric report (defaults to the variants dir)
    #[arg(long = "out")]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EvalCloneArgs {
    /// Original corpus (records need clone_group labels)
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    variants_dir: Option<PathBuf>,
    /// Similarity backend to score with
    #[arg(long, value_enum, default_value_t = BackendArg::Both)]
    backend: BackendArg,
    /// Similarity threshold for predicting a pair as a clone
    #[arg(long, default_value_t = eval::DEFAULT_CLONE_THRESHOLD)]
    threshold: f64,
    #[arg(long, env = "ANON_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long = "out")]
    output_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Rand,
    Mean,
    Seq,
}

impl From<SchemeArg> for NamingScheme {
    fn from(value: SchemeArg) -> Self {
        match value {
            SchemeArg::Rand => NamingScheme::Random,
            SchemeArg::Mean => NamingScheme::Meaningful,
            SchemeArg::Seq => NamingScheme::Sequential,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum BackendArg {
    Literal,
    Structural,
    Both,
}

enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<codemask_core::Error> for CliError {
    fn from(e: codemask_core::Error) -> Self {
        CliError::Data(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `codemask --help` for usage");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Transform(args) => cmd_transform(args),
        Command::Stats(args) => cmd_stats(args),
        Command::EvalSearch(args) => cmd_eval_search(args),
        Command::EvalClone(args) => cmd_eval_clone(args),
        Command::GoldenCheck => cmd_golden_check(),
    }
}

fn parse_target_classes(name: &str) -> Option<Vec<IdentifierClass>> {
    use IdentifierClass::*;
    match name {
        "var" => Some(vec![Variable]),
        "mdef" => Some(vec![MethodDefinition]),
        "minv" => Some(vec![MethodInvocation]),
        "all" => Some(vec![Variable, MethodDefinition, MethodInvocation]),
        _ => None,
    }
}

/// Resolve the --targets/--scheme pair into concrete specs.
fn resolve_specs(
    targets: &str,
    scheme: Option<SchemeArg>,
    seed: u64,
) -> Result<Vec<AnonymizationSpec>, CliError> {
    if targets == "all8" {
        if scheme.is_some() {
            return Err(CliError::Usage(
                "--scheme cannot be combined with --targets all8 (the eight variants fix their schemes)".into(),
            ));
        }
        return Ok(canonical_variants(seed));
    }
    if let Some((target_part, scheme_part)) = targets.split_once('.') {
        if scheme.is_some() {
            return Err(CliError::Usage(format!(
                "--scheme cannot be combined with the full variant tag {targets:?}"
            )));
        }
        let classes = parse_target_classes(target_part).ok_or_else(|| {
            CliError::Usage(format!("unknown target set {target_part:?} in {targets:?}"))
        })?;
        let scheme = match scheme_part {
            "rand" => NamingScheme::Random,
            "mean" => NamingScheme::Meaningful,
            "seq" => NamingScheme::Sequential,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown scheme {other:?} in {targets:?}"
                )))
            }
        };
        return Ok(vec![AnonymizationSpec::new(classes, scheme, seed)]);
    }
    let classes = parse_target_classes(targets).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown --targets {targets:?}; expected all8, a tag like var.rand, or one of var/mdef/minv/all"
        ))
    })?;
    let scheme = scheme.map(NamingScheme::from).unwrap_or(NamingScheme::Random);
    Ok(vec![AnonymizationSpec::new(classes, scheme, seed)])
}

fn cmd_transform(args: TransformArgs) -> Result<(), CliError> {
    let specs = resolve_specs(&args.targets, args.scheme, args.seed)?;
    let language = args
        .language
        .as_deref()
        .map(|l| l.parse::<LanguageId>())
        .transpose()?;
    let workers = args.workers.unwrap_or_else(default_workers);

    let needs_vocab = specs.iter().any(|s| s.scheme == NamingScheme::Meaningful);
    let vocab = if needs_vocab {
        let source = args.vocab_source.as_deref().unwrap_or(&args.input);
        corpus::harvest_vocabulary(source)?
    } else {
        Vocabulary::curated_fallback()
    };

    let reports = corpus::transform_corpus(
        &args.input,
        &args.output_dir,
        &specs,
        args.seed,
        workers,
        &vocab,
        language,
    )?;
    print_transform_summary(&reports);
    Ok(())
}

fn print_transform_summary(reports: &[StatsReport]) {
    println!(
        "{:<12} {:>8} {:>8} {:>10} {:>10} {:>10} {:>9} {:>17}",
        "variant", "records", "skipped", "var", "mdef", "minv", "fallback", "digest"
    );
    for r in reports {
        let count = |c: IdentifierClass| r.renames_by_class.get(&c).copied().unwrap_or(0);
        println!(
            "{:<12} {:>8} {:>8} {:>10} {:>10} {:>10} {:>9} {:>17}",
            r.variant_tag,
            r.records_total,
            r.records_skipped,
            count(IdentifierClass::Variable),
            count(IdentifierClass::MethodDefinition),
            count(IdentifierClass::MethodInvocation),
            if r.vocabulary_fallback_used { "yes" } else { "no" },
            r.corpus_digest,
        );
    }
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let mut total = 0u64;
    let mut by_language: BTreeMap<String, u64> = BTreeMap::new();
    let mut unsupported = 0u64;
    let mut with_docstring = 0u64;
    let mut clone_groups: std::collections::HashSet<String> = std::collections::HashSet::new();
    let mut clone_members = 0u64;

    for line in corpus::read_records(&args.input)? {
        let line = line?;
        total += 1;
        match line.outcome {
            ParseOutcome::Supported(record) => {
                *by_language.entry(record.language.to_string()).or_insert(0) += 1;
                if record.docstring.as_deref().is_some_and(|d| !d.trim().is_empty()) {
                    with_docstring += 1;
                }
                if let Some(group) = record.clone_group {
                    clone_groups.insert(group);
                    clone_members += 1;
                }
            }
            ParseOutcome::UnsupportedLanguage { .. } => unsupported += 1,
        }
    }

    println!("records:        {total}");
    for (language, count) in &by_language {
        println!("  {language:<13} {count}");
    }
    if unsupported > 0 {
        println!("  unsupported   {unsupported}");
    }
    println!("with docstring: {with_docstring}");
    println!(
        "clone groups:   {} ({clone_members} member records)",
        clone_groups.len()
    );
    Ok(())
}

/// Variant files sitting next to the original: `<stem>.<tag>.jsonl`.
fn variant_path(input: &Path, variants_dir: &Path, tag: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    variants_dir.join(format!("{stem}.{tag}.jsonl"))
}

fn load_variants(
    input: &Path,
    variants_dir: &Path,
) -> Result<Vec<(String, Vec<DatasetRecord>)>, CliError> {
    let mut out = Vec::new();
    for tag in canonical_tags() {
        let path = variant_path(input, variants_dir, tag);
        if path.exists() {
            let records = corpus::load_records(&path)
                .with_context(|| format!("loading variant {}", path.display()))
                .map_err(CliError::Data)?;
            out.push((tag.to_string(), records));
        } else {
            eprintln!("note: variant file {} not found, skipping", path.display());
        }
    }
    Ok(out)
}

/// Render the metric comparison with one column per anonymization group,
/// one row per naming scheme.
fn print_comparison(metric: &str, original: f64, by_tag: &BTreeMap<String, f64>) {
    println!("\n{metric}");
    println!(
        "{:<12} {:>10} {:>14} {:>17} {:>17} {:>10}",
        "Scheme", "Original", "w/o Variable", "w/o Method Def.", "w/o Method Inv.", "All"
    );
    for (scheme_label, suffix) in [("Random", "rand"), ("Meaningful", "mean")] {
        let cell = |prefix: &str| {
            by_tag
                .get(&format!("{prefix}.{suffix}"))
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "{:<12} {:>10.4} {:>14} {:>17} {:>17} {:>10}",
            scheme_label,
            original,
            cell("var"),
            cell("mdef"),
            cell("minv"),
            cell("all"),
        );
    }
}

fn cmd_eval_search(args: EvalSearchArgs) -> Result<(), CliError> {
    let variants_dir = args
        .variants_dir
        .clone()
        .or_else(|| args.input.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let records = corpus::load_records(&args.input)?;
    let (orig, _) = eval::search_eval(&records, args.candidates, args.seed)?;

    let mut rows = vec![
        MetricRow {
            variant_tag: "original".into(),
            metric: "accuracy@1".into(),
            value: orig.accuracy_at_1,
            n: orig.queries,
        },
        MetricRow {
            variant_tag: "original".into(),
            metric: "mrr".into(),
            value: orig.mrr,
            n: orig.queries,
        },
    ];
    let mut acc_by_tag = BTreeMap::new();
    let mut mrr_by_tag = BTreeMap::new();
    for (tag, variant_records) in load_variants(&args.input, &variants_dir)? {
        let (summary, _) = eval::search_eval(&variant_records, args.candidates, args.seed)?;
        acc_by_tag.insert(tag.clone(), summary.accuracy_at_1);
        mrr_by_tag.insert(tag.clone(), summary.mrr);
        rows.push(MetricRow {
            variant_tag: tag.clone(),
            metric: "accuracy@1".into(),
            value: summary.accuracy_at_1,
            n: summary.queries,
        });
        rows.push(MetricRow {
            variant_tag: tag,
            metric: "mrr".into(),
            value: summary.mrr,
            n: summary.queries,
        });
    }

    println!(
        "code search over {} queries, {} candidates each",
        orig.queries, orig.candidates_per_query
    );
    print_comparison("accuracy@1", orig.accuracy_at_1, &acc_by_tag);
    print_comparison("mean reciprocal rank", orig.mrr, &mrr_by_tag);

    let out_dir = args.output_dir.unwrap_or(variants_dir);
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Data(e.into()))?;
    let report = out_dir.join(report_name(&args.input, "search"));
    eval::write_metric_report(&report, &rows)?;
    println!("\nreport written to {}", report.display());
    Ok(())
}

fn cmd_eval_clone(args: EvalCloneArgs) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&args.threshold) {
        return Err(CliError::Usage(format!(
            "--threshold must be in [0, 1], got {}",
            args.threshold
        )));
    }
    let variants_dir = args
        .variants_dir
        .clone()
        .or_else(|| args.input.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let records = corpus::load_records(&args.input)?;
    let backends: Vec<CloneBackend> = match args.backend {
        BackendArg::Literal => vec![CloneBackend::LiteralTokens],
        BackendArg::Structural => vec![CloneBackend::StructuralFingerprint],
        BackendArg::Both => vec![
            CloneBackend::LiteralTokens,
            CloneBackend::StructuralFingerprint,
        ],
    };

    let variants = load_variants(&args.input, &variants_dir)?;
    let mut rows = Vec::new();
    for backend in backends {
        let orig = eval::clone_eval(&records, backend, args.threshold, args.seed)?;
        let pairs = orig.positives + orig.negatives;
        for (metric, value) in [("f1", orig.f1), ("accuracy", orig.accuracy)] {
            rows.push(MetricRow {
                variant_tag: "original".into(),
                metric: format!("{}/{}", backend.as_str(), metric),
                value,
                n: pairs,
            });
        }
        let mut f1_by_tag = BTreeMap::new();
        let mut acc_by_tag = BTreeMap::new();
        for (tag, variant_records) in &variants {
            let summary = eval::clone_eval(variant_records, backend, args.threshold, args.seed)?;
            f1_by_tag.insert(tag.clone(), summary.f1);
            acc_by_tag.insert(tag.clone(), summary.accuracy);
            for (metric, value) in [("f1", summary.f1), ("accuracy", summary.accuracy)] {
                rows.push(MetricRow {
                    variant_tag: tag.clone(),
                    metric: format!("{}/{}", backend.as_str(), metric),
                    value,
                    n: pairs,
                });
            }
        }
        println!(
            "\nclone detection, {} backend, threshold {:.2}, {} positive / {} negative pairs",
            backend.as_str(),
            args.threshold,
            orig.positives,
            orig.negatives
        );
        print_comparison(&format!("{} F1", backend.as_str()), orig.f1, &f1_by_tag);
        print_comparison(
            &format!("{} accuracy", backend.as_str()),
            orig.accuracy,
            &acc_by_tag,
        );
    }

    let out_dir = args.output_dir.unwrap_or(variants_dir);
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Data(e.into()))?;
    let report = out_dir.join(report_name(&args.input, "clone"));
    eval::write_metric_report(&report, &rows)?;
    println!("\nreport written to {}", report.display());
    Ok(())
}

fn report_name(input: &Path, kind: &str) -> String {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    format!("{stem}.{kind}-report.json")
}

fn cmd_golden_check() -> Result<(), CliError> {
    let check = golden::run_golden_check();
    println!("rename table:");
    for (old, new) in &check.renames {
        println!("  {old} -> {new}");
    }
    if check.passed() {
        println!("golden-check: PASS");
        Ok(())
    } else {
        if !check.map_ok {
            eprintln!("golden-check: rename map mismatch");
        }
        if !check.output_ok {
            eprintln!("golden-check: output text mismatch");
            eprintln!("--- produced ---\n{}", check.output);
        }
        Err(CliError::Data(anyhow!("golden fixture reproduction failed")))
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

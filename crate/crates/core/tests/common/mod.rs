//! Deterministic synthetic corpora for the integration suites.
//!
//! Units are generated from per-language structural templates with seeded
//! identifier fills. Docstrings reuse the identifier words, so the literal
//! search channel is strong on original code and gone after renaming. Code
//! never embeds its docstring text, keeping search results honest.
#![allow(dead_code)] // each test binary uses its own subset

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use codemask_core::hash::derive_seed;
use codemask_core::profile::LanguageId;
use codemask_core::DatasetRecord;

const NOUNS: &[&str] = &[
    "total", "window", "price", "score", "margin", "bucket", "ledger", "packet", "tensor",
    "cursor", "signal", "budget", "volume", "weight", "sample", "metric", "column", "segment",
    "cluster", "lattice", "orbit", "basin", "ridge", "groove", "prism", "quartz", "meadow",
    "harbor", "tunnel", "beacon", "anchor", "summit", "canyon", "glacier", "magnet", "turbine",
    "piston", "valve", "rotor", "pylon",
];

const VERBS: &[&str] = &[
    "merge", "split", "scan", "blend", "fold", "trace", "probe", "shift", "rank", "glide",
    "stitch", "carve", "hoist", "spin", "weave", "prune", "sift", "mold", "forge", "graft",
];

const ADJS: &[&str] = &[
    "fast", "slow", "wide", "deep", "flat", "bold", "calm", "dense", "eager", "fuzzy", "grand",
    "humid", "inner", "jolly", "keen", "lean", "mild", "neat", "oval", "prime",
];

/// Identifier slots used by every template: one function name and four
/// value names.
#[derive(Debug, Clone)]
pub struct Fill {
    pub fn_name: String,
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    /// Invocation target: an externally defined helper.
    pub e: String,
    words: [String; 4],
}

fn camel(verb: &str, noun: &str) -> String {
    let mut s = verb.to_string();
    let mut chars = noun.chars();
    if let Some(first) = chars.next() {
        s.push(first.to_ascii_uppercase());
        s.extend(chars);
    }
    s
}

fn draw_fill(rng: &mut ChaCha8Rng, language: LanguageId) -> Fill {
    let verb = VERBS[rng.gen_range(0..VERBS.len())];
    let helper_verb = VERBS[rng.gen_range(0..VERBS.len())];
    let noun_ids: Vec<usize> = {
        let mut picked = Vec::new();
        while picked.len() < 4 {
            let i = rng.gen_range(0..NOUNS.len());
            if !picked.contains(&i) {
                picked.push(i);
            }
        }
        picked
    };
    let adj = ADJS[rng.gen_range(0..ADJS.len())];
    let nouns: Vec<&str> = noun_ids.iter().map(|&i| NOUNS[i]).collect();
    let fn_name = match language {
        LanguageId::Java => camel(verb, nouns[0]),
        _ => format!("{verb}_{}", nouns[0]),
    };
    let e = match language {
        LanguageId::Java => camel(helper_verb, nouns[3]),
        _ => format!("{helper_verb}_{}", nouns[3]),
    };
    Fill {
        fn_name,
        a: nouns[1].to_string(),
        b: nouns[2].to_string(),
        c: format!("{adj}_{}", nouns[3]),
        d: format!("{}_item", nouns[1]),
        e,
        words: [
            verb.to_string(),
            nouns[0].to_string(),
            nouns[1].to_string(),
            adj.to_string(),
        ],
    }
}

fn docstring(fill: &Fill) -> String {
    format!(
        "{} the {} {} over each {} entry",
        fill.words[0], fill.words[3], fill.words[1], fill.words[2]
    )
}

fn expand(template: &str, fill: &Fill) -> String {
    template
        .replace("$FN", &fill.fn_name)
        .replace("$A", &fill.a)
        .replace("$B", &fill.b)
        .replace("$C", &fill.c)
        .replace("$D", &fill.d)
        .replace("$E", &fill.e)
}

fn templates(language: LanguageId) -> &'static [&'static str] {
    match language {
        LanguageId::Python => &[
            "def $FN($A, $B):\n    $C = 0\n    for $D in $A:\n        if $D > $B:\n            $C += $E($D)\n    return $C\n",
            "def $FN($A, $B):\n    $C = []\n    for $D in $A:\n        $C.append($E($D, $B))\n    return $C\n",
            "def $FN($A, $B):\n    $C = 0\n    while $C < len($A) and $A[$C] != $B:\n        $C += 1\n    return $C\n",
            "def $FN($A):\n    $C = {}\n    for $D in $A:\n        $C[$D] = $C.get($D, 0) + 1\n    return $C\n",
            "def $FN($A):\n    if $A <= 1:\n        return 1\n    return $A * $FN($A - 1)\n",
        ],
        LanguageId::C => &[
            "int $FN(const int *$A, int $B) {\n    int $C = 0;\n    for (int $D = 0; $D < $B; $D++) {\n        $C += $E($A[$D]);\n    }\n    return $C;\n}\n",
            "int $FN(const int *$A, int $B) {\n    int $C = $A[0];\n    for (int $D = 1; $D < $B; $D++) {\n        if ($A[$D] > $C) { $C = $A[$D]; }\n    }\n    return $C;\n}\n",
            "int $FN(int *$A, int $B) {\n    int $C = 0;\n    int $D = $B - 1;\n    while ($C < $D) {\n        int tmp = $A[$C];\n        $A[$C] = $A[$D];\n        $A[$D] = tmp;\n        $C++;\n        $D--;\n    }\n    return $B;\n}\n",
            "int $FN(const int *$A, int $B, int $C) {\n    int $D = 0;\n    for (int i = 0; i < $B; i++) {\n        $D = $D * $C + $A[i];\n    }\n    return $D;\n}\n",
        ],
        LanguageId::Cpp => &[
            "inline double $FN(const double *$A, int $B) {\n    double $C = 0.0;\n    for (int $D = 0; $D < $B; ++$D) {\n        $C += $A[$D] * $A[$D];\n    }\n    return std::sqrt($C);\n}\n",
            "inline int $FN(const int *$A, int $B) {\n    int $C = 0;\n    int $D = $B;\n    while ($D > 1) {\n        $D /= 2;\n        $C++;\n    }\n    return $C + $A[0];\n}\n",
            "inline bool $FN(const int *$A, int $B, int $C) {\n    for (int $D = 0; $D < $B; ++$D) {\n        if ($E($A[$D]) == $C) { return true; }\n    }\n    return false;\n}\n",
        ],
        LanguageId::Java => &[
            "public int $FN(int[] $A, int $B) {\n    int $C = 0;\n    for (int $D : $A) {\n        if ($D % $B == 0) { $C++; }\n    }\n    return $C;\n}\n",
            "public int $FN(int[] $A, int $B) {\n    int $C = 0;\n    for (int $D = 0; $D < $A.length; $D++) {\n        $C += $E($A[$D], $B);\n    }\n    return $C;\n}\n",
            "public boolean $FN(int[] $A, int $B) {\n    int $C = 0;\n    int $D = $A.length - 1;\n    while ($C < $D) {\n        if ($A[$C] + $A[$D] == $B) { return true; }\n        $C++;\n        $D--;\n    }\n    return false;\n}\n",
        ],
    }
}

const LANG_CYCLE: [LanguageId; 4] = [
    LanguageId::Python,
    LanguageId::C,
    LanguageId::Cpp,
    LanguageId::Java,
];

/// `n` mixed-language records with docstrings, deterministic in `seed`.
pub fn synth_corpus(n: usize, seed: u64) -> Vec<DatasetRecord> {
    (0..n)
        .map(|i| {
            let id = format!("r{i:05}");
            let mut rng = ChaCha8Rng::from_seed(derive_seed(seed, &["synth", &id]));
            let language = LANG_CYCLE[i % LANG_CYCLE.len()];
            let shapes = templates(language);
            let template = shapes[rng.gen_range(0..shapes.len())];
            let fill = draw_fill(&mut rng, language);
            DatasetRecord {
                id,
                language,
                code: expand(template, &fill),
                docstring: Some(docstring(&fill)),
                clone_group: None,
                transform: None,
            }
        })
        .collect()
}

/// Rename-clone groups, one per (language, template) pair so that members
/// of different groups are genuinely different program structures. Members
/// of one group share the template and literals and differ in a single
/// identifier slot: original literal similarity is high and structural
/// similarity is exact.
pub fn synth_clone_corpus(members: usize, seed: u64) -> Vec<DatasetRecord> {
    let mut records = Vec::new();
    let mut g = 0usize;
    for &language in &LANG_CYCLE {
        for template in templates(language) {
            let group_id = format!("grp{g:03}");
            let mut rng = ChaCha8Rng::from_seed(derive_seed(seed, &["clone", &group_id]));
            let base = draw_fill(&mut rng, language);
            for m in 0..members {
                let mut fill = base.clone();
                if m > 0 {
                    // One slot varies per member; everything else matches.
                    fill.c = format!("{}_{m}", base.c);
                }
                records.push(DatasetRecord {
                    id: format!("{group_id}m{m}"),
                    language,
                    code: expand(template, &fill),
                    docstring: None,
                    clone_group: Some(group_id.clone()),
                    transform: None,
                });
            }
            g += 1;
        }
    }
    records
}

/// Number of clone groups [`synth_clone_corpus`] produces.
pub fn clone_group_count() -> usize {
    LANG_CYCLE.iter().map(|&l| templates(l).len()).sum()
}

/// Write records as JSONL with the canonical serializer.
pub fn write_jsonl(path: &std::path::Path, records: &[DatasetRecord]) {
    use std::io::Write;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    for record in records {
        serde_json::to_writer(&mut file, record).unwrap();
        file.write_all(b"\n").unwrap();
    }
}

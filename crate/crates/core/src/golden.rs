//! Permanent regression fixture: a bubble-sort unit whose full sequential
//! rename is pinned byte-for-byte. `codemask golden-check` runs it so any
//! drift in the lexer, binder, or naming shows up as one failing command.
//!
//! Pinned behavior worth calling out: the template parameters `It` and
//! `Pred` are type names with no renameable use, so they are protected and
//! keep their spelling everywhere, including `Pred pred=Pred()`; the
//! namespace-qualified `std::swap`, `std::distance`, `std::advance`, and
//! `detail::advance` survive untouched; and `pred` lands in the shared
//! `fun` counter space right after the definition name.

use crate::binder::classify_identifiers;
use crate::lexer::tokenize;
use crate::naming::{NamingScheme, SeededGenerator};
use crate::profile::{load_profile, LanguageId};
use crate::transform::{apply_renames, plan_renames, AnonymizationSpec};

pub const GOLDEN_INPUT: &str = include_str!("../data/golden/bubble_sort.cc");
pub const GOLDEN_EXPECTED: &str = include_str!("../data/golden/bubble_sort_renamed.cc");

/// The exact rename assignment the fixture must produce, in first-occurrence
/// order.
pub const GOLDEN_RENAMES: [(&str, &str); 8] = [
    ("bubble_sort", "fun1"),
    ("begin", "var1"),
    ("end", "var2"),
    ("pred", "fun2"),
    ("it_end", "var3"),
    ("finished", "var4"),
    ("it", "var5"),
    ("next", "var6"),
];

#[derive(Debug)]
pub struct GoldenCheck {
    /// Planned renames in first-occurrence order.
    pub renames: Vec<(String, String)>,
    pub output: String,
    pub map_ok: bool,
    pub output_ok: bool,
}

impl GoldenCheck {
    pub fn passed(&self) -> bool {
        self.map_ok && self.output_ok
    }
}

/// Run the full-sequential transform over the fixture and compare against
/// the pinned map and output.
pub fn run_golden_check() -> GoldenCheck {
    let profile = load_profile(LanguageId::Cpp);
    let stream = tokenize(GOLDEN_INPUT, profile).expect("golden fixture lexes");
    let table = classify_identifiers(&stream, profile);
    let spec = AnonymizationSpec::new(
        crate::binder::IdentifierClass::RENAMEABLE,
        NamingScheme::Sequential,
        0,
    );
    let mut gen = SeededGenerator::new(0, "golden", &spec.variant_tag());
    let plan = plan_renames(&table, &spec, &mut gen, None, profile).expect("sequential plan");
    let output = apply_renames(&stream, &plan.map);

    let expected: Vec<(String, String)> = GOLDEN_RENAMES
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let renames = plan.map.pairs().to_vec();
    GoldenCheck {
        map_ok: renames == expected,
        output_ok: output == GOLDEN_EXPECTED,
        renames,
        output,
    }
}

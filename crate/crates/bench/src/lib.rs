//! Fixtures shared by the engine benchmarks.

use pgroup_core::corpus::{builtin, CorpusEntry};
use pgroup_core::{parse_presentation, Presentation};

/// Catalog entry `name` for prime `p`.
pub fn entry(p: u64, name: &str) -> CorpusEntry {
    builtin(p)
        .expect("builtin catalog")
        .into_iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("no catalog entry {name}"))
}

/// Presentations of increasing order for the enumeration benchmark.
pub fn enumeration_inputs() -> Vec<(&'static str, Presentation)> {
    [
        ("Q8", "gens: i,j; rels: i^4, i^2 j^-2, j^-1 i j i"),
        ("R2", "gens: x1,x2; rels: x1^4, x2^4, [x1,x2]^2, [x1,x2,x1], [x1,x2,x2]"),
        ("R5", "gens: x,y; rels: x^5, y^5, [x,y]^5, [x,y,x], [x,y,y]"),
        ("C3wrC3", "gens: a,t; rels: a^3, t^3, [a, t^-1 a t], [a, t^-2 a t^2]"),
    ]
    .into_iter()
    .map(|(n, t)| (n, parse_presentation(t).expect("fixture parses")))
    .collect()
}

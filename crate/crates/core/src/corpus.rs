//! Built-in catalog of small p-groups and loading of presentation files.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::enumerator::{enumerate_with, EnumerationOptions};
use crate::error::{Error, Result};
use crate::group::ConcreteGroup;
use crate::presentation::{parse_presentation, Presentation};
use crate::resistance::is_powerful;
use crate::structure::{closure, generator_rank, lower_central_series, minimal_generators, Subgroup};

/// Where an expected order comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderSource {
    /// Well-known order of a standard group.
    Standard,
    /// Order stated for the reference class-3 quotients.
    Reference,
    /// Established by an independent enumeration.
    Computed,
    /// Declared in a corpus file header.
    Declared,
}

/// Structural tags, recomputed and compared on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tags {
    pub abelian: bool,
    pub powerful: bool,
    /// Minimal number of generators is exactly two.
    pub two_generated: bool,
    /// Nilpotency class (0 for the trivial group).
    pub class: usize,
}

impl Tags {
    pub fn compute(g: &ConcreteGroup) -> Result<Tags> {
        let whole = Subgroup::whole(g);
        let series = lower_central_series(g, &whole)?;
        let class = series.iter().take_while(|s| !s.is_trivial()).count();
        Ok(Tags {
            abelian: g.is_abelian(),
            powerful: is_powerful(g)?,
            two_generated: generator_rank(g, &whole)? == 2,
            class,
        })
    }
}

impl fmt::Display for Tags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.abelian {
            parts.push("abelian".to_string());
        }
        if self.powerful {
            parts.push("powerful".to_string());
        }
        if self.two_generated {
            parts.push("2-generated".to_string());
        }
        parts.push(format!("class={}", self.class));
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub presentation: Presentation,
    pub expected_order: Option<usize>,
    pub order_source: Option<OrderSource>,
    pub tags: Tags,
    pub group: ConcreteGroup,
}

impl CorpusEntry {
    /// The first two presentation generators when they generate the group,
    /// otherwise a Burnside basis (when it has two elements).
    pub fn generating_pair(&self) -> Option<(usize, usize)> {
        let g = &self.group;
        if let [x, y, ..] = g.generators() {
            if closure(g, &[*x, *y]).ok()?.order() == g.order() {
                return Some((*x, *y));
            }
        }
        match minimal_generators(g, &Subgroup::whole(g)).ok()?.as_slice() {
            [x, y] => Some((*x, *y)),
            _ => None,
        }
    }
}

/// Declared tag set of a catalog or file entry. `None` fields are not checked.
#[derive(Debug, Clone, Copy, Default)]
struct DeclaredTags {
    abelian: Option<bool>,
    powerful: Option<bool>,
    two_generated: Option<bool>,
    class: Option<usize>,
}

fn corpus_error(name: &str, reason: impl Into<String>) -> Error {
    Error::Corpus {
        name: name.to_string(),
        reason: reason.into(),
    }
}

fn materialize(
    name: &str,
    presentation: Presentation,
    expected_order: Option<usize>,
    order_source: Option<OrderSource>,
    declared: DeclaredTags,
    opts: &EnumerationOptions,
) -> Result<CorpusEntry> {
    let group = enumerate_with(&presentation, opts)?.with_label(name);
    if let Some(expected) = expected_order {
        if group.order() != expected {
            return Err(corpus_error(
                name,
                format!("order mismatch: expected {expected}, enumerated {}", group.order()),
            ));
        }
    }
    if !group.is_p_group() {
        return Err(Error::NotPGroup {
            order: group.order(),
            prime: group.prime(),
        });
    }
    let tags = Tags::compute(&group)?;
    let checks = [
        ("abelian", declared.abelian, tags.abelian),
        ("powerful", declared.powerful, tags.powerful),
        ("2-generated", declared.two_generated, tags.two_generated),
    ];
    for (label, want, got) in checks {
        if let Some(want) = want {
            if want != got {
                return Err(corpus_error(
                    name,
                    format!("tag {label} declared {want}, computed {got}"),
                ));
            }
        }
    }
    if let Some(class) = declared.class {
        if class != tags.class {
            return Err(corpus_error(
                name,
                format!("class declared {class}, computed {}", tags.class),
            ));
        }
    }
    Ok(CorpusEntry {
        name: name.to_string(),
        presentation,
        expected_order,
        order_source,
        tags,
        group,
    })
}

struct Item {
    name: String,
    text: String,
    order: Option<usize>,
    source: Option<OrderSource>,
    tags: DeclaredTags,
}

fn item(
    name: impl Into<String>,
    text: impl Into<String>,
    order: usize,
    source: OrderSource,
    tags: (bool, bool, bool, usize),
) -> Item {
    Item {
        name: name.into(),
        text: text.into(),
        order: Some(order),
        source: Some(source),
        tags: DeclaredTags {
            abelian: Some(tags.0),
            powerful: Some(tags.1),
            two_generated: Some(tags.2),
            class: Some(tags.3),
        },
    }
}

const CLASS_FOUR_TRIVIAL: &str = "[x,y,x,x], [x,y,x,y], [x,y,y,x], [x,y,y,y]";

fn catalog(p: u64) -> Vec<Item> {
    use OrderSource::*;
    // tags: (abelian, powerful, 2-generated, class)
    let ab1 = (true, true, false, 1);
    let ab2 = (true, true, true, 1);
    let mut out = Vec::new();
    if p == 2 {
        out.push(item("C2", "gens: x; rels: x^2", 2, Standard, ab1));
        out.push(item("C4", "gens: x; rels: x^4", 4, Standard, ab1));
        out.push(item("C8", "gens: x; rels: x^8", 8, Standard, ab1));
        out.push(item("C2xC2", "gens: x,y; rels: x^2, y^2, [x,y]", 4, Standard, ab2));
        out.push(item("C2xC4", "gens: x,y; rels: x^2, y^4, [x,y]", 8, Standard, ab2));
        out.push(item("C4xC4", "gens: x,y; rels: x^4, y^4, [x,y]", 16, Standard, ab2));
        out.push(item(
            "D4",
            "gens: r,s; rels: r^4, s^2, (r s)^2",
            8,
            Standard,
            (false, false, true, 2),
        ));
        out.push(item(
            "Q8",
            "gens: i,j; rels: i^4, i^2 j^-2, j^-1 i j i",
            8,
            Standard,
            (false, false, true, 2),
        ));
        out.push(item(
            "M16",
            "gens: x,y; rels: x^8, y^2, y^-1 x y = x^5",
            16,
            Standard,
            (false, true, true, 2),
        ));
        out.push(item(
            "D8",
            "gens: r,s; rels: r^8, s^2, (r s)^2",
            16,
            Standard,
            (false, false, true, 3),
        ));
        out.push(item(
            "Q16",
            "gens: x,y; rels: x^8, x^4 y^-2, y^-1 x y x",
            16,
            Standard,
            (false, false, true, 3),
        ));
        out.push(item(
            "R2",
            "gens: x1,x2; rels: x1^4, x2^4, [x1,x2]^2, [x1,x2,x1], [x1,x2,x2]",
            32,
            Reference,
            (false, false, true, 2),
        ));
        out.push(item(
            "N64c2",
            "gens: x,y; rels: x^4, y^4, [x,y]^4, [x,y,x], [x,y,y]",
            64,
            Computed,
            (false, false, true, 2),
        ));
        out.push(item(
            "N64c3",
            format!("gens: x,y; rels: x^4, y^4, [x,y]^2, [x,y,x]^2, [x,y,y], {CLASS_FOUR_TRIVIAL}"),
            64,
            Computed,
            (false, false, true, 3),
        ));
    } else {
        let q = p * p;
        let pn = p as usize;
        out.push(item(
            format!("C{p}"),
            format!("gens: x; rels: x^{p}"),
            pn,
            Standard,
            ab1,
        ));
        out.push(item(
            format!("C{q}"),
            format!("gens: x; rels: x^{q}"),
            pn * pn,
            Standard,
            ab1,
        ));
        out.push(item(
            format!("C{p}xC{p}"),
            format!("gens: x,y; rels: x^{p}, y^{p}, [x,y]"),
            pn * pn,
            Standard,
            ab2,
        ));
        out.push(item(
            format!("C{q}xC{p}"),
            format!("gens: x,y; rels: x^{q}, y^{p}, [x,y]"),
            pn * pn * pn,
            Standard,
            ab2,
        ));
        out.push(item(
            format!("Heis{p}"),
            format!("gens: x,y,z; rels: x^{p}, y^{p}, z^{p}, [x,y] = z, [x,z], [y,z]"),
            pn * pn * pn,
            Standard,
            (false, false, true, 2),
        ));
        out.push(item(
            format!("Ext{p}"),
            format!("gens: x,y; rels: x^{q}, y^{p}, [x,y] = x^{p}"),
            pn * pn * pn,
            Standard,
            (false, true, true, 2),
        ));
        out.push(item(
            format!("R{p}"),
            format!("gens: x1,x2; rels: x1^{p}, x2^{p}, [x1,x2]^{p}, [x1,x2,x1], [x1,x2,x2]"),
            pn * pn * pn,
            Reference,
            (false, false, true, 2),
        ));
        if p == 3 {
            out.push(item(
                "C3wrC3",
                "gens: a,t; rels: a^3, t^3, [a, t^-1 a t], [a, t^-2 a t^2]",
                81,
                Standard,
                (false, false, true, 3),
            ));
            out.push(item(
                "N81c2",
                "gens: x,y; rels: x^9, y^3, [x,y]^3, [x,y,x], [x,y,y]",
                81,
                Computed,
                (false, false, true, 2),
            ));
        }
    }
    out
}

pub const SUPPORTED_PRIMES: [u64; 3] = [2, 3, 5];

fn with_prime(text: &str, p: u64) -> Result<Presentation> {
    Ok(parse_presentation(text)?.with_prime(p)?)
}

/// The shipped catalog for `p` in {2, 3, 5}, every entry materialized and
/// tag-checked. Orders stay at most 128.
pub fn builtin(p: u64) -> Result<Vec<CorpusEntry>> {
    builtin_with(p, &EnumerationOptions::default())
}

pub fn builtin_with(p: u64, opts: &EnumerationOptions) -> Result<Vec<CorpusEntry>> {
    if !SUPPORTED_PRIMES.contains(&p) {
        return Err(Error::UnsupportedPrime(p));
    }
    catalog(p)
        .into_iter()
        .map(|s| materialize(&s.name, with_prime(&s.text, p)?, s.order, s.source, s.tags, opts))
        .collect()
}

/// Two-generated, non-powerful class-3 groups in which `[x, y]` has order
/// above `p` (above `4` for `p = 2`), so the product witness is not the
/// identity. Larger than the catalog cap; orders are taken from enumeration.
pub fn witness_groups(p: u64) -> Result<Vec<CorpusEntry>> {
    let text = match p {
        2 => {
            format!("gens: x,y; rels: x^4, y^4, [x,y]^8, [x,y,x]^4, [x,y,y]^4, [x,y,y] = [x,y,x], {CLASS_FOUR_TRIVIAL}")
        }
        3 => format!("gens: x,y; rels: x^9, y^9, [x,y]^9, [x,y,x]^3, [x,y,y], [x,y]^3 = [x,y,x], {CLASS_FOUR_TRIVIAL}"),
        _ => return Ok(Vec::new()),
    };
    let declared = DeclaredTags {
        abelian: Some(false),
        powerful: Some(false),
        two_generated: Some(true),
        class: Some(3),
    };
    let name = format!("W{p}");
    let entry = materialize(
        &name,
        with_prime(&text, p)?,
        None,
        None,
        declared,
        &EnumerationOptions::default(),
    )?;
    Ok(vec![entry])
}

struct FileHeader {
    name: Option<String>,
    expected_order: Option<usize>,
    tags: DeclaredTags,
    body: String,
}

fn parse_header(name: &str, text: &str) -> Result<FileHeader> {
    let mut header = FileHeader {
        name: None,
        expected_order: None,
        tags: DeclaredTags::default(),
        body: String::new(),
    };
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("expected_order:") {
            let n = rest
                .trim()
                .parse()
                .map_err(|_| corpus_error(name, format!("bad expected_order {:?}", rest.trim())))?;
            header.expected_order = Some(n);
        } else if let Some(rest) = trimmed.strip_prefix("tags:") {
            let mut tags = DeclaredTags {
                abelian: Some(false),
                powerful: Some(false),
                two_generated: Some(false),
                class: None,
            };
            for tag in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                match tag {
                    "abelian" => tags.abelian = Some(true),
                    "powerful" => tags.powerful = Some(true),
                    "2-generated" => tags.two_generated = Some(true),
                    _ => match tag.strip_prefix("class=").map(str::parse) {
                        Some(Ok(c)) => tags.class = Some(c),
                        _ => return Err(corpus_error(name, format!("unknown tag {tag:?}"))),
                    },
                }
            }
            header.tags = tags;
        } else if let Some(rest) = trimmed.strip_prefix("name:") {
            header.name = Some(rest.trim().to_string());
        } else {
            // keep line structure so parse positions stay meaningful
            header.body.push_str(line);
            header.body.push('\n');
        }
    }
    Ok(header)
}

/// Loads one presentation file.
pub fn load_entry(path: &Path, opts: &EnumerationOptions) -> Result<CorpusEntry> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let header = parse_header(&stem, &text)?;
    let name = header.name.unwrap_or(stem);
    let presentation = parse_presentation(&header.body)?;
    let source = header.expected_order.map(|_| OrderSource::Declared);
    materialize(&name, presentation, header.expected_order, source, header.tags, opts)
}

/// Loads a single file, or every regular file of a directory, sorted by name.
pub fn load_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    load_corpus_with(path, &EnumerationOptions::default())
}

pub fn load_corpus_with(path: &Path, opts: &EnumerationOptions) -> Result<Vec<CorpusEntry>> {
    let io = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    };
    if !path.is_dir() {
        return Ok(vec![load_entry(path, opts)?]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .map_err(io)?;
    files.retain(|f| f.is_file());
    files.sort();
    let mut entries = files.iter().map(|f| load_entry(f, opts)).collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ParseError;
    use crate::group::validate_group;

    #[test]
    fn catalogs_materialize() {
        for p in SUPPORTED_PRIMES {
            let entries = builtin(p).unwrap();
            assert!(entries.len() >= 6);
            for e in &entries {
                assert!(e.group.order() <= 128, "{}", e.name);
                assert!(validate_group(&e.group).passed(), "{}", e.name);
                assert_eq!(Some(e.group.order()), e.expected_order);
            }
        }
        assert!(matches!(builtin(7), Err(Error::UnsupportedPrime(7))));
    }

    #[test]
    fn catalog_anchors() {
        let two = builtin(2).unwrap();
        let r2 = two.iter().find(|e| e.name == "R2").unwrap();
        assert_eq!(r2.expected_order, Some(32));
        let three = builtin(3).unwrap();
        assert_eq!(three.iter().find(|e| e.name == "R3").unwrap().group.order(), 27);
        assert_eq!(three.iter().find(|e| e.name == "C3").unwrap().group.order(), 3);
        let names: Vec<&str> = two.iter().map(|e| e.name.as_str()).collect();
        for want in ["C2", "C4", "C8", "C2xC2", "C4xC4", "D4", "Q8", "M16", "R2"] {
            assert!(names.contains(&want), "{want}");
        }
    }

    #[test]
    fn generating_pairs() {
        for e in builtin(3).unwrap() {
            if e.tags.two_generated {
                let (x, y) = e.generating_pair().unwrap();
                assert_eq!(closure(&e.group, &[x, y]).unwrap().order(), e.group.order());
            }
        }
    }

    #[test]
    fn file_loading() {
        let dir = std::env::temp_dir().join(format!("pgroup-corpus-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(
            dir.join("c4.txt"),
            "expected_order: 4\ntags: abelian, powerful\ngens: x; rels: x^4\n",
        )
        .unwrap();
        std::fs::write(
            dir.join("a_r2.txt"),
            "name: R2\nexpected_order: 32\ngens: x1,x2; rels: x1^4, x2^4, [x1,x2]^2, [x1,x2,x1], [x1,x2,x2]\n",
        )
        .unwrap();
        let entries = load_corpus(&dir).unwrap();
        assert_eq!(
            entries.iter().map(|e| e.name.as_str()).collect::<Vec<_>>(),
            ["R2", "c4"]
        );
        assert_eq!(entries[1].order_source, Some(OrderSource::Declared));

        let bad = dir.join("bad.txt");
        std::fs::write(
            &bad,
            "expected_order: 16\ngens: x1,x2; rels: x1^4, x2^4, [x1,x2]^2, [x1,x2,x1], [x1,x2,x2]\n",
        )
        .unwrap();
        let err = load_entry(&bad, &EnumerationOptions::default()).unwrap_err();
        assert!(matches!(&err, Error::Corpus { reason, .. } if reason.contains("expected 16, enumerated 32")));
        std::fs::write(&bad, "gens: x; rels: x^4 )\n").unwrap();
        assert!(matches!(
            load_entry(&bad, &EnumerationOptions::default()),
            Err(Error::Parse(ParseError::Syntax { .. }))
        ));
        std::fs::write(&bad, "tags: abelian\ngens: r,s; rels: r^4, s^2, (r s)^2\n").unwrap();
        assert!(matches!(
            load_entry(&bad, &EnumerationOptions::default()),
            Err(Error::Corpus { .. })
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

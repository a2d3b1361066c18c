//! `pgroup`: build finite p-groups from presentations, analyse them and run
//! the resistance scenarios.

mod report;
mod scenario;

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pgroup_core::corpus::{builtin_with, load_corpus_with, CorpusEntry};
use pgroup_core::enumerator::{DEFAULT_MAX_COSETS, DEFAULT_MAX_ORDER};
use pgroup_core::goursat::goursat_census_capped;
use pgroup_core::resistance::is_powerful;
use pgroup_core::structure::{
    abelian_invariants, all_subgroups_capped, center, commutator_subgroup, frattini, generator_rank,
    lower_central_series, DEFAULT_LATTICE_CAP,
};
use pgroup_core::{EnumerationOptions, Error, Result, Subgroup};
use serde_json::json;

use crate::report::Report;

#[derive(Parser)]
#[command(name = "pgroup", version, about = "Finite p-group engine")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Prime for the builtin catalog and scenario defaults.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Emit the JSON envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized tuple sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest group order materialized as a table.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER, value_parser = positive)]
    pub max_order: usize,
    /// Live coset limit for enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS, value_parser = positive)]
    pub max_cosets: usize,
    /// Report wall-clock times (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

impl Global {
    pub fn options(&self) -> EnumerationOptions {
        EnumerationOptions {
            max_cosets: self.max_cosets,
            max_order: self.max_order,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a presentation and report its order.
    Build { file: PathBuf },
    /// Structure report: invariants, series, center, powerful, d(G).
    Analyze { file: PathBuf },
    /// Subgroup lattice statistics.
    Lattice {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LATTICE_CAP, value_parser = positive)]
        cap: usize,
    },
    /// Check the subgroup / 5-tuple bijection for a direct product.
    GoursatCensus {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LATTICE_CAP, value_parser = positive)]
        cap: usize,
    },
    /// Run a scenario over the builtin catalog or the given files.
    Scenario(scenario::ScenarioArgs),
    /// Builtin catalog.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Loads every file (or directory) given, sorted by entry name.
pub fn load_inputs(paths: &[PathBuf], global: &Global) -> Result<Vec<CorpusEntry>> {
    let opts = global.options();
    let mut entries = Vec::new();
    for path in paths {
        entries.extend(load_corpus_with(path, &opts)?);
    }
    if let Some(p) = global.p {
        if let Some(e) = entries.iter().find(|e| e.group.prime() != p) {
            return Err(Error::PrimeMismatch {
                left: e.group.prime(),
                right: p,
            });
        }
    }
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(entries)
}

/// The given files, or the builtin catalog for `p` when none are given.
pub fn inputs_or_builtin(paths: &[PathBuf], global: &Global, default_p: u64) -> Result<Vec<CorpusEntry>> {
    if paths.is_empty() {
        builtin_with(global.p.unwrap_or(default_p), &global.options())
    } else {
        load_inputs(paths, global)
    }
}

fn load_one(path: &Path, global: &Global) -> Result<CorpusEntry> {
    let mut entries = load_inputs(&[path.to_path_buf()], global)?;
    match entries.len() {
        1 => Ok(entries.remove(0)),
        n => Err(Error::Corpus {
            name: path.display().to_string(),
            reason: format!("expected one presentation, found {n}"),
        }),
    }
}

fn build(file: &Path, global: &Global) -> Result<Report> {
    let e = load_one(file, global)?;
    let g = &e.group;
    let mut r = Report::new("build", json!({ "file": file.display().to_string() }));
    r.results = json!({
        "name": e.name,
        "order": g.order(),
        "elements": g.elements().len(),
        "prime": g.prime(),
        "generators": g.generator_names(),
        "presentation": e.presentation.to_string(),
    });
    r.line(format!("{}: order {} ({}-group)", e.name, g.order(), g.prime()));
    r.line(format!("presentation: {}", e.presentation));
    Ok(r)
}

fn analyze(file: &Path, global: &Global) -> Result<Report> {
    let e = load_one(file, global)?;
    let g = &e.group;
    let whole = Subgroup::whole(g);
    let invariants = abelian_invariants(g, &whole)?;
    let series: Vec<usize> = lower_central_series(g, &whole)?.iter().map(Subgroup::order).collect();
    let derived = commutator_subgroup(g, &whole, &whole)?;
    let phi = frattini(g, &whole)?;
    let z = center(g);
    let powerful = is_powerful(g)?;
    let rank = generator_rank(g, &whole)?;
    let census: BTreeMap<usize, usize> = g.order_census().into_iter().collect();

    let mut r = Report::new("analyze", json!({ "file": file.display().to_string() }));
    r.results = json!({
        "name": e.name,
        "order": g.order(),
        "prime": g.prime(),
        "exponent": g.exponent(),
        "abelian": g.is_abelian(),
        "abelian_invariants": invariants.factors(),
        "lower_central_series": series,
        "class": e.tags.class,
        "derived_order": derived.order(),
        "center_order": z.order(),
        "frattini_order": phi.order(),
        "powerful": powerful,
        "generator_rank": rank,
        "element_orders": census,
    });
    r.line(format!("{}: order {}, exponent {}", e.name, g.order(), g.exponent()));
    r.line(format!("abelian invariants: {:?}", invariants.factors()));
    r.line(format!(
        "lower central series orders: {series:?} (class {})",
        e.tags.class
    ));
    r.line(format!(
        "|[G,G]| = {}, |Z(G)| = {}, |Phi(G)| = {}",
        derived.order(),
        z.order(),
        phi.order()
    ));
    r.line(format!("powerful: {powerful}, d(G) = {rank}"));
    Ok(r)
}

fn lattice(file: &Path, cap: usize, global: &Global) -> Result<Report> {
    let e = load_one(file, global)?;
    let g = &e.group;
    let lat = all_subgroups_capped(g, cap)?;
    let mut by_order: BTreeMap<usize, usize> = BTreeMap::new();
    for h in lat.nodes() {
        *by_order.entry(h.order()).or_default() += 1;
    }
    let normal = lat.normal_subgroups_of(g, lat.top()).len();
    let maximal = lat.maximal_subgroups(lat.top()).len();
    let mut r = Report::new("lattice", json!({ "file": file.display().to_string(), "cap": cap }));
    r.results = json!({
        "name": e.name,
        "order": g.order(),
        "subgroup_count": lat.len(),
        "normal_subgroup_count": normal,
        "maximal_subgroup_count": maximal,
        "subgroups_by_order": by_order,
    });
    r.line(format!(
        "{}: {} subgroups, {normal} normal, {maximal} maximal",
        e.name,
        lat.len()
    ));
    for (order, count) in &by_order {
        r.line(format!("  order {order}: {count}"));
    }
    Ok(r)
}

fn census(file1: &Path, file2: &Path, cap: usize, global: &Global) -> Result<Report> {
    let a = load_one(file1, global)?;
    let b = load_one(file2, global)?;
    let report = goursat_census_capped(&a.group, &b.group, cap)?;
    let mut r = Report::new(
        "goursat-census",
        json!({ "files": [file1.display().to_string(), file2.display().to_string()], "cap": cap }),
    );
    r.line(format!(
        "{} x {}: {} subgroups, {} tuples",
        a.name, b.name, report.subgroup_count, report.tuple_count
    ));
    if report.subgroup_count != report.tuple_count {
        r.fail(format!(
            "subgroup count {} differs from tuple count {}",
            report.subgroup_count, report.tuple_count
        ));
    }
    for f in &report.roundtrip_failures {
        r.fail(format!("round trip: {f}"));
    }
    r.results = serde_json::to_value(&report).expect("serializable report");
    Ok(r)
}

fn corpus_list(global: &Global) -> Result<Report> {
    let p = global
        .p
        .ok_or_else(|| Error::Precondition("corpus list needs --p".into()))?;
    let entries = builtin_with(p, &global.options())?;
    let mut r = Report::new("corpus list", json!({ "p": p }));
    let items: Vec<_> = entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "order": e.group.order(),
                "expected_order": e.expected_order,
                "order_source": e.order_source,
                "tags": e.tags,
                "presentation": e.presentation.to_string(),
            })
        })
        .collect();
    for e in &entries {
        r.line(format!("{:<8} order {:<4} {}", e.name, e.group.order(), e.tags));
    }
    r.results = json!(items);
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Build { file } => build(file, g),
        Command::Analyze { file } => analyze(file, g),
        Command::Lattice { file, cap } => lattice(file, *cap, g),
        Command::GoursatCensus { file1, file2, cap } => census(file1, file2, *cap, g),
        Command::Scenario(args) => scenario::run(args, g),
        Command::Corpus {
            action: CorpusAction::List,
        } => corpus_list(g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.global.timing {
                report.elapsed_ms = start.elapsed().as_millis() as u64;
            }
            if let Err(e) = report.write(cli.global.json, &mut io::stdout().lock()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pgroup_core::corpus::{witness_groups, CorpusEntry};
use pgroup_core::goursat::{abelian_target_check, direct_product_capped, lift_generators, sample_tuples};
use pgroup_core::resistance::{
    commutator_identity_check, phi_embedding_violations_capped, reference_quotient_check, theorem_witness,
    torsion_witness, transfer_witness, ReferenceCheck, ViolationMode, WitnessReport,
};
use pgroup_core::structure::{commutator_subgroup, frattini, quotient, DEFAULT_LATTICE_CAP};
use pgroup_core::{log_p, Error, Result, Subgroup};
use serde_json::{json, Value};

use crate::report::Report;
use crate::{inputs_or_builtin, Global};

/// Scenario names on the command line.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Class-3 quotient against the reference group, odd p.
    #[value(name = "reference-odd", alias = "lemma43")]
    ReferenceOdd,
    /// Class-3 quotient against the reference group, p = 2.
    #[value(name = "reference-two", alias = "lemma44")]
    ReferenceTwo,
    /// Lifting generators of K from H1 and N2.
    #[value(name = "lift", alias = "lemma32")]
    Lift,
    /// Exact sequence for tuples with abelian H2.
    #[value(name = "abelian-target", alias = "lemma34")]
    AbelianTarget,
    /// Product witness w = ([x1, y1], 1).
    Witness,
    /// Cyclic-quotient witness.
    Torsion,
    /// 2-group transfer step.
    Transfer,
    /// Commutator congruences modulo gamma_4.
    Identities,
    /// Census of Frattini order-embedding failures.
    Violations,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pointwise,
    Poset,
}

#[derive(Args)]
pub struct ScenarioArgs {
    #[arg(value_enum)]
    name: Scenario,
    /// Presentation files or directories; the builtin catalog when omitted.
    files: Vec<PathBuf>,
    /// Number of sampled tuples for the tuple scenarios.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Extra exponent m for the cyclic-quotient witness.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Violation census mode.
    #[arg(long, value_enum, default_value_t = Mode::Poset)]
    mode: Mode,
    /// Largest product order used by the tuple scenarios.
    #[arg(long, default_value_t = 256)]
    max_product: usize,
}

fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::ReferenceOdd => "reference-odd",
        Scenario::ReferenceTwo => "reference-two",
        Scenario::Lift => "lift",
        Scenario::AbelianTarget => "abelian-target",
        Scenario::Witness => "witness",
        Scenario::Torsion => "torsion",
        Scenario::Transfer => "transfer",
        Scenario::Identities => "identities",
        Scenario::Violations => "violations",
    }
}

pub fn run(args: &ScenarioArgs, global: &Global) -> Result<Report> {
    let default_p = match args.name {
        Scenario::ReferenceTwo | Scenario::Transfer => 2,
        _ => 3,
    };
    let entries = inputs_or_builtin(&args.files, global, default_p)?;
    let name = scenario_name(args.name);
    let inputs = json!({
        "scenario": name,
        "files": args.files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "p": global.p.unwrap_or(default_p),
        "seed": global.seed,
        "groups": entries.iter().map(|e| e.name.clone()).collect::<Vec<_>>(),
    });
    let mut r = Report::new(format!("scenario {name}"), inputs);
    let results = match args.name {
        Scenario::ReferenceOdd | Scenario::ReferenceTwo => reference(&entries, &mut r)?,
        Scenario::Lift => tuples(&entries, args, global, false, &mut r)?,
        Scenario::AbelianTarget => tuples(&entries, args, global, true, &mut r)?,
        Scenario::Witness => {
            let mut all = entries.clone();
            if args.files.is_empty() {
                all.extend(witness_groups(global.p.unwrap_or(default_p))?);
            }
            witness(&all, global, &mut r)?
        }
        Scenario::Torsion => torsion(&entries, args, global, &mut r)?,
        Scenario::Transfer => transfer(&entries, global, &mut r)?,
        Scenario::Identities => identities(&entries, &mut r)?,
        Scenario::Violations => violations(&entries, args, &mut r)?,
    };
    r.results = Value::Array(results);
    Ok(r)
}

fn reference(entries: &[CorpusEntry], r: &mut Report) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for e in entries {
        let check = reference_quotient_check(&e.group)?;
        let item = match &check {
            ReferenceCheck::Isomorphic {
                basis, quotient_order, ..
            } => {
                let basis: Vec<String> = basis.iter().map(|&b| e.group.describe(b)).collect();
                r.line(format!(
                    "{}: class-3 quotient of order {quotient_order} matches, basis {basis:?}",
                    e.name
                ));
                json!({ "group": e.name, "outcome": "isomorphic", "quotient_order": quotient_order, "basis": basis })
            }
            ReferenceCheck::Skipped(reason) => {
                r.line(format!("{}: skipped ({reason})", e.name));
                json!({ "group": e.name, "outcome": "skipped", "reason": reason.to_string() })
            }
            ReferenceCheck::Failed(why) => {
                r.fail(format!("{}: {why}", e.name));
                json!({ "group": e.name, "outcome": "failed", "reason": why })
            }
        };
        out.push(item);
    }
    Ok(out)
}

/// Seeded tuples over every pair of inputs with product order at most
/// `max_product`, visited in canonical order until `samples` are drawn.
fn tuples(
    entries: &[CorpusEntry],
    args: &ScenarioArgs,
    global: &Global,
    abelian: bool,
    r: &mut Report,
) -> Result<Vec<Value>> {
    let mut pairs = Vec::new();
    for a in entries {
        for b in entries {
            let n = a.group.order() * b.group.order();
            if a.group.prime() == b.group.prime() && n <= args.max_product && n <= global.max_order {
                pairs.push((a, b));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Precondition("no input pair has a small enough product".into()));
    }
    let per_pair = args.samples.div_ceil(pairs.len()).max(1);
    let mut out = Vec::new();
    let mut drawn = 0;
    for (k, (a, b)) in pairs.iter().enumerate() {
        if drawn >= args.samples {
            break;
        }
        let prod = direct_product_capped(&a.group, &b.group, global.max_order)?;
        let seed = global.seed.wrapping_add(k as u64);
        let want = per_pair.min(args.samples - drawn);
        for (j, t) in sample_tuples(&a.group, &b.group, want, seed, abelian)?
            .iter()
            .enumerate()
        {
            let label = format!("{}x{} #{j}", a.name, b.name);
            let orders = json!({
                "H1": t.h1().order(), "N1": t.n1().order(), "H2": t.h2().order(), "N2": t.n2().order(),
            });
            let (passed, detail) = if abelian {
                let rep = abelian_target_check(&prod, t)?;
                (rep.passed(), serde_json::to_value(&rep).expect("serializable"))
            } else {
                let rep = lift_generators(&prod, t)?;
                (rep.passed(), serde_json::to_value(&rep).expect("serializable"))
            };
            if !passed {
                r.fail(format!("{label}: {detail}"));
            }
            r.line(format!("{label}: {orders} {}", if passed { "ok" } else { "FAILED" }));
            out.push(
                json!({ "pair": [a.name, b.name], "seed": seed, "orders": orders, "passed": passed, "report": detail }),
            );
            drawn += 1;
        }
    }
    Ok(out)
}

fn record_witness(label: &str, report: WitnessReport, global: &Global, r: &mut Report) -> Value {
    let mut report = report;
    if !global.timing {
        report.elapsed_ms = 0;
    }
    let tag = if report.is_degenerate() { " (degenerate)" } else { "" };
    r.line(format!("{label}{tag}"));
    for c in &report.claims {
        r.line(format!("  [{}] {}", if c.holds { "ok" } else { "FAIL" }, c.text));
        if !c.holds {
            r.fail(format!("{label}: {}", c.text));
        }
    }
    serde_json::to_value(&report).expect("serializable")
}

fn skipped(label: &str, why: &Error, r: &mut Report) -> Value {
    r.line(format!("{label}: skipped ({why})"));
    json!({ "input": label, "skipped": why.to_string() })
}

fn witness(entries: &[CorpusEntry], global: &Global, r: &mut Report) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for e in entries {
        let Some(pair) = e.generating_pair() else {
            out.push(skipped(&e.name, &Error::Precondition("not 2-generated".into()), r));
            continue;
        };
        match theorem_witness(&e.group, pair, &e.group, pair) {
            Ok(rep) => out.push(record_witness(&e.name, rep, global, r)),
            Err(err @ Error::Precondition(_)) => out.push(skipped(&e.name, &err, r)),
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

fn torsion(entries: &[CorpusEntry], args: &ScenarioArgs, global: &Global, r: &mut Report) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for e in entries {
        let g = &e.group;
        let whole = Subgroup::whole(g);
        let derived = commutator_subgroup(g, &whole, &whole)?;
        let (ab, proj) = quotient(g, &derived)?;
        for &x in g.generators() {
            let label = format!("{} x={}", e.name, g.describe(x));
            let n = log_p(ab.element_order(proj.image(x)), g.prime()).unwrap_or(0);
            if n == 0 {
                out.push(skipped(&label, &Error::Precondition("x lies in [H, H]".into()), r));
                continue;
            }
            match torsion_witness(g, x, n, args.m) {
                Ok(rep) => out.push(record_witness(&label, rep, global, r)),
                Err(err @ Error::Precondition(_)) => out.push(skipped(&label, &err, r)),
                Err(err) => return Err(err),
            }
        }
    }
    Ok(out)
}

fn transfer(entries: &[CorpusEntry], global: &Global, r: &mut Report) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for e in entries {
        let g = &e.group;
        if g.prime() != 2 {
            out.push(skipped(&e.name, &Error::Precondition("needs p = 2".into()), r));
            continue;
        }
        let whole = Subgroup::whole(g);
        let phi = frattini(g, &whole)?;
        let derived = commutator_subgroup(g, &whole, &whole)?;
        let eligible: Vec<usize> = g
            .elements()
            .filter(|&x| !phi.contains(x) && derived.contains(g.pow(x, 2)))
            .collect();
        if eligible.is_empty() {
            out.push(skipped(
                &e.name,
                &Error::Precondition("no h outside Phi(H) with h^2 in [H, H]".into()),
                r,
            ));
            continue;
        }
        for x in eligible {
            let label = format!("{} h={}", e.name, g.describe(x));
            out.push(record_witness(&label, transfer_witness(g, x)?, global, r));
        }
    }
    Ok(out)
}

fn identities(entries: &[CorpusEntry], r: &mut Report) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for e in entries {
        let rep = commutator_identity_check(&e.group)?;
        r.line(format!(
            "{}: {} pairs in a quotient of order {}, {} counterexamples",
            e.name,
            rep.pairs,
            rep.quotient_order,
            rep.counterexamples.len()
        ));
        for c in &rep.counterexamples {
            r.fail(format!("{}: {} fails at ({}, {})", e.name, c.identity, c.x, c.y));
        }
        let mut v = serde_json::to_value(&rep).expect("serializable");
        v["group"] = json!(e.name);
        out.push(v);
    }
    Ok(out)
}

fn violations(entries: &[CorpusEntry], args: &ScenarioArgs, r: &mut Report) -> Result<Vec<Value>> {
    let mode = match args.mode {
        Mode::Pointwise => ViolationMode::Pointwise,
        Mode::Poset => ViolationMode::Poset,
    };
    let mut out = Vec::new();
    for e in entries {
        let census = phi_embedding_violations_capped(&e.group, mode, DEFAULT_LATTICE_CAP)?;
        r.line(format!(
            "{}: {} subgroups, {} violations",
            e.name,
            census.subgroup_count,
            census.violations.len()
        ));
        out.push(json!({
            "group": e.name,
            "subgroup_count": census.subgroup_count,
            "violation_count": census.violations.len(),
            "violations": census.violations,
        }));
    }
    Ok(out)
}

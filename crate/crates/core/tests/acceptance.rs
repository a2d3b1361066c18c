//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use pgroup_core::corpus::{builtin, witness_groups, CorpusEntry, SUPPORTED_PRIMES};
use pgroup_core::goursat::{abelian_target_check, direct_product, goursat_census, sample_tuples};
use pgroup_core::resistance::{
    commutator_identity_check, reference_group, reference_quotient_check, theorem_witness, torsion_witness,
    transfer_witness, ReferenceCheck, SkipReason,
};
use pgroup_core::structure::{abelian_invariants, all_subgroups, closure, frattini, minimal_generators};
use pgroup_core::{log_p, validate_group, ConcreteGroup, Subgroup};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: u64, what: &str) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_s as f64,
        format!("{what} took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64()),
    )
}

fn catalog() -> Vec<CorpusEntry> {
    SUPPORTED_PRIMES
        .iter()
        .flat_map(|&p| builtin(p).expect("builtin catalog"))
        .collect()
}

fn find<'a>(entries: &'a [CorpusEntry], name: &str) -> &'a CorpusEntry {
    entries
        .iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("missing {name}"))
}

fn reference_orders() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (p, want) in [(3u64, 27usize), (5, 125), (2, 32)] {
        let g = reference_group(p).map_err(|e| e.to_string())?;
        check(g.order() == want, format!("R{p} has order {}, want {want}", g.order()))?;
        parts.push(format!("|R{p}|={}", g.order()));
    }
    let r2 = reference_group(2).map_err(|e| e.to_string())?;
    let inv = abelian_invariants(&r2, &Subgroup::whole(&r2)).map_err(|e| e.to_string())?;
    check(inv.factors() == [4, 4], format!("R2 invariants {:?}", inv.factors()))?;
    within(start.elapsed(), 5, "reference orders")?;
    Ok(format!("{}, R2^ab = {:?}", parts.join(" "), inv.factors()))
}

fn frattini_dual() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for e in catalog() {
        let g = &e.group;
        let lattice = all_subgroups(g).map_err(|x| x.to_string())?;
        for (i, h) in lattice.nodes().iter().enumerate() {
            let mut meet = h.clone();
            for &m in lattice.maximal_subgroups(i) {
                let mm = lattice.get(m);
                check(
                    mm.order() * g.prime() as usize == h.order(),
                    format!("{}: maximal subgroup of index other than p", e.name),
                )?;
                meet = meet.intersection(g, mm).map_err(|x| x.to_string())?;
            }
            let phi = frattini(g, h).map_err(|x| x.to_string())?;
            check(phi == meet, format!("{}: Frattini mismatch on subgroup {i}", e.name))?;
            checked += 1;
        }
    }
    within(start.elapsed(), 60, "Frattini check")?;
    Ok(format!("{checked} subgroups in {:.1}s", start.elapsed().as_secs_f64()))
}

fn goursat_bijection() -> Outcome {
    let mut pairs = 0;
    let mut slowest = 0.0f64;
    let mut total_subgroups = 0;
    for p in SUPPORTED_PRIMES {
        let entries = builtin(p).map_err(|e| e.to_string())?;
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i..] {
                if a.group.order() * b.group.order() > 256 {
                    continue;
                }
                let start = Instant::now();
                let report = goursat_census(&a.group, &b.group).map_err(|e| e.to_string())?;
                let elapsed = start.elapsed();
                within(elapsed, 120, &format!("census {}x{}", a.name, b.name))?;
                check(
                    report.passed(),
                    format!(
                        "{}x{}: {} subgroups, {} tuples, {} round-trip failures",
                        a.name,
                        b.name,
                        report.subgroup_count,
                        report.tuple_count,
                        report.roundtrip_failures.len()
                    ),
                )?;
                slowest = slowest.max(elapsed.as_secs_f64());
                total_subgroups += report.subgroup_count;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{pairs} products, {total_subgroups} subgroups, slowest pair {slowest:.1}s"
    ))
}

fn abelian_target() -> Outcome {
    let mut tuples = 0;
    let mut non_split = 0;
    for p in [2u64, 3] {
        let entries = builtin(p).map_err(|e| e.to_string())?;
        let mut seed = 0;
        for a in &entries {
            for b in &entries {
                if a.group.order() * b.group.order() > 128 || b.group.order() < p as usize {
                    continue;
                }
                let product = direct_product(&a.group, &b.group).map_err(|e| e.to_string())?;
                let sample = sample_tuples(&a.group, &b.group, 2, seed, true).map_err(|e| e.to_string())?;
                seed += 1;
                for t in &sample {
                    let r = abelian_target_check(&product, t).map_err(|e| e.to_string())?;
                    check(r.passed(), format!("{}x{}: {r:?}", a.name, b.name))?;
                    if r.splitting == pgroup_core::goursat::Splitting::NonSplitWitness {
                        non_split += 1;
                    }
                    tuples += 1;
                }
            }
        }
    }
    check(tuples >= 50, format!("only {tuples} tuples sampled"))?;
    Ok(format!("{tuples} tuples, {non_split} with non-split abelianization"))
}

fn reference_isomorphism() -> Outcome {
    let (mut iso, mut skipped) = (0, 0);
    for e in catalog() {
        let outcome = reference_quotient_check(&e.group).map_err(|x| x.to_string())?;
        let eligible = e.tags.two_generated
            && !e.tags.powerful
            && !(e.group.prime() == 2 && {
                let inv = abelian_invariants(&e.group, &Subgroup::whole(&e.group)).map_err(|x| x.to_string())?;
                inv.contains(2)
            });
        match outcome {
            ReferenceCheck::Isomorphic { .. } => {
                check(eligible, format!("{} is ineligible but was checked", e.name))?;
                iso += 1;
            }
            ReferenceCheck::Skipped(reason) => {
                check(!eligible, format!("{} is eligible but was skipped ({reason})", e.name))?;
                if e.name.starts_with("Ext") {
                    check(
                        reason == SkipReason::Powerful,
                        format!("{} skipped for {reason}", e.name),
                    )?;
                }
                skipped += 1;
            }
            ReferenceCheck::Failed(why) => return Err(format!("{}: {why}", e.name)),
        }
    }
    Ok(format!("{iso} isomorphic, {skipped} skipped, 0 failures"))
}

fn identities() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    for e in catalog() {
        let r = commutator_identity_check(&e.group).map_err(|x| x.to_string())?;
        check(
            r.passed(),
            format!("{}: {} counterexamples", e.name, r.counterexamples.len()),
        )?;
        pairs += r.pairs;
    }
    within(start.elapsed(), 60, "identity check")?;
    Ok(format!("{pairs} pairs modulo gamma_4, 0 counterexamples"))
}

fn witnesses() -> Outcome {
    let three = builtin(3).map_err(|e| e.to_string())?;
    let two = builtin(2).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut run =
        |label: &str, report: pgroup_core::Result<pgroup_core::resistance::WitnessReport>| -> Result<(), String> {
            let r = report.map_err(|e| format!("{label}: {e}"))?;
            for c in &r.claims {
                check(c.holds, format!("{label}: claim {:?} fails", c.text))?;
            }
            lines.push(format!(
                "{label}{}",
                if r.is_degenerate() { " (degenerate)" } else { "" }
            ));
            Ok(())
        };
    let pair_of = |e: &CorpusEntry| e.generating_pair().expect("two-generated");
    let heis = find(&three, "Heis3");
    run(
        "Heis3",
        theorem_witness(&heis.group, pair_of(heis), &heis.group, pair_of(heis)),
    )?;
    let r2 = find(&two, "R2");
    run("R2", theorem_witness(&r2.group, pair_of(r2), &r2.group, pair_of(r2)))?;
    for p in [2, 3] {
        for w in witness_groups(p).map_err(|e| e.to_string())? {
            let r = theorem_witness(&w.group, pair_of(&w), &w.group, pair_of(&w));
            check(
                r.as_ref().is_ok_and(|r| !r.is_degenerate()),
                format!("{} should give a non-degenerate witness", w.name),
            )?;
            run(&w.name, r)?;
        }
    }
    let q8 = &find(&two, "Q8").group;
    let i = q8.generators()[0];
    run("torsion Q8", torsion_witness(q8, i, 1, 1))?;
    run("transfer Q8", transfer_witness(q8, i))?;
    Ok(lines.join(", "))
}

/// Counts subgroups by testing every subset containing the identity for
/// closure under multiplication.
fn brute_force_subgroups(g: &ConcreteGroup) -> usize {
    let n = g.order();
    assert!(n <= 16);
    (0u32..1 << n)
        .filter(|mask| mask & 1 == 1)
        .filter(|mask| {
            let members: Vec<usize> = (0..n).filter(|&a| mask >> a & 1 == 1).collect();
            members
                .iter()
                .all(|&a| members.iter().all(|&b| mask >> g.mul(a, b) & 1 == 1))
        })
        .count()
}

fn engine_soundness() -> Outcome {
    let mut groups: Vec<CorpusEntry> = catalog();
    for p in [2, 3] {
        groups.extend(witness_groups(p).map_err(|e| e.to_string())?);
    }
    let mut subgroups = 0;
    for e in &groups {
        let g = &e.group;
        let v = validate_group(g);
        check(v.passed(), format!("{} fails validation: {:?}", e.name, v))?;
        if g.order() > 128 {
            continue;
        }
        let p = g.prime();
        for h in all_subgroups(g).map_err(|x| x.to_string())?.nodes() {
            check(g.order() % h.order() == 0, format!("{}: Lagrange fails", e.name))?;
            let basis = minimal_generators(g, h).map_err(|x| x.to_string())?;
            let phi = frattini(g, h).map_err(|x| x.to_string())?;
            let d = log_p(h.order() / phi.order(), p).ok_or("Frattini index is not a p-power")?;
            check(
                basis.len() == d as usize,
                format!("{}: basis size {} vs {d}", e.name, basis.len()),
            )?;
            check(
                closure(g, &basis).map_err(|x| x.to_string())? == *h,
                format!("{}: basis does not generate", e.name),
            )?;
            subgroups += 1;
        }
    }
    let two = builtin(2).map_err(|e| e.to_string())?;
    for (name, want) in [("D4", 10), ("Q8", 6)] {
        let g = &find(&two, name).group;
        let lattice = all_subgroups(g).map_err(|x| x.to_string())?.len();
        let brute = brute_force_subgroups(g);
        check(
            lattice == want && brute == want,
            format!("{name}: lattice {lattice}, brute force {brute}, want {want}"),
        )?;
    }
    Ok(format!(
        "{} groups validated, {subgroups} subgroups checked, D4=10 Q8=6",
        groups.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("reference orders", reference_orders),
        ("Frattini dual characterization", frattini_dual),
        ("Goursat bijection", goursat_bijection),
        ("abelian-target exact sequence", abelian_target),
        ("class-3 quotient isomorphism", reference_isomorphism),
        ("commutator identities", identities),
        ("witness scenarios", witnesses),
        ("engine soundness", engine_soundness),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.2}s]", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

//! Frattini-resistance diagnostics on finite p-groups: the powerful predicate,
//! the reference class-3 quotients, the commutator congruences modulo
//! `gamma_4`, and constructive witness scenarios on direct products.

use std::collections::BTreeMap;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::enumerator::{enumerate, DEFAULT_MAX_COSETS};
use crate::error::{Error, Result};
use crate::goursat::{direct_product, goursat_build, GoursatTuple, ProductGroup};
use crate::group::ConcreteGroup;
use crate::presentation::{parse_presentation, Presentation};
use crate::structure::{
    abelian_invariants, all_subgroups, all_subgroups_capped, closure, commutator_subgroup, frattini, generator_rank,
    hom_from_images, minimal_generators, power_subgroup, product, quotient, subgroup_as_group, Homomorphism, Quotient,
    Subgroup,
};

use crate::util::is_prime;

/// The power taken in the powerful condition: `p` for odd `p`, `4` for `p = 2`.
pub fn powerful_exponent(p: u64) -> u64 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// `gamma_k(H)` with `gamma_1 = H`.
pub fn lower_central_term(g: &ConcreteGroup, h: &Subgroup, k: usize) -> Result<Subgroup> {
    let mut term = h.clone();
    for _ in 1..k {
        if term.is_trivial() {
            break;
        }
        term = commutator_subgroup(g, &term, h)?;
    }
    Ok(term)
}

/// `[H, H] <= H^p` (odd `p`) or `[H, H] <= H^4` (`p = 2`).
pub fn is_powerful_subgroup(g: &ConcreteGroup, h: &Subgroup) -> Result<bool> {
    g.require_p_group()?;
    h.check_parent(g)?;
    let derived = commutator_subgroup(g, h, h)?;
    let powers = power_subgroup(g, h, powerful_exponent(g.prime()))?;
    Ok(derived.is_subgroup_of(&powers))
}

pub fn is_powerful(g: &ConcreteGroup) -> Result<bool> {
    is_powerful_subgroup(g, &Subgroup::whole(g))
}

/// `H^ab` has a cyclic direct factor of order `p`.
pub fn has_cp_direct_factor(g: &ConcreteGroup, h: &Subgroup) -> Result<bool> {
    Ok(abelian_invariants(g, h)?.contains(g.prime()))
}

/// `<x1, x2 | x1^e, x2^e, [x1,x2]^p, [x1,x2,x1], [x1,x2,x2]>` with `e = p`
/// for odd `p` and `e = 4` for `p = 2`.
pub fn reference_presentation(p: u64) -> Result<Presentation> {
    if !is_prime(p) {
        return Err(Error::Parse(crate::error::ParseError::NotPrime(p)));
    }
    let e = powerful_exponent(p);
    let text = format!("gens: x1, x2; rels: x1^{e}, x2^{e}, [x1,x2]^{p}, [x1,x2,x1], [x1,x2,x2]; p: {p}");
    Ok(parse_presentation(&text)?)
}

pub fn reference_group(p: u64) -> Result<ConcreteGroup> {
    let g = enumerate(&reference_presentation(p)?, DEFAULT_MAX_COSETS)?;
    Ok(g.with_label(format!("R{p}")))
}

/// `H^p gamma_3(H)` (odd `p`) or `H^4 gamma_3(H)` (`p = 2`).
pub fn class3_kernel(g: &ConcreteGroup, h: &Subgroup) -> Result<Subgroup> {
    g.require_p_group()?;
    let powers = power_subgroup(g, h, powerful_exponent(g.prime()))?;
    let gamma3 = lower_central_term(g, h, 3)?;
    let n = product(g, &powers, &gamma3)?;
    n.check_normal_in(g, h)?;
    Ok(n)
}

/// `G / G^p gamma_3(G)` (or `G^4` for `p = 2`) with its projection.
pub fn class3_quotient(g: &ConcreteGroup) -> Result<(ConcreteGroup, Homomorphism)> {
    let n = class3_kernel(g, &Subgroup::whole(g))?;
    quotient(g, &n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    NotTwoGenerated,
    Powerful,
    CyclicFactorOfOrderTwo,
}

impl std::fmt::Display for SkipReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SkipReason::NotTwoGenerated => "not 2-generated",
            SkipReason::Powerful => "powerful",
            SkipReason::CyclicFactorOfOrderTwo => "abelianization has a C2 direct factor",
        })
    }
}

/// Outcome of matching the class-3 quotient against the reference group.
#[derive(Debug, Clone)]
pub enum ReferenceCheck {
    /// `x1 -> y1, x2 -> y2` extends to an isomorphism from the reference group
    /// onto the class-3 quotient, for the Burnside basis `{y1, y2}` of `G`.
    Isomorphic {
        basis: [usize; 2],
        quotient_order: usize,
        iso: Homomorphism,
    },
    Skipped(SkipReason),
    Failed(String),
}

impl ReferenceCheck {
    pub fn is_failure(&self) -> bool {
        matches!(self, ReferenceCheck::Failed(_))
    }
}

pub fn reference_quotient_check(g: &ConcreteGroup) -> Result<ReferenceCheck> {
    g.require_p_group()?;
    let whole = Subgroup::whole(g);
    let basis = minimal_generators(g, &whole)?;
    if basis.len() != 2 {
        return Ok(ReferenceCheck::Skipped(SkipReason::NotTwoGenerated));
    }
    if is_powerful(g)? {
        return Ok(ReferenceCheck::Skipped(SkipReason::Powerful));
    }
    if g.prime() == 2 && has_cp_direct_factor(g, &whole)? {
        return Ok(ReferenceCheck::Skipped(SkipReason::CyclicFactorOfOrderTwo));
    }
    let (q, proj) = class3_quotient(g)?;
    let r = reference_group(g.prime())?;
    let images = [proj.image(basis[0]), proj.image(basis[1])];
    let iso = match hom_from_images(&r, &q, &images) {
        Ok(f) => f,
        Err(e) => {
            return Ok(ReferenceCheck::Failed(format!(
                "generator matching is not a homomorphism: {e}"
            )))
        }
    };
    if r.order() != q.order() || !iso.is_bijective(&q) {
        return Ok(ReferenceCheck::Failed(format!(
            "quotient of order {} is not matched onto the reference group of order {}",
            q.order(),
            r.order()
        )));
    }
    Ok(ReferenceCheck::Isomorphic {
        basis: [basis[0], basis[1]],
        quotient_order: q.order(),
        iso,
    })
}

/// An element pair where a congruence modulo `gamma_4` fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCounterexample {
    pub identity: String,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub quotient_order: usize,
    pub pairs: usize,
    pub identities: Vec<String>,
    pub counterexamples: Vec<IdentityCounterexample>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks in `G/gamma_4(G)`, for every pair `(x, y)`:
/// odd `p`: `[x^p, y] = [x,y]^p [[x,y],x]^(p(p-1)/2)` and `[x,[x,y]]^p = [x^p,[x,y]]`;
/// `p = 2`: `[x^4, y] = [x,y]^4 [[x,y],x]^6`.
pub fn commutator_identity_check(g: &ConcreteGroup) -> Result<IdentityReport> {
    g.require_p_group()?;
    let gamma4 = lower_central_term(g, &Subgroup::whole(g), 4)?;
    let (q, _) = quotient(g, &gamma4)?;
    let p = g.prime() as i64;
    let odd = p != 2;
    let (n, binom) = if odd { (p, p * (p - 1) / 2) } else { (4, 6) };
    let power_rule = format!("[x^{n},y] = [x,y]^{n} [[x,y],x]^{binom}");
    let mut identities = vec![power_rule.clone()];
    let aux_rule = format!("[x,[x,y]]^{p} = [x^{p},[x,y]]");
    if odd {
        identities.push(aux_rule.clone());
    }
    let mut counterexamples = Vec::new();
    for x in q.elements() {
        let xn = q.pow(x, n);
        for y in q.elements() {
            let c = q.commutator(x, y);
            let lhs = q.commutator(xn, y);
            let rhs = q.mul(q.pow(c, n), q.pow(q.commutator(c, x), binom));
            if lhs != rhs {
                counterexamples.push(IdentityCounterexample {
                    identity: power_rule.clone(),
                    x,
                    y,
                });
            }
            if odd && q.pow(q.commutator(x, c), p) != q.commutator(q.pow(x, p), c) {
                counterexamples.push(IdentityCounterexample {
                    identity: aux_rule.clone(),
                    x,
                    y,
                });
            }
        }
    }
    Ok(IdentityReport {
        quotient_order: q.order(),
        pairs: q.order() * q.order(),
        identities,
        counterexamples,
    })
}

/// One re-checked statement of a witness report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub text: String,
    pub holds: bool,
    /// Set when the claim holds only because the element involved is trivial.
    pub degenerate: bool,
}

impl Claim {
    fn new(text: impl Into<String>, holds: bool) -> Self {
        Claim {
            text: text.into(),
            holds,
            degenerate: false,
        }
    }

    fn degenerate_if(mut self, flag: bool) -> Self {
        self.degenerate = flag;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WitnessInputs {
    pub groups: Vec<String>,
    pub generators: Vec<String>,
}

/// The witness element as a pair of factor elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessElement {
    pub index: usize,
    pub left: usize,
    pub right: usize,
    pub words: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub scenario: String,
    pub inputs: WitnessInputs,
    pub witness: Option<WitnessElement>,
    pub details: BTreeMap<String, String>,
    pub claims: Vec<Claim>,
    pub elapsed_ms: u64,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }

    pub fn is_degenerate(&self) -> bool {
        self.claims.iter().any(|c| c.degenerate)
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// A subgroup materialized as a group, with the element translation both ways.
struct Section {
    group: ConcreteGroup,
    inclusion: Homomorphism,
    members: Vec<usize>,
}

impl Section {
    fn new(g: &ConcreteGroup, h: &Subgroup) -> Result<Section> {
        let (group, inclusion) = subgroup_as_group(g, h)?;
        Ok(Section {
            group,
            inclusion,
            members: h.elements().to_vec(),
        })
    }

    fn local(&self, x: usize) -> usize {
        self.members.binary_search(&x).expect("element of the section")
    }
}

fn witness_element(
    p: &ProductGroup,
    w: usize,
    parents: [&ConcreteGroup; 2],
    sections: [&Section; 2],
) -> WitnessElement {
    let (a, b) = p.split(w);
    let (ga, gb) = (sections[0].inclusion.image(a), sections[1].inclusion.image(b));
    WitnessElement {
        index: w,
        left: ga,
        right: gb,
        words: [parents[0].describe(ga), parents[1].describe(gb)],
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg.into()))
    }
}

/// The product scenario for two non-abelian 2-generated factors: with
/// `N_i = H_i^p gamma_3(H_i)` (`H_i^4` for `p = 2`) and `phi` matching
/// `x1 -> x2`, `y1 -> y2`, the element `w = ([x1, y1], 1)` lies outside `K`
/// while `w^p` (odd `p`) or `w^4` (`p = 2`) lies in `[K, K]`.
pub fn theorem_witness(
    g1: &ConcreteGroup,
    gens1: (usize, usize),
    g2: &ConcreteGroup,
    gens2: (usize, usize),
) -> Result<WitnessReport> {
    let start = Instant::now();
    if g1.prime() != g2.prime() {
        return Err(Error::PrimeMismatch {
            left: g1.prime(),
            right: g2.prime(),
        });
    }
    g1.require_p_group()?;
    g2.require_p_group()?;
    let prime = g1.prime();
    let h1 = closure(g1, &[gens1.0, gens1.1])?;
    let h2 = closure(g2, &[gens2.0, gens2.1])?;
    for (side, g, h) in [(1, g1, &h1), (2, g2, &h2)] {
        require(generator_rank(g, h)? == 2, format!("H{side} is not 2-generated"))?;
        require(!is_powerful_subgroup(g, h)?, format!("H{side} is powerful"))?;
        if prime == 2 {
            require(
                !has_cp_direct_factor(g, h)?,
                format!("H{side} has a cyclic direct factor of order 2 in its abelianization"),
            )?;
        }
    }

    let s1 = Section::new(g1, &h1)?;
    let s2 = Section::new(g2, &h2)?;
    let (a1, a2) = (&s1.group, &s2.group);
    let whole1 = Subgroup::whole(a1);
    let whole2 = Subgroup::whole(a2);
    let n1 = class3_kernel(a1, &whole1)?;
    let n2 = class3_kernel(a2, &whole2)?;
    let (x1, y1) = (s1.local(gens1.0), s1.local(gens1.1));
    let (x2, y2) = (s2.local(gens2.0), s2.local(gens2.1));
    let tuple = GoursatTuple::from_matching(a1, a2, whole1.clone(), n1.clone(), whole2, n2, &[(x1, x2), (y1, y2)])
        .map_err(|e| Error::InconsistentTable(format!("generator matching between class-3 quotients failed: {e}")))?;
    let pk = PairGroup::new(a1, a2, &tuple, &[(x1, x2), (y1, y2)]);
    let (dk, dk_order) = pk.derived();
    let in_dk = |a: usize, b: usize| dk.contains(pk.code((a, b)));

    let c1 = a1.commutator(x1, y1);
    let mut claims = vec![
        Claim::new("[x1, y1] is not in N1", !n1.contains(c1)),
        Claim::new("w = ([x1, y1], 1) is not in K", !pk.contains(c1, 0)),
    ];
    let gamma4 = lower_central_term(a1, &whole1, 4)?;
    claims.push(Claim::new(
        "gamma_4(H1) x {1} is contained in [K, K]",
        gamma4.elements().iter().all(|&e| in_dk(e, 0)),
    ));
    if prime == 2 {
        let w2 = a1.pow(c1, 2);
        let w4 = a1.pow(c1, 4);
        claims.push(Claim::new("w^2 is in K", pk.contains(w2, 0)).degenerate_if(w2 == 0));
        claims.push(Claim::new("w^4 is in [K, K]", in_dk(w4, 0)).degenerate_if(w4 == 0));
    } else {
        let e = prime as i64;
        let aux = a1.pow(a1.commutator(x1, c1), e);
        claims.push(Claim::new("([x1, [x1, y1]], 1)^p is in [K, K]", in_dk(aux, 0)));
        let wp = a1.pow(c1, e);
        claims.push(Claim::new("w^p is in [K, K]", in_dk(wp, 0)).degenerate_if(wp == 0));
    }

    let mut details = BTreeMap::new();
    details.insert("K order".into(), pk.order.to_string());
    details.insert("[K, K] order".into(), dk_order.to_string());
    details.insert("N1 order".into(), n1.order().to_string());
    details.insert("order of [x1, y1]".into(), a1.element_order(c1).to_string());
    Ok(WitnessReport {
        scenario: "theorem-witness".into(),
        inputs: WitnessInputs {
            groups: vec![g1.label().to_string(), g2.label().to_string()],
            generators: vec![
                g1.describe(gens1.0),
                g1.describe(gens1.1),
                g2.describe(gens2.0),
                g2.describe(gens2.1),
            ],
        },
        witness: Some(WitnessElement {
            index: c1 * a2.order(),
            left: s1.inclusion.image(c1),
            right: 0,
            words: [g1.describe(s1.inclusion.image(c1)), g2.describe(0)],
        }),
        details,
        claims,
        elapsed_ms: elapsed_ms(start),
    })
}

/// The subgroup `K` of `A1 x A2` built from a tuple, handled through pair
/// arithmetic so that no multiplication table of `K` is needed.
struct PairGroup<'a> {
    a1: &'a ConcreteGroup,
    a2: &'a ConcreteGroup,
    order: usize,
    generators: Vec<(usize, usize)>,
    /// membership by pair code `a * |A2| + b`
    members: FixedBitSet,
}

impl<'a> PairGroup<'a> {
    fn new(a1: &'a ConcreteGroup, a2: &'a ConcreteGroup, t: &GoursatTuple, gens: &[(usize, usize)]) -> PairGroup<'a> {
        let width = a2.order();
        let mut by_coset: Vec<Vec<usize>> = vec![Vec::new(); t.q2().order()];
        for &b in t.h2().elements() {
            by_coset[t.q2().coset_of(b).expect("element of H2")].push(b);
        }
        let mut members = FixedBitSet::with_capacity(a1.order() * width);
        let mut order = 0;
        for &a in t.h1().elements() {
            let c = t.image_coset(a).expect("element of H1");
            for &b in &by_coset[c] {
                members.insert(a * width + b);
                order += 1;
            }
        }
        let mut generators = gens.to_vec();
        generators.extend(t.n2().generators().iter().map(|&n| (0, n)));
        PairGroup {
            a1,
            a2,
            order,
            generators,
            members,
        }
    }

    fn code(&self, (a, b): (usize, usize)) -> usize {
        a * self.a2.order() + b
    }

    fn contains(&self, a: usize, b: usize) -> bool {
        self.members.contains(self.code((a, b)))
    }

    fn mul(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> (usize, usize) {
        (self.a1.mul(a, c), self.a2.mul(b, d))
    }

    fn commutator(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> (usize, usize) {
        (self.a1.commutator(a, c), self.a2.commutator(b, d))
    }

    fn conjugate(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> (usize, usize) {
        (self.a1.conjugate(a, c), self.a2.conjugate(b, d))
    }

    /// `[K, K]` as the normal closure of the generator commutators. Every
    /// element added as a generator has its conjugates by the generators of
    /// `K` queued, so the result is normalized by `K`.
    fn derived(&self) -> (FixedBitSet, usize) {
        let mut pending: Vec<(usize, usize)> = Vec::new();
        for &s in &self.generators {
            for &t in &self.generators {
                pending.push(self.commutator(s, t));
            }
        }
        let mut set = FixedBitSet::with_capacity(self.members.len());
        set.insert(0);
        let mut elements = vec![(0, 0)];
        let mut gens: Vec<(usize, usize)> = Vec::new();
        while let Some(c) = pending.pop() {
            if set.contains(self.code(c)) {
                continue;
            }
            gens.push(c);
            let mut k = 0;
            while k < elements.len() {
                for &g in &gens {
                    let f = self.mul(elements[k], g);
                    if !set.put(self.code(f)) {
                        elements.push(f);
                    }
                }
                k += 1;
            }
            pending.extend(self.generators.iter().map(|&s| self.conjugate(c, s)));
        }
        (set, elements.len())
    }
}

/// The cyclic-quotient scenario: when the image of `x` in `H1^ab` has order
/// `p^n` and splits off, `H1/N1` is cyclic of order `p^n` for `N1` the
/// preimage of a complement; pairing it with `H2 = C_(p^(n+m))`,
/// `N2 = H2^(p^n)` gives `K` with `w = (x^(p^(n-1)), 1)` outside `K` and
/// `w^p` in `[K, K]`.
pub fn torsion_witness(h1: &ConcreteGroup, x: usize, n: u32, m: u32) -> Result<WitnessReport> {
    let start = Instant::now();
    h1.require_p_group()?;
    h1.check_index(x)?;
    require(n >= 1 && m >= 1, "n and m must be positive")?;
    let prime = h1.prime();
    let whole = Subgroup::whole(h1);
    let derived = commutator_subgroup(h1, &whole, &whole)?;
    let ab = Quotient::new(h1, &whole, &derived)?;
    let abg = ab.group();
    let xbar = ab.coset_of(x).expect("every element has a coset");
    let order = prime.pow(n) as usize;
    require(
        abg.element_order(xbar) == order,
        format!("image of x in H1^ab has order {}, not {order}", abg.element_order(xbar)),
    )?;
    let cyclic = closure(abg, &[xbar])?;
    let lattice = all_subgroups(abg)?;
    let complement = lattice
        .nodes()
        .iter()
        .find(|a| {
            a.order() * order == abg.order() && a.intersection(abg, &cyclic).map(|i| i.is_trivial()).unwrap_or(false)
        })
        .cloned()
        .ok_or_else(|| Error::Precondition("image of x does not split off as a direct factor".into()))?;
    let preimage: Vec<usize> = h1
        .elements()
        .filter(|&h| complement.contains(ab.coset_of(h).expect("coset")))
        .collect();
    let n1 = Subgroup::from_elements(h1, preimage)?;

    let h2g = ConcreteGroup::cyclic(prime.pow(n + m) as usize, prime);
    let h2 = Subgroup::whole(&h2g);
    let n2 = power_subgroup(&h2g, &h2, prime.pow(n))?;
    let tuple = GoursatTuple::from_matching(h1, &h2g, whole.clone(), n1.clone(), h2, n2, &[(x, 1)])
        .map_err(|e| Error::InconsistentTable(format!("cyclic quotients could not be matched: {e}")))?;
    let p = direct_product(h1, &h2g)?;
    let k = goursat_build(&p, &tuple)?;
    let pg = p.group();
    let dk = commutator_subgroup(pg, &k, &k)?;
    let embedded = p.embed_left(&derived)?;

    let wx = h1.pow(x, prime.pow(n - 1) as i64);
    let w = p.pair(wx, 0);
    let wp = pg.pow(w, prime as i64);
    let claims = vec![
        Claim::new(
            "H1/N1 is cyclic of order p^n",
            tuple.q1().order() == order && n1.is_subgroup_of(&whole),
        ),
        Claim::new("[K, K] = [H1, H1] x {1}", dk == embedded),
        Claim::new("w = (x^(p^(n-1)), 1) is not in K", !k.contains(w)),
        Claim::new("w^p is in [K, K]", dk.contains(wp)).degenerate_if(wp == 0),
    ];
    let mut details = BTreeMap::new();
    details.insert(
        "N1".into(),
        format!(
            "{{{}}}",
            n1.elements()
                .iter()
                .map(|&e| h1.describe(e))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    details.insert("H2".into(), h2g.label().to_string());
    details.insert("K order".into(), k.order().to_string());
    details.insert("[K, K] order".into(), dk.order().to_string());
    let ident = Section {
        group: h1.clone(),
        inclusion: Homomorphism::new_unchecked(h1, h1, h1.elements().collect()),
        members: h1.elements().collect(),
    };
    let ident2 = Section {
        group: h2g.clone(),
        inclusion: Homomorphism::new_unchecked(&h2g, &h2g, h2g.elements().collect()),
        members: h2g.elements().collect(),
    };
    Ok(WitnessReport {
        scenario: "torsion-witness".into(),
        inputs: WitnessInputs {
            groups: vec![h1.label().to_string(), h2g.label().to_string()],
            generators: vec![h1.describe(x), format!("n = {n}"), format!("m = {m}")],
        },
        witness: Some(witness_element(&p, w, [h1, &h2g], [&ident, &ident2])),
        details,
        claims,
        elapsed_ms: elapsed_ms(start),
    })
}

/// The 2-group transfer step: for `h` outside `Phi(H)` with `h^2` in
/// `[H, H]`, finds a maximal `M` not containing `h` and `m` in `M` with
/// `h^2 Phi(M) = [h, m] Phi(M)`; then `hm` is outside `M` and
/// `(hm)^2` lies in `Phi(M)`.
pub fn transfer_witness(h: &ConcreteGroup, x: usize) -> Result<WitnessReport> {
    let start = Instant::now();
    require(h.prime() == 2, "transfer witness needs p = 2")?;
    h.require_p_group()?;
    h.check_index(x)?;
    let whole = Subgroup::whole(h);
    let phi_h = frattini(h, &whole)?;
    let derived = commutator_subgroup(h, &whole, &whole)?;
    require(!phi_h.contains(x), "h lies in Phi(H)")?;
    let x2 = h.pow(x, 2);
    require(derived.contains(x2), "h^2 is not in [H, H]")?;

    let lattice = all_subgroups(h)?;
    let mut found = None;
    'outer: for &mi in lattice.maximal_subgroups(lattice.top()) {
        let mm = lattice.get(mi);
        if mm.contains(x) {
            continue;
        }
        let phi_m = frattini(h, mm)?;
        let target = h.inv(x2);
        for &m in mm.elements() {
            if phi_m.contains(h.mul(target, h.commutator(x, m))) {
                found = Some((mi, m, phi_m));
                break 'outer;
            }
        }
    }
    let mut details = BTreeMap::new();
    let claims = match found {
        None => vec![Claim::new("a maximal M not containing h and m in M exist", false)],
        Some((mi, m, phi_m)) => {
            let mm = lattice.get(mi);
            let hm = h.mul(x, m);
            details.insert(
                "M".into(),
                format!(
                    "<{}>",
                    mm.generators()
                        .iter()
                        .map(|&e| h.describe(e))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            );
            details.insert("M order".into(), mm.order().to_string());
            details.insert("m".into(), h.describe(m));
            vec![
                Claim::new(
                    "M is maximal in H and h is not in M",
                    mm.order() * 2 == h.order() && phi_h.is_subgroup_of(mm) && !mm.contains(x),
                ),
                Claim::new(
                    "h^2 Phi(M) = [h, m] Phi(M)",
                    phi_m.contains(h.mul(h.inv(x2), h.commutator(x, m))),
                ),
                Claim::new("hm is not in M", !mm.contains(hm)),
                Claim::new("(hm)^2 is in Phi(M)", phi_m.contains(h.pow(hm, 2))),
            ]
        }
    };
    Ok(WitnessReport {
        scenario: "transfer-witness".into(),
        inputs: WitnessInputs {
            groups: vec![h.label().to_string()],
            generators: vec![h.describe(x)],
        },
        witness: None,
        details,
        claims,
        elapsed_ms: elapsed_ms(start),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationMode {
    /// `(x, H)` with `x^p` in `Phi(H)` and `x` outside `H`, for proper `H`.
    Pointwise,
    /// `(H, K)` with `Phi(H) <= Phi(K)` but `H` not contained in `K`.
    Poset,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationCensus {
    pub mode: ViolationMode,
    pub subgroup_count: usize,
    /// Pointwise: `(element, subgroup index)`. Poset: `(subgroup, subgroup)`.
    /// Subgroup indices refer to the canonical lattice order.
    pub violations: Vec<(usize, usize)>,
}

pub fn phi_embedding_violations(g: &ConcreteGroup, mode: ViolationMode) -> Result<ViolationCensus> {
    phi_embedding_violations_capped(g, mode, crate::structure::DEFAULT_LATTICE_CAP)
}

pub fn phi_embedding_violations_capped(g: &ConcreteGroup, mode: ViolationMode, cap: usize) -> Result<ViolationCensus> {
    let lattice = all_subgroups_capped(g, cap)?;
    let phis = lattice
        .nodes()
        .iter()
        .map(|h| frattini(g, h))
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    match mode {
        ViolationMode::Pointwise => {
            let p = g.prime() as i64;
            for (i, h) in lattice.nodes().iter().enumerate() {
                if h.order() == g.order() {
                    continue;
                }
                for x in g.elements() {
                    if !h.contains(x) && phis[i].contains(g.pow(x, p)) {
                        violations.push((x, i));
                    }
                }
            }
        }
        ViolationMode::Poset => {
            for i in 0..lattice.len() {
                for j in 0..lattice.len() {
                    if i != j && phis[i].is_subgroup_of(&phis[j]) && !lattice.contains(i, j) {
                        violations.push((i, j));
                    }
                }
            }
        }
    }
    Ok(ViolationCensus {
        mode,
        subgroup_count: lattice.len(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(text: &str) -> ConcreteGroup {
        enumerate(&parse_presentation(text).unwrap(), DEFAULT_MAX_COSETS).unwrap()
    }

    #[test]
    fn pair_derived_matches_table() {
        use crate::goursat::sample_tuples;
        let g1 = group("gens: r,s; rels: r^4, s^2, (r s)^2");
        let g2 = q8();
        let prod = direct_product(&g1, &g2).unwrap();
        for t in sample_tuples(&g1, &g2, 12, 7, false).unwrap() {
            let k = goursat_build(&prod, &t).unwrap();
            let gens: Vec<(usize, usize)> = k.generators().iter().map(|&e| prod.split(e)).collect();
            let pk = PairGroup::new(&g1, &g2, &t, &gens);
            assert_eq!(pk.order, k.order());
            let dk = commutator_subgroup(prod.group(), &k, &k).unwrap();
            let (set, order) = pk.derived();
            assert_eq!(order, dk.order());
            for e in prod.group().elements() {
                let (a, b) = prod.split(e);
                assert_eq!(set.contains(pk.code((a, b))), dk.contains(e));
                assert_eq!(pk.contains(a, b), k.contains(e));
            }
        }
    }

    fn heis3() -> ConcreteGroup {
        group("gens: x,y; rels: x^3, y^3, [x,y]^3, [x,y,x], [x,y,y]").with_label("Heis3")
    }

    fn q8() -> ConcreteGroup {
        group("gens: i,j; rels: i^4, i^2 j^-2, j^-1 i j i").with_label("Q8")
    }

    /// Brute-force powerful test from element sets.
    fn powerful_oracle(g: &ConcreteGroup) -> bool {
        let e = powerful_exponent(g.prime()) as i64;
        let comms: Vec<usize> = g
            .elements()
            .flat_map(|a| g.elements().map(move |b| (a, b)))
            .map(|(a, b)| g.commutator(a, b))
            .collect();
        let powers: Vec<usize> = g.elements().map(|a| g.pow(a, e)).collect();
        let d = closure(g, &comms).unwrap();
        let pw = closure(g, &powers).unwrap();
        d.is_subgroup_of(&pw)
    }

    #[test]
    fn powerful_examples() {
        let c9 = ConcreteGroup::cyclic(9, 3);
        assert!(is_powerful(&c9).unwrap());
        assert!(!is_powerful(&heis3()).unwrap());
        let ext = group("gens: x,y; rels: x^9, y^3, [x,y] = x^3");
        assert_eq!(ext.order(), 27);
        assert!(is_powerful(&ext).unwrap());
        for g in [c9, heis3(), ext, q8()] {
            assert_eq!(is_powerful(&g).unwrap(), powerful_oracle(&g));
        }
        assert!(is_powerful(&ConcreteGroup::cyclic(6, 2)).is_err());
    }

    #[test]
    fn reference_orders() {
        assert_eq!(reference_group(3).unwrap().order(), 27);
        assert_eq!(reference_group(5).unwrap().order(), 125);
        let r2 = reference_group(2).unwrap();
        assert_eq!(r2.order(), 32);
        assert_eq!(
            abelian_invariants(&r2, &Subgroup::whole(&r2)).unwrap().factors(),
            &[4, 4]
        );
        assert!(reference_group(4).is_err());
    }

    #[test]
    fn class3_quotient_fixes_reference_groups() {
        for g in [heis3(), reference_group(2).unwrap()] {
            let (q, _) = class3_quotient(&g).unwrap();
            assert_eq!(q.order(), g.order());
        }
        let v = group("gens: a,b; rels: a^3, b^3, [a,b]");
        assert_eq!(class3_quotient(&v).unwrap().0.order(), 9);
    }

    #[test]
    fn reference_check_outcomes() {
        assert!(matches!(
            reference_quotient_check(&heis3()).unwrap(),
            ReferenceCheck::Isomorphic { quotient_order: 27, .. }
        ));
        let d4 = group("gens: r,s; rels: r^4, s^2, (r s)^2");
        assert!(matches!(
            reference_quotient_check(&d4).unwrap(),
            ReferenceCheck::Skipped(SkipReason::CyclicFactorOfOrderTwo)
        ));
        let c9 = ConcreteGroup::cyclic(9, 3);
        assert!(matches!(
            reference_quotient_check(&c9).unwrap(),
            ReferenceCheck::Skipped(SkipReason::NotTwoGenerated)
        ));
        let ext = group("gens: x,y; rels: x^9, y^3, [x,y] = x^3");
        assert!(matches!(
            reference_quotient_check(&ext).unwrap(),
            ReferenceCheck::Skipped(SkipReason::Powerful)
        ));
        let r2 = reference_group(2).unwrap();
        assert!(matches!(
            reference_quotient_check(&r2).unwrap(),
            ReferenceCheck::Isomorphic { quotient_order: 32, .. }
        ));
    }

    #[test]
    fn identities_hold() {
        for g in [heis3(), reference_group(2).unwrap(), q8(), ConcreteGroup::cyclic(8, 2)] {
            let report = commutator_identity_check(&g).unwrap();
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.pairs, report.quotient_order * report.quotient_order);
        }
        // wreath product C3 wr C3 has class 3
        let w = group("gens: a,t; rels: a^3, t^3, [a, t^-1 a t], [a, t^-2 a t^2]");
        assert_eq!(w.order(), 81);
        assert!(commutator_identity_check(&w).unwrap().passed());
    }

    #[test]
    fn theorem_witness_reference_pairs() {
        let h = heis3();
        let (x, y) = (h.generators()[0], h.generators()[1]);
        let report = theorem_witness(&h, (x, y), &h, (x, y)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.is_degenerate());

        let r2 = reference_group(2).unwrap();
        let (x, y) = (r2.generators()[0], r2.generators()[1]);
        let report = theorem_witness(&r2, (x, y), &r2, (x, y)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.is_degenerate());

        let c4 = ConcreteGroup::cyclic(4, 2);
        assert!(matches!(
            theorem_witness(&c4, (1, 1), &r2, (x, y)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn torsion_witness_quaternion() {
        let q = q8();
        let i = q.generators()[0];
        let j = q.generators()[1];
        let report = torsion_witness(&q, i, 1, 1).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(!report.is_degenerate());
        let minus_one = q.pow(i, 2);
        let mut expected: Vec<String> = [0, minus_one, j, q.inv(j)].iter().map(|&e| q.describe(e)).collect();
        expected.sort();
        let listed = report.details["N1"].trim_matches(|c| c == '{' || c == '}').to_string();
        let mut listed: Vec<String> = listed.split(", ").map(str::to_string).collect();
        listed.sort();
        assert_eq!(listed, expected);

        let d4 = group("gens: r,s; rels: r^4, s^2, (r s)^2");
        let report = torsion_witness(&d4, d4.generators()[0], 1, 1).unwrap();
        assert!(report.passed(), "{report:?}");

        let c3 = ConcreteGroup::cyclic(3, 3);
        let report = torsion_witness(&c3, 1, 1, 2).unwrap();
        assert!(report.passed());
        assert!(report.is_degenerate());
        assert!(torsion_witness(&q, i, 2, 1).is_err());
    }

    #[test]
    fn transfer_witness_cases() {
        let q = q8();
        let report = transfer_witness(&q, q.generators()[0]).unwrap();
        assert!(report.passed(), "{report:?}");
        let c4 = ConcreteGroup::cyclic(4, 2);
        assert!(matches!(transfer_witness(&c4, 1), Err(Error::Precondition(_))));
        let d4 = group("gens: r,s; rels: r^4, s^2, (r s)^2");
        let r = d4.generators()[0];
        assert!(transfer_witness(&d4, r).unwrap().passed());
        // R2^ab = C4 x C4, so h^2 in [H, H] forces h into Phi(H)
        let r2 = reference_group(2).unwrap();
        for h in r2.elements() {
            assert!(matches!(transfer_witness(&r2, h), Err(Error::Precondition(_))));
        }
    }

    #[test]
    fn violation_census() {
        let triv = ConcreteGroup::cyclic(1, 2);
        for mode in [ViolationMode::Pointwise, ViolationMode::Poset] {
            assert!(phi_embedding_violations(&triv, mode).unwrap().violations.is_empty());
        }
        let c5 = ConcreteGroup::cyclic(5, 5);
        let census = phi_embedding_violations(&c5, ViolationMode::Pointwise).unwrap();
        assert_eq!(census.violations, (1..5).map(|x| (x, 0)).collect::<Vec<_>>());
        let census = phi_embedding_violations(&q8(), ViolationMode::Poset).unwrap();
        assert!(!census.violations.is_empty());
    }

    #[test]
    fn cyclic_factor_detection() {
        let r2 = reference_group(2).unwrap();
        assert!(!has_cp_direct_factor(&r2, &Subgroup::whole(&r2)).unwrap());
        let q = q8();
        assert!(has_cp_direct_factor(&q, &Subgroup::whole(&q)).unwrap());
        let c9 = ConcreteGroup::cyclic(9, 3);
        assert!(!has_cp_direct_factor(&c9, &Subgroup::whole(&c9)).unwrap());
    }
}

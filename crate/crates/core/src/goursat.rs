//! Direct products and the Goursat correspondence between subgroups of
//! `G1 x G2` and 5-tuples `(H1, N1, H2, N2, phi)`.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerator::DEFAULT_MAX_ORDER;
use crate::error::{Error, Result};
use crate::group::ConcreteGroup;
use crate::structure::{
    abelian_invariants, all_isomorphisms, all_subgroups_capped, closure, commutator_subgroup, frattini,
    hom_from_assignment, minimal_generators, normal_closure_in, AbelianInvariants, Homomorphism, Quotient, Subgroup,
    SubgroupLattice, DEFAULT_LATTICE_CAP,
};

/// `G1 x G2` with its structure maps. Element `i * |G2| + j` is the pair `(i, j)`.
#[derive(Debug, Clone)]
pub struct ProductGroup {
    group: ConcreteGroup,
    left: ConcreteGroup,
    right: ConcreteGroup,
    iota1: Homomorphism,
    iota2: Homomorphism,
    pi1: Homomorphism,
    pi2: Homomorphism,
}

impl ProductGroup {
    pub fn group(&self) -> &ConcreteGroup {
        &self.group
    }

    pub fn left(&self) -> &ConcreteGroup {
        &self.left
    }

    pub fn right(&self) -> &ConcreteGroup {
        &self.right
    }

    #[inline]
    pub fn pair(&self, a: usize, b: usize) -> usize {
        a * self.right.order() + b
    }

    #[inline]
    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.right.order(), k % self.right.order())
    }

    pub fn iota1(&self) -> &Homomorphism {
        &self.iota1
    }

    pub fn iota2(&self) -> &Homomorphism {
        &self.iota2
    }

    pub fn pi1(&self) -> &Homomorphism {
        &self.pi1
    }

    pub fn pi2(&self) -> &Homomorphism {
        &self.pi2
    }

    /// `H x {1}`.
    pub fn embed_left(&self, h: &Subgroup) -> Result<Subgroup> {
        h.check_parent(&self.left)?;
        let gens: Vec<usize> = h.generators().iter().map(|&a| self.pair(a, 0)).collect();
        closure(&self.group, &gens)
    }

    /// `{1} x H`.
    pub fn embed_right(&self, h: &Subgroup) -> Result<Subgroup> {
        h.check_parent(&self.right)?;
        let gens: Vec<usize> = h.generators().iter().map(|&b| self.pair(0, b)).collect();
        closure(&self.group, &gens)
    }

    /// `(a, b)` rendered through the factors' element words.
    pub fn describe(&self, k: usize) -> String {
        let (a, b) = self.split(k);
        format!("({}, {})", self.left.describe(a), self.right.describe(b))
    }
}

pub fn direct_product(g1: &ConcreteGroup, g2: &ConcreteGroup) -> Result<ProductGroup> {
    direct_product_capped(g1, g2, DEFAULT_MAX_ORDER)
}

pub fn direct_product_capped(g1: &ConcreteGroup, g2: &ConcreteGroup, cap: usize) -> Result<ProductGroup> {
    if g1.prime() != g2.prime() {
        return Err(Error::PrimeMismatch {
            left: g1.prime(),
            right: g2.prime(),
        });
    }
    let (n1, n2) = (g1.order(), g2.order());
    let n = n1 * n2;
    if n > cap {
        return Err(Error::OrderCapExceeded { order: n, cap });
    }
    let rule = |a: usize, b: usize| g1.mul(a / n2, b / n2) * n2 + g2.mul(a % n2, b % n2);
    let mut gens: Vec<usize> = g1.generators().iter().map(|&a| a * n2).collect();
    gens.extend(g2.generators().iter().copied());
    let clash = g1.generator_names().iter().any(|x| g2.generator_names().contains(x));
    let mut names: Vec<String> = Vec::with_capacity(gens.len());
    for x in g1.generator_names() {
        names.push(if clash { format!("{x}_1") } else { x.clone() });
    }
    for x in g2.generator_names() {
        names.push(if clash { format!("{x}_2") } else { x.clone() });
    }
    let label = format!("{}x{}", g1.label(), g2.label());
    let group = ConcreteGroup::from_rule(n, rule, gens, names, g1.prime()).with_label(label);
    let iota1 = Homomorphism::new_unchecked(g1, &group, (0..n1).map(|a| a * n2).collect());
    let iota2 = Homomorphism::new_unchecked(g2, &group, (0..n2).collect());
    let pi1 = Homomorphism::new_unchecked(&group, g1, (0..n).map(|k| k / n2).collect());
    let pi2 = Homomorphism::new_unchecked(&group, g2, (0..n).map(|k| k % n2).collect());
    Ok(ProductGroup {
        group,
        left: g1.clone(),
        right: g2.clone(),
        iota1,
        iota2,
        pi1,
        pi2,
    })
}

/// `(H1, N1, H2, N2, phi)` with `phi: H1/N1 -> H2/N2` an isomorphism of the
/// materialized quotients.
#[derive(Debug, Clone)]
pub struct GoursatTuple {
    h1: Subgroup,
    n1: Subgroup,
    h2: Subgroup,
    n2: Subgroup,
    q1: Quotient,
    q2: Quotient,
    phi: Homomorphism,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidTuple(msg.into())
}

fn section_quotient(g: &ConcreteGroup, h: &Subgroup, n: &Subgroup, side: u8) -> Result<Quotient> {
    h.check_parent(g)
        .map_err(|_| invalid(format!("H{side} is not a subgroup of G{side}")))?;
    n.check_parent(g)
        .map_err(|_| invalid(format!("N{side} is not a subgroup of G{side}")))?;
    if !n.is_subgroup_of(h) {
        return Err(invalid(format!("N{side} is not contained in H{side}")));
    }
    Quotient::new(g, h, n).map_err(|_| invalid(format!("N{side} is not normal in H{side}")))
}

impl GoursatTuple {
    /// `phi_images[c]` is the coset of `H2/N2` assigned to coset `c` of `H1/N1`
    /// (cosets are labelled by their smallest element, see [`Quotient`]).
    pub fn new(
        g1: &ConcreteGroup,
        g2: &ConcreteGroup,
        h1: Subgroup,
        n1: Subgroup,
        h2: Subgroup,
        n2: Subgroup,
        phi_images: Vec<usize>,
    ) -> Result<GoursatTuple> {
        let q1 = section_quotient(g1, &h1, &n1, 1)?;
        let q2 = section_quotient(g2, &h2, &n2, 2)?;
        if q1.order() != q2.order() {
            return Err(invalid(format!(
                "quotient orders differ: |H1/N1| = {}, |H2/N2| = {}",
                q1.order(),
                q2.order()
            )));
        }
        let phi = Homomorphism::new(q1.group(), q2.group(), phi_images)
            .map_err(|e| invalid(format!("phi is not a homomorphism: {e}")))?;
        if !phi.is_bijective(q2.group()) {
            return Err(invalid("phi is not bijective"));
        }
        Ok(GoursatTuple {
            h1,
            n1,
            h2,
            n2,
            q1,
            q2,
            phi,
        })
    }

    /// Builds `phi` from `a_k N1 -> b_k N2` for pairs whose first entries
    /// generate `H1` modulo `N1`.
    pub fn from_matching(
        g1: &ConcreteGroup,
        g2: &ConcreteGroup,
        h1: Subgroup,
        n1: Subgroup,
        h2: Subgroup,
        n2: Subgroup,
        pairs: &[(usize, usize)],
    ) -> Result<GoursatTuple> {
        let q1 = section_quotient(g1, &h1, &n1, 1)?;
        let q2 = section_quotient(g2, &h2, &n2, 2)?;
        let mut sources = Vec::with_capacity(pairs.len());
        let mut images = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            sources.push(q1.coset_of(a).ok_or_else(|| invalid(format!("{a} is not in H1")))?);
            images.push(q2.coset_of(b).ok_or_else(|| invalid(format!("{b} is not in H2")))?);
        }
        let phi = hom_from_assignment(q1.group(), q2.group(), &sources, &images)
            .map_err(|e| invalid(format!("matching does not define phi: {e}")))?;
        GoursatTuple::new(g1, g2, h1, n1, h2, n2, phi.images().to_vec())
    }

    fn from_parts_unchecked(
        h1: Subgroup,
        n1: Subgroup,
        h2: Subgroup,
        n2: Subgroup,
        q1: Quotient,
        q2: Quotient,
        phi: Homomorphism,
    ) -> Self {
        GoursatTuple {
            h1,
            n1,
            h2,
            n2,
            q1,
            q2,
            phi,
        }
    }

    pub fn h1(&self) -> &Subgroup {
        &self.h1
    }

    pub fn n1(&self) -> &Subgroup {
        &self.n1
    }

    pub fn h2(&self) -> &Subgroup {
        &self.h2
    }

    pub fn n2(&self) -> &Subgroup {
        &self.n2
    }

    pub fn q1(&self) -> &Quotient {
        &self.q1
    }

    pub fn q2(&self) -> &Quotient {
        &self.q2
    }

    pub fn phi(&self) -> &Homomorphism {
        &self.phi
    }

    /// `phi(a N1)` as a coset label of `H2/N2`.
    pub fn image_coset(&self, a: usize) -> Option<usize> {
        self.q1.coset_of(a).map(|c| self.phi.image(c))
    }
}

impl PartialEq for GoursatTuple {
    fn eq(&self, other: &Self) -> bool {
        self.h1 == other.h1
            && self.n1 == other.n1
            && self.h2 == other.h2
            && self.n2 == other.n2
            && self.phi.images() == other.phi.images()
    }
}

impl Eq for GoursatTuple {}

/// `K = {(h1, h2) : phi(h1 N1) = h2 N2}`.
pub fn goursat_build(p: &ProductGroup, t: &GoursatTuple) -> Result<Subgroup> {
    t.h1.check_parent(&p.left)
        .map_err(|_| invalid("H1 is not a subgroup of the left factor"))?;
    t.h2.check_parent(&p.right)
        .map_err(|_| invalid("H2 is not a subgroup of the right factor"))?;
    let mut by_coset: Vec<Vec<usize>> = vec![Vec::new(); t.q2.order()];
    for &b in t.h2.elements() {
        by_coset[t.q2.coset_of(b).expect("element of H2")].push(b);
    }
    let mut members = FixedBitSet::with_capacity(p.group.order());
    for &a in t.h1.elements() {
        let c = t.phi.image(t.q1.coset_of(a).expect("element of H1"));
        for &b in &by_coset[c] {
            members.insert(p.pair(a, b));
        }
    }
    Subgroup::from_members(&p.group, members)
}

/// Projections, kernels and the induced `phi` of a subgroup of the product.
pub fn goursat_decompose(p: &ProductGroup, k: &Subgroup) -> Result<GoursatTuple> {
    k.check_parent(&p.group)?;
    let (n1, n2) = (p.left.order(), p.right.order());
    let mut s1 = FixedBitSet::with_capacity(n1);
    let mut s2 = FixedBitSet::with_capacity(n2);
    let mut m1 = FixedBitSet::with_capacity(n1);
    let mut m2 = FixedBitSet::with_capacity(n2);
    for &x in k.elements() {
        let (a, b) = p.split(x);
        s1.insert(a);
        s2.insert(b);
        if b == 0 {
            m1.insert(a);
        }
        if a == 0 {
            m2.insert(b);
        }
    }
    let h1 = Subgroup::from_members(&p.left, s1)?;
    let h2 = Subgroup::from_members(&p.right, s2)?;
    let kn1 = Subgroup::from_members(&p.left, m1)?;
    let kn2 = Subgroup::from_members(&p.right, m2)?;
    let q1 = Quotient::new(&p.left, &h1, &kn1)?;
    let q2 = Quotient::new(&p.right, &h2, &kn2)?;
    let mut images = vec![usize::MAX; q1.order()];
    for &x in k.elements() {
        let (a, b) = p.split(x);
        let (c1, c2) = (q1.coset_of(a).expect("in H1"), q2.coset_of(b).expect("in H2"));
        if images[c1] == usize::MAX {
            images[c1] = c2;
        } else if images[c1] != c2 {
            return Err(Error::InconsistentTable(format!(
                "subgroup induces no map on cosets at {}",
                p.describe(x)
            )));
        }
    }
    let phi = Homomorphism::new(q1.group(), q2.group(), images)?;
    Ok(GoursatTuple::from_parts_unchecked(h1, kn1, h2, kn2, q1, q2, phi))
}

/// Result of checking the Goursat bijection on a product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub order1: usize,
    pub order2: usize,
    pub subgroup_count: usize,
    pub tuple_count: usize,
    pub roundtrip_failures: Vec<String>,
}

impl CensusReport {
    pub fn passed(&self) -> bool {
        self.subgroup_count == self.tuple_count && self.roundtrip_failures.is_empty()
    }
}

/// Pairs `(H, N)` with `N` normal in `H`, in lattice order.
fn sections(g: &ConcreteGroup, lattice: &SubgroupLattice) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for h in 0..lattice.len() {
        for n in lattice.normal_subgroups_of(g, h) {
            out.push((h, n));
        }
    }
    out
}

struct Side<'a> {
    g: &'a ConcreteGroup,
    lattice: SubgroupLattice,
    sections: Vec<(usize, usize)>,
    quotients: Vec<Quotient>,
}

impl<'a> Side<'a> {
    fn new(g: &'a ConcreteGroup, cap: usize) -> Result<Self> {
        let lattice = all_subgroups_capped(g, cap)?;
        let sections = sections(g, &lattice);
        let quotients = sections
            .par_iter()
            .map(|&(h, n)| Quotient::new(g, lattice.get(h), lattice.get(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Side {
            g,
            lattice,
            sections,
            quotients,
        })
    }

    fn tuple(&self, other: &Side<'_>, i: usize, j: usize, phi: Homomorphism) -> GoursatTuple {
        let (h1, n1) = self.sections[i];
        let (h2, n2) = other.sections[j];
        GoursatTuple::from_parts_unchecked(
            self.lattice.get(h1).clone(),
            self.lattice.get(n1).clone(),
            other.lattice.get(h2).clone(),
            other.lattice.get(n2).clone(),
            self.quotients[i].clone(),
            other.quotients[j].clone(),
            phi,
        )
    }
}

pub fn goursat_census(g1: &ConcreteGroup, g2: &ConcreteGroup) -> Result<CensusReport> {
    goursat_census_capped(g1, g2, DEFAULT_LATTICE_CAP)
}

/// Counts subgroups of `G1 x G2` and valid 5-tuples, and checks that
/// build and decompose are mutually inverse in both directions.
pub fn goursat_census_capped(g1: &ConcreteGroup, g2: &ConcreteGroup, cap: usize) -> Result<CensusReport> {
    let product = direct_product(g1, g2)?;
    let lattice = all_subgroups_capped(product.group(), cap)?;
    let left = Side::new(g1, cap)?;
    let right = Side::new(g2, cap)?;

    let mut failures: Vec<String> = lattice
        .nodes()
        .par_iter()
        .enumerate()
        .filter_map(|(idx, k)| {
            let rebuilt = goursat_decompose(&product, k).and_then(|t| goursat_build(&product, &t));
            match rebuilt {
                Ok(r) if &r == k => None,
                Ok(_) => Some(format!("subgroup #{idx}: build(decompose(K)) differs from K")),
                Err(e) => Some(format!("subgroup #{idx}: {e}")),
            }
        })
        .collect();

    // isomorphism lists are shared by all sections with the same quotient pair
    let mut iso_cache: HashMap<(usize, usize), Vec<Homomorphism>> = HashMap::new();
    let mut pairs = Vec::new();
    for i in 0..left.sections.len() {
        for j in 0..right.sections.len() {
            if left.quotients[i].order() == right.quotients[j].order() {
                pairs.push((i, j));
            }
        }
    }
    let isos: Vec<((usize, usize), Vec<Homomorphism>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            (
                (i, j),
                all_isomorphisms(left.quotients[i].group(), right.quotients[j].group()),
            )
        })
        .collect();
    iso_cache.extend(isos);

    let per_pair: Vec<(usize, Vec<String>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut bad = Vec::new();
            let maps = &iso_cache[&(i, j)];
            for phi in maps {
                let t = left.tuple(&right, i, j, phi.clone());
                let back = goursat_build(&product, &t).and_then(|k| goursat_decompose(&product, &k));
                match back {
                    Ok(u) if u == t => {}
                    Ok(_) => bad.push(format!("sections ({i}, {j}): decompose(build(t)) differs from t")),
                    Err(e) => bad.push(format!("sections ({i}, {j}): {e}")),
                }
            }
            (maps.len(), bad)
        })
        .collect();
    let mut tuple_count = 0;
    for (count, bad) in per_pair {
        tuple_count += count;
        failures.extend(bad);
    }
    Ok(CensusReport {
        order1: left.g.order(),
        order2: right.g.order(),
        subgroup_count: lattice.len(),
        tuple_count,
        roundtrip_failures: failures,
    })
}

/// A generating set of `K` lifted from the tuple, and the commutator check
/// `{1} x [H2, N2] <= Phi(K)`.
#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    /// Lifts `(h, h')` of a Burnside basis of `H1`, then `(1, n)` for normal
    /// generators `n` of `N2` in `H2`.
    pub generators: Vec<usize>,
    pub lifted_count: usize,
    pub generates_k: bool,
    pub commutator_in_frattini: bool,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.generates_k && self.commutator_in_frattini
    }
}

/// Greedy normal generators of `n` inside `h`.
fn normal_generators(g: &ConcreteGroup, h: &Subgroup, n: &Subgroup) -> Result<Vec<usize>> {
    let mut chosen = Vec::new();
    let mut span = Subgroup::trivial(g);
    for &x in n.elements() {
        if span.order() == n.order() {
            break;
        }
        if !span.contains(x) {
            chosen.push(x);
            span = normal_closure_in(g, h, &chosen)?;
        }
    }
    Ok(chosen)
}

pub fn lift_generators(p: &ProductGroup, t: &GoursatTuple) -> Result<LiftReport> {
    let k = goursat_build(p, t)?;
    let mut generators = Vec::new();
    let basis = if p.left.is_p_group() {
        minimal_generators(&p.left, &t.h1)?
    } else {
        t.h1.generators().to_vec()
    };
    for &a in &basis {
        let c = t.image_coset(a).expect("element of H1");
        generators.push(p.pair(a, t.q2.representative(c)));
    }
    let lifted_count = generators.len();
    for b in normal_generators(&p.right, &t.h2, &t.n2)? {
        generators.push(p.pair(0, b));
    }
    let generated = closure(&p.group, &generators)?;
    let derived = commutator_subgroup(&p.right, &t.h2, &t.n2)?;
    let phi_k = frattini(&p.group, &k)?;
    let commutator_in_frattini = derived.elements().iter().all(|&b| phi_k.contains(p.pair(0, b)));
    Ok(LiftReport {
        generators,
        lifted_count,
        generates_k: generated == k,
        commutator_in_frattini,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    /// `K^ab` has the invariants of `N2 (+) H1^ab`.
    SplitConsistent,
    /// `K^ab` differs from `N2 (+) H1^ab`, so the sequence does not split.
    NonSplitWitness,
}

/// Checks of `[K, K] = [H1, H1] x {1}` and of the exact sequence
/// `1 -> N2 -> K^ab -> H1^ab -> 1` for a tuple with abelian `H2`.
#[derive(Debug, Clone, Serialize)]
pub struct AbelianTargetReport {
    pub derived_matches: bool,
    pub alpha_injective: bool,
    pub beta_well_defined: bool,
    pub beta_surjective: bool,
    pub exact_at_middle: bool,
    pub k_ab: AbelianInvariants,
    pub n2_plus_h1_ab: AbelianInvariants,
    pub splitting: Splitting,
}

impl AbelianTargetReport {
    pub fn passed(&self) -> bool {
        self.derived_matches
            && self.alpha_injective
            && self.beta_well_defined
            && self.beta_surjective
            && self.exact_at_middle
    }
}

pub fn abelian_target_check(p: &ProductGroup, t: &GoursatTuple) -> Result<AbelianTargetReport> {
    if !t.h2.is_abelian(&p.right) {
        return Err(Error::Precondition("H2 is not abelian".into()));
    }
    let g = &p.group;
    let k = goursat_build(p, t)?;
    let dk = commutator_subgroup(g, &k, &k)?;
    let dh1 = commutator_subgroup(&p.left, &t.h1, &t.h1)?;
    let embedded = p.embed_left(&dh1)?;
    let derived_matches = dk == embedded;

    let k_ab = Quotient::new(g, &k, &dk)?;
    let h1_ab = Quotient::new(&p.left, &t.h1, &dh1)?;

    // alpha: N2 -> K^ab, b -> (1, b)[K,K]
    let alpha: Vec<usize> =
        t.n2.elements()
            .iter()
            .map(|&b| k_ab.coset_of(p.pair(0, b)).expect("{1} x N2 lies in K"))
            .collect();
    let alpha_injective = {
        let mut seen = vec![false; k_ab.order()];
        alpha.iter().all(|&c| !std::mem::replace(&mut seen[c], true))
    };

    // beta: K^ab -> H1^ab, (a, b)[K,K] -> a[H1,H1]
    let mut beta = vec![usize::MAX; k_ab.order()];
    let mut beta_well_defined = true;
    for &x in k.elements() {
        let (a, _) = p.split(x);
        let c = k_ab.coset_of(x).expect("element of K");
        let d = h1_ab.coset_of(a).expect("projection lies in H1");
        if beta[c] == usize::MAX {
            beta[c] = d;
        } else if beta[c] != d {
            beta_well_defined = false;
        }
    }
    let beta_surjective = {
        let mut hit = vec![false; h1_ab.order()];
        for &d in &beta {
            hit[d] = true;
        }
        hit.into_iter().all(|h| h)
    };
    let mut image_alpha = alpha.clone();
    image_alpha.sort_unstable();
    image_alpha.dedup();
    let kernel_beta: Vec<usize> = (0..k_ab.order()).filter(|&c| beta[c] == 0).collect();
    let exact_at_middle = image_alpha == kernel_beta;

    let n2_inv = abelian_invariants(&p.right, &t.n2)?;
    let h1_inv = abelian_invariants(&p.left, &t.h1)?;
    let n2_plus_h1_ab = n2_inv.direct_sum(&h1_inv);
    let k_inv = abelian_invariants(g, &k)?;
    let splitting = if k_inv == n2_plus_h1_ab {
        Splitting::SplitConsistent
    } else {
        Splitting::NonSplitWitness
    };
    Ok(AbelianTargetReport {
        derived_matches,
        alpha_injective,
        beta_well_defined,
        beta_surjective,
        exact_at_middle,
        k_ab: k_inv,
        n2_plus_h1_ab,
        splitting,
    })
}

/// Seeded random 5-tuples for `G1 x G2`. With `abelian_h2`, only abelian
/// `H2` are drawn. Deterministic for a given seed.
pub fn sample_tuples(
    g1: &ConcreteGroup,
    g2: &ConcreteGroup,
    count: usize,
    seed: u64,
    abelian_h2: bool,
) -> Result<Vec<GoursatTuple>> {
    if g1.prime() != g2.prime() {
        return Err(Error::PrimeMismatch {
            left: g1.prime(),
            right: g2.prime(),
        });
    }
    let left = Side::new(g1, DEFAULT_LATTICE_CAP)?;
    let right = Side::new(g2, DEFAULT_LATTICE_CAP)?;
    let right_ok: Vec<usize> = (0..right.sections.len())
        .filter(|&j| !abelian_h2 || right.lattice.get(right.sections[j].0).is_abelian(g2))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache: HashMap<(usize, usize), Vec<Homomorphism>> = HashMap::new();
    let mut out = Vec::with_capacity(count);
    let left_ids: Vec<usize> = (0..left.sections.len()).collect();
    let mut attempts = 0;
    while out.len() < count && attempts < count * 64 {
        attempts += 1;
        let &i = left_ids.choose(&mut rng).expect("trivial section always exists");
        let matches: Vec<usize> = right_ok
            .iter()
            .copied()
            .filter(|&j| right.quotients[j].order() == left.quotients[i].order())
            .filter(|&j| {
                !cache
                    .entry((i, j))
                    .or_insert_with(|| all_isomorphisms(left.quotients[i].group(), right.quotients[j].group()))
                    .is_empty()
            })
            .collect();
        let Some(&j) = matches.choose(&mut rng) else {
            continue;
        };
        let phi = cache[&(i, j)].choose(&mut rng).expect("non-empty").clone();
        out.push(left.tuple(&right, i, j, phi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerator::{enumerate, DEFAULT_MAX_COSETS};
    use crate::presentation::parse_presentation;
    use crate::structure::{center, generator_rank};

    fn group(text: &str) -> ConcreteGroup {
        enumerate(&parse_presentation(text).unwrap(), DEFAULT_MAX_COSETS).unwrap()
    }

    fn q8() -> ConcreteGroup {
        group("gens: i,j; rels: i^4, i^2 j^-2, j^-1 i j i")
    }

    /// Subgroups of a product by brute force: closures of all subsets of size
    /// at most two, then closed under pairwise joins.
    fn oracle_subgroup_count(g: &ConcreteGroup) -> usize {
        let mut found: Vec<Subgroup> = Vec::new();
        for a in g.elements() {
            for b in g.elements() {
                let s = closure(g, &[a, b]).unwrap();
                if !found.contains(&s) {
                    found.push(s);
                }
            }
        }
        loop {
            let mut grew = false;
            let snapshot = found.clone();
            for s in &snapshot {
                for t in &snapshot {
                    let mut gens = s.elements().to_vec();
                    gens.extend_from_slice(t.elements());
                    let u = closure(g, &gens).unwrap();
                    if !found.contains(&u) {
                        found.push(u);
                        grew = true;
                    }
                }
            }
            if !grew {
                return found.len();
            }
        }
    }

    #[test]
    fn product_basics() {
        let c2 = ConcreteGroup::cyclic(2, 2);
        let p = direct_product(&c2, &c2).unwrap();
        assert_eq!(p.group().order(), 4);
        assert_eq!(p.group().exponent(), 2);
        let p = direct_product(&q8(), &c2).unwrap();
        assert_eq!(p.group().order(), 16);
        assert_eq!(center(p.group()).order(), 4);
        for a in p.left().elements() {
            assert_eq!(p.pi1().image(p.iota1().image(a)), a);
            assert_eq!(p.pi2().image(p.iota1().image(a)), 0);
        }
        assert!(p.pi1().verify_exhaustive(p.group(), p.left()));
        assert!(p.iota2().verify_exhaustive(p.right(), p.group()));
        let c3 = ConcreteGroup::cyclic(3, 3);
        assert!(matches!(direct_product(&c2, &c3), Err(Error::PrimeMismatch { .. })));
        let big = ConcreteGroup::cyclic(128, 2);
        assert!(matches!(
            direct_product(&big, &big),
            Err(Error::OrderCapExceeded { order: 16384, .. })
        ));
    }

    #[test]
    fn diagonal_of_identity() {
        let c2 = ConcreteGroup::cyclic(2, 2);
        let p = direct_product(&c2, &c2).unwrap();
        let whole = Subgroup::whole(&c2);
        let triv = Subgroup::trivial(&c2);
        let t = GoursatTuple::new(&c2, &c2, whole.clone(), triv.clone(), whole, triv, vec![0, 1]).unwrap();
        let k = goursat_build(&p, &t).unwrap();
        assert_eq!(k.elements(), &[0, 3]);
        assert_eq!(goursat_decompose(&p, &k).unwrap(), t);
    }

    #[test]
    fn quaternion_into_cyclic() {
        let q = q8();
        let c4 = ConcreteGroup::cyclic(4, 2);
        let p = direct_product(&q, &c4).unwrap();
        let (i, j) = (q.generators()[0], q.generators()[1]);
        let h1 = Subgroup::whole(&q);
        let n1 = closure(&q, &[j]).unwrap();
        let h2 = Subgroup::whole(&c4);
        let n2 = closure(&c4, &[2]).unwrap();
        let t = GoursatTuple::from_matching(&q, &c4, h1, n1, h2, n2, &[(i, 1), (j, 0)]).unwrap();
        let k = goursat_build(&p, &t).unwrap();
        assert_eq!(k.order(), 16);
        // oracle: pairs (a, b) with a in <j> iff b even
        let jj = closure(&q, &[j]).unwrap();
        let count = p
            .group()
            .elements()
            .filter(|&x| {
                let (a, b) = p.split(x);
                jj.contains(a) == (b % 2 == 0)
            })
            .count();
        assert_eq!(count, 16);

        let lift = lift_generators(&p, &t).unwrap();
        assert!(lift.passed());
        assert!(lift.generators.len() <= generator_rank(&q, &Subgroup::whole(&q)).unwrap() + 1);

        let report = abelian_target_check(&p, &t).unwrap();
        assert!(report.passed());
        let minus_one = q.pow(i, 2);
        let dk = commutator_subgroup(p.group(), &k, &k).unwrap();
        let mut expected = [0, p.pair(minus_one, 0)];
        expected.sort_unstable();
        assert_eq!(dk.elements(), &expected[..]);
    }

    #[test]
    fn cyclic_extension_is_non_split() {
        for prime in [2u64, 3] {
            let cp = ConcreteGroup::cyclic(prime as usize, prime);
            let cp2 = ConcreteGroup::cyclic((prime * prime) as usize, prime);
            let p = direct_product(&cp, &cp2).unwrap();
            let h2 = Subgroup::whole(&cp2);
            let n2 = closure(&cp2, &[prime as usize]).unwrap();
            let t = GoursatTuple::from_matching(
                &cp,
                &cp2,
                Subgroup::whole(&cp),
                Subgroup::trivial(&cp),
                h2,
                n2,
                &[(1, 1)],
            )
            .unwrap();
            let k = goursat_build(&p, &t).unwrap();
            assert_eq!(k.order() as u64, prime * prime);
            assert!(k
                .elements()
                .iter()
                .any(|&x| p.group().element_order(x) as u64 == prime * prime));
            let report = abelian_target_check(&p, &t).unwrap();
            assert!(report.passed());
            assert_eq!(report.splitting, Splitting::NonSplitWitness);
            assert_eq!(report.k_ab.factors(), &[prime * prime]);
            assert_eq!(report.n2_plus_h1_ab.factors(), &[prime, prime]);
        }
    }

    #[test]
    fn decompose_special_subgroups() {
        let d4 = group("gens: r,s; rels: r^4, s^2, (r s)^2");
        let c4 = ConcreteGroup::cyclic(4, 2);
        let p = direct_product(&d4, &c4).unwrap();
        let t = goursat_decompose(&p, &Subgroup::whole(p.group())).unwrap();
        assert_eq!(t.h1(), &Subgroup::whole(&d4));
        assert_eq!(t.n1(), &Subgroup::whole(&d4));
        assert_eq!(t.n2(), &Subgroup::whole(&c4));
        assert_eq!(t.q1().order(), 1);
        let left = p.embed_left(&Subgroup::whole(&d4)).unwrap();
        let t = goursat_decompose(&p, &left).unwrap();
        assert_eq!(t.n1().order(), 8);
        assert!(t.h2().is_trivial() && t.n2().is_trivial());

        let p = direct_product(&c4, &c4).unwrap();
        let diag = closure(p.group(), &[p.pair(1, 1)]).unwrap();
        let t = goursat_decompose(&p, &diag).unwrap();
        assert_eq!(t.h1().order(), 4);
        assert!(t.n1().is_trivial());
        assert_eq!(t.h2().order(), 4);
        assert!(t.phi().is_bijective(t.q2().group()));
    }

    #[test]
    fn invalid_tuples_report_the_broken_condition() {
        let d4 = group("gens: r,s; rels: r^4, s^2, (r s)^2");
        let c2 = ConcreteGroup::cyclic(2, 2);
        let s = d4.generators()[1];
        let not_normal = closure(&d4, &[s]).unwrap();
        let err = GoursatTuple::new(
            &d4,
            &c2,
            Subgroup::whole(&d4),
            not_normal,
            Subgroup::whole(&c2),
            Subgroup::trivial(&c2),
            vec![0, 1],
        )
        .unwrap_err();
        assert_eq!(err, Error::InvalidTuple("N1 is not normal in H1".into()));
        let err = GoursatTuple::new(
            &c2,
            &c2,
            Subgroup::whole(&c2),
            Subgroup::trivial(&c2),
            Subgroup::whole(&c2),
            Subgroup::whole(&c2),
            vec![0, 0],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidTuple(m) if m.starts_with("quotient orders differ")));
        let err = GoursatTuple::new(
            &c2,
            &c2,
            Subgroup::whole(&c2),
            Subgroup::trivial(&c2),
            Subgroup::whole(&c2),
            Subgroup::trivial(&c2),
            vec![0, 0],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidTuple(m) if m.contains("phi")));
    }

    #[test]
    fn census_small_products() {
        let c2 = ConcreteGroup::cyclic(2, 2);
        let c4 = ConcreteGroup::cyclic(4, 2);
        let c3 = ConcreteGroup::cyclic(3, 3);
        for (a, b) in [(&c2, &c2), (&c2, &c4), (&c3, &c3)] {
            let report = goursat_census(a, b).unwrap();
            let p = direct_product(a, b).unwrap();
            assert_eq!(report.subgroup_count, oracle_subgroup_count(p.group()));
            assert!(report.passed(), "{report:?}");
        }
        assert_eq!(goursat_census(&c2, &c2).unwrap().subgroup_count, 5);
        assert_eq!(goursat_census(&c2, &c4).unwrap().subgroup_count, 8);
        assert_eq!(goursat_census(&c3, &c3).unwrap().subgroup_count, 6);
    }

    #[test]
    fn sampling_is_deterministic() {
        let d4 = group("gens: r,s; rels: r^4, s^2, (r s)^2");
        let c4 = ConcreteGroup::cyclic(4, 2);
        let a = sample_tuples(&d4, &c4, 10, 7, true).unwrap();
        let b = sample_tuples(&d4, &c4, 10, 7, true).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        let p = direct_product(&d4, &c4).unwrap();
        for t in &a {
            let k = goursat_build(&p, t).unwrap();
            assert_eq!(k.order(), t.n2().order() * t.h1().order());
            assert!(abelian_target_check(&p, t).unwrap().passed());
        }
    }
}

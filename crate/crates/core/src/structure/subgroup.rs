use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::group::{ConcreteGroup, GroupId};

/// A subgroup of a [`ConcreteGroup`], stored as a sorted element list plus a
/// membership bitset.
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: GroupId,
    elements: Vec<usize>,
    members: FixedBitSet,
    generators: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.elements.hash(state);
    }
}

/// Canonical order: by size, then lexicographically by sorted elements.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elements
            .len()
            .cmp(&other.elements.len())
            .then_with(|| self.elements.cmp(&other.elements))
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Subgroup {
    pub fn trivial(g: &ConcreteGroup) -> Subgroup {
        Generator::new(g).finish()
    }

    pub fn whole(g: &ConcreteGroup) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(g.order());
        members.insert_range(..);
        Subgroup {
            parent: g.id(),
            elements: g.elements().collect(),
            members,
            generators: g.generators().iter().copied().filter(|&x| x != 0).collect(),
        }
    }

    /// Accepts an element set if it is a subgroup of `g`. Generators are
    /// chosen greedily from the smallest elements.
    pub fn from_elements(g: &ConcreteGroup, elements: impl IntoIterator<Item = usize>) -> Result<Subgroup> {
        let mut set = FixedBitSet::with_capacity(g.order());
        for x in elements {
            g.check_index(x)?;
            set.insert(x);
        }
        Subgroup::from_members(g, set)
    }

    pub(crate) fn from_members(g: &ConcreteGroup, set: FixedBitSet) -> Result<Subgroup> {
        if !set.contains(0) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        let mut gen = Generator::new(g);
        for x in set.ones() {
            if !gen.members.contains(x) {
                gen.add(x);
                if !gen.members.is_subset(&set) {
                    return Err(Error::NotASubgroup(format!(
                        "products involving element {x} leave the set"
                    )));
                }
            }
        }
        Ok(gen.finish())
    }

    pub fn parent(&self) -> GroupId {
        self.parent
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.members.is_subset(&other.members)
    }

    pub(crate) fn check_parent(&self, g: &ConcreteGroup) -> Result<()> {
        if self.parent == g.id() {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub(crate) fn with_generators(mut self, generators: Vec<usize>) -> Subgroup {
        self.generators = generators;
        self
    }

    pub fn intersection(&self, g: &ConcreteGroup, other: &Subgroup) -> Result<Subgroup> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch);
        }
        let mut set = self.members.clone();
        set.intersect_with(&other.members);
        Subgroup::from_members(g, set)
    }

    pub fn is_abelian(&self, g: &ConcreteGroup) -> bool {
        let gens = &self.generators;
        gens.iter()
            .enumerate()
            .all(|(k, &a)| gens[k + 1..].iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
    }

    /// Checks `self ⊴ within`; the error carries a conjugation counterexample.
    pub fn check_normal_in(&self, g: &ConcreteGroup, within: &Subgroup) -> Result<()> {
        if !self.is_subgroup_of(within) {
            return Err(Error::NotASubgroup("not contained in the ambient subgroup".into()));
        }
        for &x in within.generators() {
            for &n in &self.generators {
                if !self.contains(g.conjugate(n, x)) {
                    return Err(Error::NotNormal {
                        element: n,
                        conjugator: x,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_normal_in(&self, g: &ConcreteGroup, within: &Subgroup) -> bool {
        self.check_normal_in(g, within).is_ok()
    }

    /// Whether `x` normalizes this subgroup.
    pub fn is_normalized_by(&self, g: &ConcreteGroup, x: usize) -> bool {
        self.generators.iter().all(|&n| self.contains(g.conjugate(n, x)))
    }
}

/// Incremental subgroup generation (Dimino's algorithm): the current subgroup
/// is kept as a union of right cosets of the previous one.
pub(crate) struct Generator<'g> {
    g: &'g ConcreteGroup,
    elements: Vec<usize>,
    members: FixedBitSet,
    gens: Vec<usize>,
}

impl<'g> Generator<'g> {
    pub(crate) fn new(g: &'g ConcreteGroup) -> Self {
        let mut members = FixedBitSet::with_capacity(g.order());
        members.insert(0);
        Generator {
            g,
            elements: vec![0],
            members,
            gens: Vec::new(),
        }
    }

    pub(crate) fn from_subgroup(g: &'g ConcreteGroup, h: &Subgroup) -> Self {
        Generator {
            g,
            elements: h.elements.clone(),
            members: h.members.clone(),
            gens: h.generators.clone(),
        }
    }

    pub(crate) fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub(crate) fn order(&self) -> usize {
        self.elements.len()
    }

    /// Adjoins `x`; returns whether the subgroup grew.
    pub(crate) fn add(&mut self, x: usize) -> bool {
        if self.members.contains(x) {
            return false;
        }
        let g = self.g;
        self.gens.push(x);
        let base = self.elements.len();
        let mut reps = vec![0usize];
        let mut k = 0;
        while k < reps.len() {
            let r = reps[k];
            k += 1;
            for gi in 0..self.gens.len() {
                let y = g.mul(r, self.gens[gi]);
                if !self.members.contains(y) {
                    reps.push(y);
                    for i in 0..base {
                        let z = g.mul(self.elements[i], y);
                        self.members.insert(z);
                        self.elements.push(z);
                    }
                }
            }
        }
        true
    }

    pub(crate) fn extend(&mut self, xs: impl IntoIterator<Item = usize>) {
        for x in xs {
            self.add(x);
        }
    }

    pub(crate) fn finish(mut self) -> Subgroup {
        self.elements.sort_unstable();
        Subgroup {
            parent: self.g.id(),
            elements: self.elements,
            members: self.members,
            generators: self.gens,
        }
    }
}

/// Subgroup generated by `seed`, with an irredundant generator list.
pub(crate) fn generate(g: &ConcreteGroup, seed: impl IntoIterator<Item = usize>) -> Subgroup {
    let mut gen = Generator::new(g);
    gen.extend(seed);
    gen.finish()
}

/// Smallest subgroup containing `seed`; its generators are the seed itself.
pub fn closure(g: &ConcreteGroup, seed: &[usize]) -> Result<Subgroup> {
    for &x in seed {
        g.check_index(x)?;
    }
    let mut gens = Vec::new();
    for &x in seed {
        if !gens.contains(&x) {
            gens.push(x);
        }
    }
    Ok(generate(g, seed.iter().copied()).with_generators(gens))
}

/// Normal closure of `seed` inside the subgroup generated by `conjugators`.
pub(crate) fn normal_closure_under(
    g: &ConcreteGroup,
    conjugators: &[usize],
    seed: impl IntoIterator<Item = usize>,
) -> Subgroup {
    let mut gen = Generator::new(g);
    gen.extend(seed);
    let mut k = 0;
    // gens grows as conjugates are adjoined; every generator gets visited
    while k < gen.gens.len() {
        let n = gen.gens[k];
        k += 1;
        for &x in conjugators {
            let c = g.conjugate(n, x);
            gen.add(c);
        }
    }
    gen.finish()
}

/// Smallest normal subgroup of `g` containing `seed`.
pub fn normal_closure(g: &ConcreteGroup, seed: &[usize]) -> Result<Subgroup> {
    for &x in seed {
        g.check_index(x)?;
    }
    Ok(normal_closure_under(g, g.generators(), seed.iter().copied()))
}

/// Normal closure of `seed` inside the subgroup `within`.
pub fn normal_closure_in(g: &ConcreteGroup, within: &Subgroup, seed: &[usize]) -> Result<Subgroup> {
    within.check_parent(g)?;
    for &x in seed {
        g.check_index(x)?;
    }
    Ok(normal_closure_under(g, within.generators(), seed.iter().copied()))
}

/// `[A, B]`: the subgroup generated by all `[a, b]`.
///
/// Computed as the normal closure in `<A, B>` of the commutators of
/// generators, which is the same subgroup.
pub fn commutator_subgroup(g: &ConcreteGroup, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
    a.check_parent(g)?;
    b.check_parent(g)?;
    let mut seed = Vec::new();
    for &x in a.generators() {
        for &y in b.generators() {
            seed.push(g.commutator(x, y));
        }
    }
    let conj: Vec<usize> = a.generators().iter().chain(b.generators()).copied().collect();
    Ok(normal_closure_under(g, &conj, seed))
}

/// `H^k`: generated by all k-th powers.
pub fn power_subgroup(g: &ConcreteGroup, h: &Subgroup, k: u64) -> Result<Subgroup> {
    h.check_parent(g)?;
    let mut gen = Generator::new(g);
    for &x in h.elements() {
        let y = g.pow(x, k as i64);
        gen.add(y);
    }
    Ok(gen.finish())
}

/// `<A, B>`.
pub fn product(g: &ConcreteGroup, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
    a.check_parent(g)?;
    b.check_parent(g)?;
    let mut gen = Generator::from_subgroup(g, a);
    gen.extend(b.generators().iter().copied());
    Ok(gen.finish())
}

/// Whether the set product `AB` is itself a subgroup, i.e.
/// `|<A, B>| = |A||B| / |A ∩ B|`.
pub fn set_product_is_subgroup(g: &ConcreteGroup, a: &Subgroup, b: &Subgroup) -> Result<bool> {
    let joined = product(g, a, b)?;
    let meet = a.intersection(g, b)?;
    Ok(joined.order() * meet.order() == a.order() * b.order())
}

/// `Φ(H) = H^p [H, H]`.
pub fn frattini(g: &ConcreteGroup, h: &Subgroup) -> Result<Subgroup> {
    g.require_p_group()?;
    let powers = power_subgroup(g, h, g.prime())?;
    let derived = commutator_subgroup(g, h, h)?;
    let phi = product(g, &powers, &derived)?;
    debug_assert!(set_product_is_subgroup(g, &powers, &derived).unwrap_or(false));
    Ok(phi)
}

/// `γ1 = H, γ(n+1) = [γn, H]`, up to and including the first repeated term.
pub fn lower_central_series(g: &ConcreteGroup, h: &Subgroup) -> Result<Vec<Subgroup>> {
    h.check_parent(g)?;
    let mut series = vec![h.clone()];
    loop {
        let last = series.last().expect("non-empty");
        let next = commutator_subgroup(g, last, h)?;
        if next == *last {
            return Ok(series);
        }
        series.push(next);
    }
}

pub fn center(g: &ConcreteGroup) -> Subgroup {
    let gens = g.generators();
    let members = g
        .elements()
        .filter(|&z| gens.iter().all(|&x| g.mul(z, x) == g.mul(x, z)));
    generate(g, members)
}

/// Centralizer of the subgroup `h` in `g`.
pub fn centralizer(g: &ConcreteGroup, h: &Subgroup) -> Result<Subgroup> {
    h.check_parent(g)?;
    let gens = h.generators();
    Ok(generate(
        g,
        g.elements()
            .filter(|&z| gens.iter().all(|&x| g.mul(z, x) == g.mul(x, z))),
    ))
}

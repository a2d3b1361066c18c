use crate::error::Result;
use crate::group::ConcreteGroup;
use crate::structure::hom::Homomorphism;
use crate::structure::subgroup::Subgroup;

const NONE: u32 = u32::MAX;

/// `H/N` materialized as a group, with the coset labelling of `H`.
///
/// Cosets are numbered by their smallest parent element, so the identity
/// coset is `0` and the numbering depends only on `H` and `N`.
#[derive(Debug, Clone)]
pub struct Quotient {
    group: ConcreteGroup,
    coset_of: Vec<u32>,
    reps: Vec<usize>,
}

impl Quotient {
    /// Builds `within / normal`. Fails when `normal` is not normal in `within`.
    pub fn new(g: &ConcreteGroup, within: &Subgroup, normal: &Subgroup) -> Result<Quotient> {
        within.check_parent(g)?;
        normal.check_parent(g)?;
        normal.check_normal_in(g, within)?;

        let mut coset_of = vec![NONE; g.order()];
        let mut reps = Vec::with_capacity(within.order() / normal.order());
        for &x in within.elements() {
            if coset_of[x] != NONE {
                continue;
            }
            let label = reps.len() as u32;
            reps.push(x);
            for &n in normal.elements() {
                coset_of[g.mul(x, n)] = label;
            }
        }
        let m = reps.len();
        let rule = |a: usize, b: usize| coset_of[g.mul(reps[a], reps[b])] as usize;
        let generators: Vec<usize> = within.generators().iter().map(|&x| coset_of[x] as usize).collect();
        let names = (0..generators.len()).map(|k| format!("q{k}")).collect();
        let group = ConcreteGroup::from_rule(m, rule, generators, names, g.prime());
        Ok(Quotient { group, coset_of, reps })
    }

    pub fn group(&self) -> &ConcreteGroup {
        &self.group
    }

    pub fn into_group(self) -> ConcreteGroup {
        self.group
    }

    /// Coset label of a parent element of the ambient subgroup.
    #[inline]
    pub fn coset_of(&self, x: usize) -> Option<usize> {
        let c = self.coset_of[x];
        (c != NONE).then_some(c as usize)
    }

    /// Smallest parent element in the given coset.
    pub fn representative(&self, coset: usize) -> usize {
        self.reps[coset]
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }
}

/// `G/N` together with the natural projection.
pub fn quotient(g: &ConcreteGroup, n: &Subgroup) -> Result<(ConcreteGroup, Homomorphism)> {
    let q = Quotient::new(g, &Subgroup::whole(g), n)?;
    let images = g.elements().map(|x| q.coset_of[x] as usize).collect();
    let mut group = q.group;
    // parent witness words carry over: quotient generators are the images of
    // the parent generators in the same order
    if let Some(words) = g.element_words() {
        let reps_words = q.reps.iter().map(|&r| words[r].clone()).collect();
        group.set_words(Some(reps_words));
    }
    let names = g.generator_names().to_vec();
    let group = rename(group, names);
    let projection = Homomorphism::new_unchecked(g, &group, images);
    Ok((group, projection))
}

fn rename(g: ConcreteGroup, names: Vec<String>) -> ConcreteGroup {
    let mut out = g;
    out.rename_generators(names);
    out
}

/// Materializes a subgroup as a group of its own; element `k` of the result
/// is the `k`-th smallest element of `h`. Returns the inclusion map.
pub fn subgroup_as_group(g: &ConcreteGroup, h: &Subgroup) -> Result<(ConcreteGroup, Homomorphism)> {
    let trivial = Subgroup::trivial(g);
    let q = Quotient::new(g, h, &trivial)?;
    let inclusion: Vec<usize> = q.reps.clone();
    let group = q.group;
    let incl = Homomorphism::new_unchecked(&group, g, inclusion);
    Ok((group, incl))
}

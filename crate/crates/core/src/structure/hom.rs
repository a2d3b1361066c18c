use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{ConcreteGroup, GroupId};
use crate::presentation::Word;
use crate::structure::subgroup::{generate, Subgroup};

const UNSET: usize = usize::MAX;

/// A validated homomorphism between two materialized groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: GroupId,
    target: GroupId,
    images: Vec<usize>,
}

impl Homomorphism {
    /// Checks `images` on every (element, generator) edge of the source,
    /// which is equivalent to the full multiplicativity condition.
    pub fn new(source: &ConcreteGroup, target: &ConcreteGroup, images: Vec<usize>) -> Result<Self> {
        if images.len() != source.order() {
            return Err(Error::ImageCountMismatch {
                expected: source.order(),
                found: images.len(),
            });
        }
        for &y in &images {
            target.check_index(y)?;
        }
        if images[0] != 0 {
            return Err(Error::NotHomomorphism { left: 0, right: 0 });
        }
        for a in source.elements() {
            for &x in source.generators() {
                if images[source.mul(a, x)] != target.mul(images[a], images[x]) {
                    return Err(Error::NotHomomorphism { left: a, right: x });
                }
            }
        }
        Ok(Homomorphism {
            source: source.id(),
            target: target.id(),
            images,
        })
    }

    pub(crate) fn new_unchecked(source: &ConcreteGroup, target: &ConcreteGroup, images: Vec<usize>) -> Self {
        Homomorphism {
            source: source.id(),
            target: target.id(),
            images,
        }
    }

    pub fn source(&self) -> GroupId {
        self.source
    }

    pub fn target(&self) -> GroupId {
        self.target
    }

    #[inline]
    pub fn image(&self, a: usize) -> usize {
        self.images[a]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn kernel(&self, source: &ConcreteGroup) -> Subgroup {
        generate(source, source.elements().filter(|&a| self.images[a] == 0))
    }

    pub fn image_subgroup(&self, target: &ConcreteGroup) -> Subgroup {
        generate(target, self.images.iter().copied())
    }

    pub fn is_injective(&self) -> bool {
        self.images.iter().skip(1).all(|&y| y != 0)
    }

    pub fn is_surjective(&self, target: &ConcreteGroup) -> bool {
        let mut seen = vec![false; target.order()];
        for &y in &self.images {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self, target: &ConcreteGroup) -> bool {
        self.images.len() == target.order() && self.is_injective()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if other.source != self.target {
            return Err(Error::ParentMismatch);
        }
        Ok(Homomorphism {
            source: self.source,
            target: other.target,
            images: self.images.iter().map(|&y| other.images[y]).collect(),
        })
    }

    /// Image of a subgroup of the source.
    pub fn map_subgroup(&self, target: &ConcreteGroup, h: &Subgroup) -> Subgroup {
        generate(target, h.generators().iter().map(|&x| self.images[x]))
    }

    /// Exhaustive `f(ab) = f(a)f(b)` check over all pairs.
    pub fn verify_exhaustive(&self, source: &ConcreteGroup, target: &ConcreteGroup) -> bool {
        source.elements().all(|a| {
            source
                .elements()
                .all(|b| self.images[source.mul(a, b)] == target.mul(self.images[a], self.images[b]))
        })
    }
}

/// Extends `gens[k] -> images[k]` along a breadth-first spanning tree of the
/// subgroup generated by `gens`. On a clash returns the relation
/// `w(a) x_k w(a x_k)^-1` (over the indices of `gens`) that fails in the target.
pub(crate) fn extend_assignment(
    source: &ConcreteGroup,
    target: &ConcreteGroup,
    gens: &[usize],
    images: &[usize],
) -> std::result::Result<Vec<usize>, Word> {
    let n = source.order();
    let mut map = vec![UNSET; n];
    let mut tree: Vec<Option<(usize, usize)>> = vec![None; n];
    map[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for (k, (&x, &y)) in gens.iter().zip(images).enumerate() {
            let b = source.mul(a, x);
            let want = target.mul(map[a], y);
            if map[b] == UNSET {
                map[b] = want;
                tree[b] = Some((a, k));
                queue.push_back(b);
            } else if map[b] != want {
                let path = |mut e: usize| {
                    let mut letters = Vec::new();
                    while let Some((prev, k)) = tree[e] {
                        letters.push(k);
                        e = prev;
                    }
                    Word::from_factors(letters.into_iter().rev().map(|k| (k, 1)))
                };
                let relation = path(a).mul(&Word::generator(k)).mul(&path(b).inverse());
                return Err(relation);
            }
        }
    }
    Ok(map)
}

/// The homomorphism sending generator `i` of `g` to `images[i]`, if the
/// assignment respects every relation of `g`.
pub fn hom_from_images(g: &ConcreteGroup, h: &ConcreteGroup, images: &[usize]) -> Result<Homomorphism> {
    if images.len() != g.generators().len() {
        return Err(Error::ImageCountMismatch {
            expected: g.generators().len(),
            found: images.len(),
        });
    }
    for &y in images {
        h.check_index(y)?;
    }
    let map =
        extend_assignment(g, h, g.generators(), images).map_err(|relation| Error::RelationViolated { relation })?;
    if map.contains(&UNSET) {
        return Err(Error::Precondition("generators do not reach every element".into()));
    }
    Ok(Homomorphism::new_unchecked(g, h, map))
}

/// Like [`hom_from_images`] for an arbitrary generating set of `g`.
pub fn hom_from_assignment(
    g: &ConcreteGroup,
    h: &ConcreteGroup,
    sources: &[usize],
    images: &[usize],
) -> Result<Homomorphism> {
    if images.len() != sources.len() {
        return Err(Error::ImageCountMismatch {
            expected: sources.len(),
            found: images.len(),
        });
    }
    for &x in sources {
        g.check_index(x)?;
    }
    for &y in images {
        h.check_index(y)?;
    }
    let map = extend_assignment(g, h, sources, images).map_err(|relation| Error::RelationViolated { relation })?;
    if map.contains(&UNSET) {
        return Err(Error::Precondition(
            "assigned elements do not generate the source".into(),
        ));
    }
    Ok(Homomorphism::new_unchecked(g, h, map))
}

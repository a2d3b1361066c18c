use crate::group::ConcreteGroup;
use crate::structure::hom::{extend_assignment, Homomorphism};
use crate::structure::invariants::{abelian_invariants, minimal_generators, AbelianInvariants};
use crate::structure::subgroup::{center, generate, lower_central_series, Subgroup};

const UNSET: usize = usize::MAX;

/// Isomorphism invariants compared before any search.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub order: usize,
    pub exponent: usize,
    pub order_census: Vec<(usize, usize)>,
    pub center_order: usize,
    pub lower_central_orders: Vec<usize>,
    pub abelian_invariants: Option<AbelianInvariants>,
}

pub fn fingerprint(g: &ConcreteGroup) -> Fingerprint {
    let whole = Subgroup::whole(g);
    let census = g.order_census();
    Fingerprint {
        order: g.order(),
        exponent: census.iter().map(|&(o, _)| o).max().unwrap_or(1),
        order_census: census,
        center_order: center(g).order(),
        lower_central_orders: lower_central_series(g, &whole)
            .map(|s| s.iter().map(Subgroup::order).collect())
            .unwrap_or_default(),
        abelian_invariants: abelian_invariants(g, &whole).ok(),
    }
}

/// Generators used as the search frame: a Burnside basis for p-groups,
/// otherwise an irredundant subset of the stored generators.
fn search_frame(g: &ConcreteGroup) -> Vec<usize> {
    if g.is_p_group() {
        if let Ok(gens) = minimal_generators(g, &Subgroup::whole(g)) {
            return gens;
        }
    }
    let mut frame = Vec::new();
    let mut span = generate(g, std::iter::empty());
    for &x in g.generators() {
        if !span.contains(x) {
            frame.push(x);
            span = generate(g, frame.iter().copied());
        }
    }
    frame
}

struct Search<'a> {
    source: &'a ConcreteGroup,
    target: &'a ConcreteGroup,
    frame: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    images: Vec<usize>,
    found: Vec<Homomorphism>,
    stop_at_first: bool,
}

impl Search<'_> {
    fn run(&mut self, level: usize) {
        if self.stop_at_first && !self.found.is_empty() {
            return;
        }
        if level == self.frame.len() {
            let map = extend_assignment(self.source, self.target, &self.frame, &self.images)
                .expect("checked at the previous level");
            self.found
                .push(Homomorphism::new_unchecked(self.source, self.target, map));
            return;
        }
        for k in 0..self.candidates[level].len() {
            let y = self.candidates[level][k];
            self.images.push(y);
            if self.partial_ok(level + 1) {
                self.run(level + 1);
            }
            self.images.pop();
            if self.stop_at_first && !self.found.is_empty() {
                return;
            }
        }
    }

    /// The assignment on the first `depth` frame elements extends to an
    /// injective homomorphism of the subgroup they generate.
    fn partial_ok(&self, depth: usize) -> bool {
        let Ok(map) = extend_assignment(self.source, self.target, &self.frame[..depth], &self.images[..depth]) else {
            return false;
        };
        let mut seen = vec![false; self.target.order()];
        for &y in map.iter().filter(|&&y| y != UNSET) {
            if seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }
}

fn search(g: &ConcreteGroup, h: &ConcreteGroup, stop_at_first: bool) -> Vec<Homomorphism> {
    if g.order() != h.order() || fingerprint(g) != fingerprint(h) {
        return Vec::new();
    }
    let frame = search_frame(g);
    let target_orders: Vec<usize> = h.elements().map(|y| h.element_order(y)).collect();
    let candidates = frame
        .iter()
        .map(|&x| {
            let want = g.element_order(x);
            let mut c: Vec<usize> = h.elements().filter(|&y| target_orders[y] == want).collect();
            c.sort_by_key(|&y| (target_orders[y], y));
            c
        })
        .collect();
    let mut s = Search {
        source: g,
        target: h,
        frame,
        candidates,
        images: Vec::new(),
        found: Vec::new(),
        stop_at_first,
    };
    s.run(0);
    s.found
}

/// Some isomorphism `g -> h`, or `None` when none exists. The search is
/// exhaustive, so `None` proves non-isomorphism.
pub fn find_isomorphism(g: &ConcreteGroup, h: &ConcreteGroup) -> Option<Homomorphism> {
    search(g, h, true).into_iter().next()
}

/// Every isomorphism `g -> h`.
pub fn all_isomorphisms(g: &ConcreteGroup, h: &ConcreteGroup) -> Vec<Homomorphism> {
    search(g, h, false)
}

pub fn are_isomorphic(g: &ConcreteGroup, h: &ConcreteGroup) -> bool {
    find_isomorphism(g, h).is_some()
}

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::group::ConcreteGroup;
use crate::structure::quotient::Quotient;
use crate::structure::subgroup::{commutator_subgroup, frattini, power_subgroup, Generator, Subgroup};
use crate::util::log_p;

/// Elementary divisors of an abelian p-group, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AbelianInvariants(Vec<u64>);

impl AbelianInvariants {
    pub fn new(mut factors: Vec<u64>) -> Self {
        factors.retain(|&f| f > 1);
        factors.sort_unstable();
        AbelianInvariants(factors)
    }

    pub fn factors(&self) -> &[u64] {
        &self.0
    }

    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, factor: u64) -> bool {
        self.0.contains(&factor)
    }

    /// Invariants of the direct sum.
    pub fn direct_sum(&self, other: &AbelianInvariants) -> AbelianInvariants {
        AbelianInvariants::new(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Elementary divisors of `H/[H,H]`, read off the orders of the successive
/// p-power subgroups `A, A^p, A^(p^2), ...` of the abelianization `A`.
pub fn abelian_invariants(g: &ConcreteGroup, h: &Subgroup) -> Result<AbelianInvariants> {
    g.require_p_group()?;
    h.check_parent(g)?;
    let derived = commutator_subgroup(g, h, h)?;
    let q = Quotient::new(g, h, &derived)?;
    Ok(invariants_of_abelian(q.group()))
}

/// Elementary divisors of an abelian p-group given as a table.
pub(crate) fn invariants_of_abelian(a: &ConcreteGroup) -> AbelianInvariants {
    let p = a.prime();
    let mut layer = Subgroup::whole(a);
    let mut sizes = vec![layer.order()];
    while !layer.is_trivial() {
        layer = power_subgroup(a, &layer, p).expect("same parent");
        sizes.push(layer.order());
    }
    // ranks[i] = number of cyclic factors of order > p^i
    let ranks: Vec<u32> = sizes
        .windows(2)
        .map(|w| log_p(w[0] / w[1], p).expect("p-group layers"))
        .collect();
    let mut factors = Vec::new();
    for (i, &r) in ranks.iter().enumerate() {
        let next = ranks.get(i + 1).copied().unwrap_or(0);
        for _ in 0..(r - next) {
            factors.push(p.pow(i as u32 + 1));
        }
    }
    AbelianInvariants::new(factors)
}

/// A Burnside basis of `H`: greedy over ascending element indices, keeping an
/// element when it is not already in `<chosen> Φ(H)`.
pub fn minimal_generators(g: &ConcreteGroup, h: &Subgroup) -> Result<Vec<usize>> {
    let phi = frattini(g, h)?;
    let mut span = Generator::from_subgroup(g, &phi);
    let mut chosen = Vec::new();
    for &x in h.elements() {
        if span.order() == h.order() {
            break;
        }
        if !span.contains(x) {
            span.add(x);
            chosen.push(x);
        }
    }
    Ok(chosen)
}

/// `d(H)`, the size of a minimal generating set.
pub fn generator_rank(g: &ConcreteGroup, h: &Subgroup) -> Result<usize> {
    Ok(minimal_generators(g, h)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerator::{enumerate, DEFAULT_MAX_COSETS};
    use crate::presentation::parse_presentation;
    use crate::structure::subgroup::closure;

    fn group(text: &str) -> ConcreteGroup {
        enumerate(&parse_presentation(text).unwrap(), DEFAULT_MAX_COSETS).unwrap()
    }

    /// Number of x with x^(p^i) = 1 in ⊕ Z/p^e is Π p^min(e, i).
    fn predicted_torsion(inv: &AbelianInvariants, p: u64, i: u32) -> u64 {
        inv.factors()
            .iter()
            .map(|&f| {
                let e = log_p(f as usize, p).unwrap();
                p.pow(e.min(i))
            })
            .product()
    }

    fn check_against_torsion_counts(g: &ConcreteGroup) {
        let h = Subgroup::whole(g);
        let inv = abelian_invariants(g, &h).unwrap();
        let derived = commutator_subgroup(g, &h, &h).unwrap();
        let q = Quotient::new(g, &h, &derived).unwrap();
        let a = q.group();
        assert_eq!(inv.order() as usize, a.order());
        let p = g.prime();
        for i in 0..6 {
            let k = p.pow(i) as i64;
            let count = a.elements().filter(|&x| a.pow(x, k) == 0).count() as u64;
            assert_eq!(count, predicted_torsion(&inv, p, i), "i = {i}");
        }
    }

    #[test]
    fn quaternion_invariants() {
        let g = group("gens: i,j; rels: i^4, i^2 j^-2, j^-1 i j i");
        assert_eq!(abelian_invariants(&g, &Subgroup::whole(&g)).unwrap().factors(), &[2, 2]);
        check_against_torsion_counts(&g);
    }

    #[test]
    fn modular_group_invariants() {
        let g = group("gens: x,y; rels: x^8, y^2, y^-1 x y = x^5");
        assert_eq!(abelian_invariants(&g, &Subgroup::whole(&g)).unwrap().factors(), &[2, 4]);
        check_against_torsion_counts(&g);
    }

    #[test]
    fn reference_group_invariants() {
        let g = group("gens: x1,x2; rels: x1^4, x2^4, [x1,x2]^2, [x1,x2,x1], [x1,x2,x2]");
        assert_eq!(abelian_invariants(&g, &Subgroup::whole(&g)).unwrap().factors(), &[4, 4]);
        check_against_torsion_counts(&g);
        let g = group("gens: a,b,c; rels: a^2, b^4, c^8, [a,b], [a,c], [b,c]");
        assert_eq!(
            abelian_invariants(&g, &Subgroup::whole(&g)).unwrap().factors(),
            &[2, 4, 8]
        );
        check_against_torsion_counts(&g);
    }

    #[test]
    fn burnside_basis_sizes() {
        let c3 = ConcreteGroup::cyclic(3, 3);
        assert_eq!(minimal_generators(&c3, &Subgroup::whole(&c3)).unwrap(), vec![1]);
        let q8 = group("gens: i,j; rels: i^4, i^2 j^-2, j^-1 i j i");
        let gens = minimal_generators(&q8, &Subgroup::whole(&q8)).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(closure(&q8, &gens).unwrap().order(), 8);
        let r3 = group("gens: x1,x2; rels: x1^3, x2^3, [x1,x2]^3, [x1,x2,x1], [x1,x2,x2]");
        assert_eq!(generator_rank(&r3, &Subgroup::whole(&r3)).unwrap(), 2);
        let triv = ConcreteGroup::cyclic(1, 2);
        assert!(minimal_generators(&triv, &Subgroup::whole(&triv)).unwrap().is_empty());
    }

    #[test]
    fn not_a_p_group_rejected() {
        let c6 = ConcreteGroup::cyclic(6, 2);
        assert!(abelian_invariants(&c6, &Subgroup::whole(&c6)).is_err());
    }
}

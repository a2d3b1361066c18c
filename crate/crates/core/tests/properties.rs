use std::sync::OnceLock;

use pgroup_core::corpus::{builtin, CorpusEntry, SUPPORTED_PRIMES};
use pgroup_core::goursat::{direct_product, goursat_build, goursat_decompose, sample_tuples};
use pgroup_core::resistance::commutator_identity_check;
use pgroup_core::structure::{
    are_isomorphic, closure, find_isomorphism, frattini, minimal_generators, normal_closure, quotient,
};
use pgroup_core::{log_p, parse_presentation, validate_group, ConcreteGroup, Presentation, Word};
use proptest::prelude::*;

fn catalog() -> &'static [CorpusEntry] {
    static CATALOG: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| SUPPORTED_PRIMES.iter().flat_map(|&p| builtin(p).unwrap()).collect())
}

fn entry() -> impl Strategy<Value = &'static CorpusEntry> {
    (0..catalog().len()).prop_map(|i| &catalog()[i])
}

/// A catalog group with a few raw element seeds, reduced modulo its order.
fn group_with_elements(k: usize) -> impl Strategy<Value = (&'static CorpusEntry, Vec<usize>)> {
    (entry(), prop::collection::vec(any::<usize>(), k))
        .prop_map(|(e, xs)| (e, xs.into_iter().map(|x| x % e.group.order()).collect()))
}

fn word(gens: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..gens, -5i64..=5), 0..8).prop_map(Word::from_factors)
}

fn is_reduced(w: &Word) -> bool {
    let f = w.factors();
    f.iter().all(|&(_, e)| e != 0) && f.windows(2).all(|p| p[0].0 != p[1].0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_stay_reduced(a in word(3), b in word(3)) {
        prop_assert!(is_reduced(&a));
        prop_assert!(is_reduced(&a.mul(&b)));
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert_eq!(a.mul(&b).inverse(), b.inverse().mul(&a.inverse()));
    }

    #[test]
    fn presentation_print_parse_round_trip(rels in prop::collection::vec(word(3), 0..5), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let pres = Presentation::new(names, rels, p).unwrap();
        let again = parse_presentation(&pres.to_string()).unwrap();
        prop_assert_eq!(again, pres);
    }

    #[test]
    fn commutator_inverse_law((e, xs) in group_with_elements(2)) {
        let g = &e.group;
        let (a, b) = (xs[0], xs[1]);
        prop_assert_eq!(g.mul(g.commutator(a, b), g.commutator(b, a)), 0);
        prop_assert_eq!(g.order() % g.element_order(a), 0);
        prop_assert_eq!(g.pow(a, -1), g.inv(a));
    }

    #[test]
    fn lagrange_and_quotients((e, xs) in group_with_elements(2)) {
        let g = &e.group;
        let h = closure(g, &xs).unwrap();
        prop_assert_eq!(g.order() % h.order(), 0);
        let n = normal_closure(g, &xs[..1]).unwrap();
        let (q, proj) = quotient(g, &n).unwrap();
        prop_assert_eq!(q.order() * n.order(), g.order());
        prop_assert!(validate_group(&q).passed());
        prop_assert_eq!(proj.kernel(g), n);
    }

    #[test]
    fn burnside_basis((e, xs) in group_with_elements(3)) {
        let g = &e.group;
        let h = closure(g, &xs).unwrap();
        let basis = minimal_generators(g, &h).unwrap();
        let phi = frattini(g, &h).unwrap();
        prop_assert_eq!(Some(basis.len() as u32), log_p(h.order() / phi.order(), g.prime()));
        prop_assert_eq!(closure(g, &basis).unwrap(), h);
    }

    #[test]
    fn isomorphism_is_symmetric(a in entry(), b in entry()) {
        prop_assume!(a.group.order() == b.group.order());
        prop_assert_eq!(are_isomorphic(&a.group, &b.group), are_isomorphic(&b.group, &a.group));
    }

    #[test]
    fn relabelled_group_is_isomorphic((e, perm) in entry().prop_flat_map(|e| {
        (Just(e), Just((1..e.group.order()).collect::<Vec<_>>()).prop_shuffle())
    })) {
        let g = &e.group;
        let relabelled = relabel(g, &perm);
        prop_assert!(validate_group(&relabelled).passed());
        let iso = find_isomorphism(g, &relabelled).expect("relabelling is an isomorphism");
        prop_assert!(iso.is_bijective(&relabelled));
    }

    #[test]
    fn identities_hold(e in entry()) {
        prop_assert!(commutator_identity_check(&e.group).unwrap().passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn goursat_round_trip(a in entry(), b in entry(), seed in any::<u64>()) {
        prop_assume!(a.group.prime() == b.group.prime() && a.group.order() * b.group.order() <= 256);
        let prod = direct_product(&a.group, &b.group).unwrap();
        for t in sample_tuples(&a.group, &b.group, 4, seed, false).unwrap() {
            let k = goursat_build(&prod, &t).unwrap();
            prop_assert_eq!(k.order() * t.q1().order(), t.h1().order() * t.h2().order());
            let back = goursat_decompose(&prod, &k).unwrap();
            prop_assert!(back == t);
            prop_assert_eq!(goursat_build(&prod, &back).unwrap(), k);
        }
    }
}

/// Relabels the non-identity elements: `a` becomes `perm[a - 1]`.
fn relabel(g: &ConcreteGroup, perm: &[usize]) -> ConcreteGroup {
    let n = g.order();
    let map = |a: usize| if a == 0 { 0 } else { perm[a - 1] };
    let mut table = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            table[map(a)][map(b)] = map(g.mul(a, b));
        }
    }
    let gens = g.generators().iter().map(|&x| map(x)).collect();
    ConcreteGroup::from_table(table, gens, g.prime()).unwrap()
}

//! Materialized finite groups backed by a full multiplication table.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentation::Word;
use crate::util::log_p;

const NONE: u32 = u32::MAX;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Identity of a materialized table. Clones share it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupId(u64);

impl GroupId {
    fn fresh() -> Self {
        GroupId(NEXT_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// A finite group given by its Cayley table. Element `0` is the identity.
#[derive(Debug, Clone)]
pub struct ConcreteGroup {
    id: GroupId,
    label: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    generators: Vec<usize>,
    generator_names: Vec<String>,
    words: Option<Vec<Word>>,
    prime: u64,
}

impl ConcreteGroup {
    /// Wraps a raw table. Only the shape and entry range are checked here;
    /// use [`validate_group`] for the group axioms.
    pub fn from_table(table: Vec<Vec<usize>>, generators: Vec<usize>, prime: u64) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotASubgroup("empty table".into()));
        }
        let mut mul = Vec::with_capacity(n * n);
        for row in &table {
            if row.len() != n {
                return Err(Error::NotASubgroup(format!(
                    "row of length {} in a table of order {n}",
                    row.len()
                )));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, order: n });
                }
                mul.push(x as u32);
            }
        }
        for &g in &generators {
            if g >= n {
                return Err(Error::IndexOutOfRange { index: g, order: n });
            }
        }
        let inv = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| mul[a * n + b] == 0 && mul[b * n + a] == 0)
                    .map_or(NONE, |b| b as u32)
            })
            .collect();
        let names = (0..generators.len()).map(|k| format!("g{k}")).collect();
        let mut g = ConcreteGroup::from_parts(mul, inv, generators, names, None, prime);
        if g.inv.iter().all(|&i| i != NONE) {
            g.words = spanning_words(&g);
        }
        Ok(g)
    }

    pub(crate) fn from_parts(
        mul: Vec<u32>,
        inv: Vec<u32>,
        generators: Vec<usize>,
        generator_names: Vec<String>,
        words: Option<Vec<Word>>,
        prime: u64,
    ) -> Self {
        let order = inv.len();
        debug_assert_eq!(mul.len(), order * order);
        ConcreteGroup {
            id: GroupId::fresh(),
            label: String::new(),
            order,
            mul,
            inv,
            generators,
            generator_names,
            words,
            prime,
        }
    }

    /// Assembles a group from a closed multiplication rule on `0..order`.
    pub(crate) fn from_rule(
        order: usize,
        rule: impl Fn(usize, usize) -> usize,
        generators: Vec<usize>,
        generator_names: Vec<String>,
        prime: u64,
    ) -> Self {
        let mut mul = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                mul.push(rule(a, b) as u32);
            }
        }
        let mut inv = vec![NONE; order];
        for a in 0..order {
            if inv[a] != NONE {
                continue;
            }
            let b = (0..order).find(|&b| mul[a * order + b] == 0).unwrap_or(0);
            inv[a] = b as u32;
            inv[b] = a as u32;
        }
        let mut g = ConcreteGroup::from_parts(mul, inv, generators, generator_names, None, prime);
        g.words = spanning_words(&g);
        g
    }

    /// The cyclic group of order `n` on one generator `x`.
    pub fn cyclic(n: usize, prime: u64) -> Self {
        let gens = if n > 1 { vec![1] } else { vec![] };
        let names = if n > 1 { vec!["x".to_string()] } else { vec![] };
        ConcreteGroup::from_rule(n, |a, b| (a + b) % n, gens, names, prime).with_label(format!("C{n}"))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn id(&self) -> GroupId {
        self.id
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut e = k.unsigned_abs();
        let (mut acc, mut sq) = (0usize, base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    #[inline]
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    /// `b^-1 a b`.
    #[inline]
    pub fn conjugate(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(b), a), b)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements().map(|a| self.element_order(a)).fold(1, lcm)
    }

    /// Sorted `(element order, count)` pairs.
    pub fn order_census(&self) -> Vec<(usize, usize)> {
        let mut census = std::collections::BTreeMap::new();
        for a in self.elements() {
            *census.entry(self.element_order(a)).or_insert(0) += 1;
        }
        census.into_iter().collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().enumerate().all(|(k, &a)| {
            self.generators[k + 1..]
                .iter()
                .all(|&b| self.mul(a, b) == self.mul(b, a))
        })
    }

    /// True when the order is a power of the recorded prime (the trivial
    /// group included).
    pub fn is_p_group(&self) -> bool {
        log_p(self.order, self.prime).is_some()
    }

    pub(crate) fn require_p_group(&self) -> Result<()> {
        if self.is_p_group() {
            Ok(())
        } else {
            Err(Error::NotPGroup {
                order: self.order,
                prime: self.prime,
            })
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.order {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                order: self.order,
            })
        }
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn element_word(&self, a: usize) -> Option<&Word> {
        self.words.as_ref().map(|w| &w[a])
    }

    pub fn element_words(&self) -> Option<&[Word]> {
        self.words.as_deref()
    }

    /// Human-readable name of an element: its witness word, or `#index`.
    pub fn describe(&self, a: usize) -> String {
        match self.element_word(a) {
            Some(w) => w.display_with(&self.generator_names).to_string(),
            None => format!("#{a}"),
        }
    }

    /// Evaluates a word at the generator elements.
    pub fn eval_word(&self, w: &Word) -> Result<usize> {
        let mut acc = 0;
        for &(g, e) in w.factors() {
            let x = *self.generators.get(g).ok_or(Error::IndexOutOfRange {
                index: g,
                order: self.generators.len(),
            })?;
            acc = self.mul(acc, self.pow(x, e));
        }
        Ok(acc)
    }

    pub(crate) fn set_words(&mut self, words: Option<Vec<Word>>) {
        self.words = words;
    }

    pub fn rename_generators(&mut self, names: Vec<String>) {
        if names.len() == self.generators.len() {
            self.generator_names = names;
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Shortest words over the generators and their inverses, by breadth-first
/// search. `None` if the generators do not reach every element.
pub(crate) fn spanning_words(g: &ConcreteGroup) -> Option<Vec<Word>> {
    let n = g.order();
    let mut words: Vec<Option<Word>> = vec![None; n];
    words[0] = Some(Word::identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for (k, &x) in g.generators.iter().enumerate() {
            for (step, e) in [(x, 1i64), (g.inv(x), -1)] {
                let b = g.mul(a, step);
                if words[b].is_none() {
                    let mut w = words[a].clone().unwrap_or_default();
                    w.push(k, e);
                    words[b] = Some(w);
                    queue.push_back(b);
                }
            }
        }
    }
    words.into_iter().collect()
}

/// Outcome of [`validate_group`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub order: usize,
    pub failure: Option<ValidationFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationFailure {
    Identity { element: usize },
    Inverse { element: usize },
    Associativity { a: usize, b: usize, c: usize },
    GeneratorClosure { reached: usize },
}

/// Largest order checked by the full cubic associativity scan; above it the
/// generator-based test is used, which is exact once the generators are known
/// to reach every element.
const CUBIC_ASSOCIATIVITY_LIMIT: usize = 128;

/// Exhaustively checks identity, inverses, associativity and generation.
pub fn validate_group(g: &ConcreteGroup) -> ValidationReport {
    let n = g.order();
    let fail = |failure| ValidationReport {
        order: n,
        failure: Some(failure),
    };

    for a in 0..n {
        if g.mul(0, a) != a || g.mul(a, 0) != a {
            return fail(ValidationFailure::Identity { element: a });
        }
    }
    for a in 0..n {
        let b = g.inv[a];
        if b == NONE || g.mul(a, b as usize) != 0 || g.mul(b as usize, a) != 0 {
            return fail(ValidationFailure::Inverse { element: a });
        }
    }

    // closure under right multiplication by the generators
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut reached = 1;
    while let Some(a) = stack.pop() {
        for &x in &g.generators {
            let b = g.mul(a, x);
            if !seen[b] {
                seen[b] = true;
                reached += 1;
                stack.push(b);
            }
        }
    }
    let generated = reached == n;

    if n <= CUBIC_ASSOCIATIVITY_LIMIT || !generated {
        for a in 0..n {
            for b in 0..n {
                let ab = g.mul(a, b);
                for c in 0..n {
                    if g.mul(ab, c) != g.mul(a, g.mul(b, c)) {
                        return fail(ValidationFailure::Associativity { a, b, c });
                    }
                }
            }
        }
    } else {
        // Light's test: elements x with (a x) c = a (x c) for all a, c form a
        // closed subset, so checking the generators suffices.
        for &x in &g.generators {
            for a in 0..n {
                let ax = g.mul(a, x);
                for c in 0..n {
                    if g.mul(ax, c) != g.mul(a, g.mul(x, c)) {
                        return fail(ValidationFailure::Associativity { a, b: x, c });
                    }
                }
            }
        }
    }

    if !generated {
        return fail(ValidationFailure::GeneratorClosure { reached });
    }
    ValidationReport {
        order: n,
        failure: None,
    }
}

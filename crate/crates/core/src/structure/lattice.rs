use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::group::ConcreteGroup;
use crate::structure::subgroup::{Generator, Subgroup};

pub const DEFAULT_LATTICE_CAP: usize = 512;

/// Every subgroup of a p-group, in canonical order (by order, then by sorted
/// elements), with the covering relation from the layered construction.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    nodes: Vec<Subgroup>,
    index: HashMap<FixedBitSet, usize>,
    /// maximal[i]: the index-p subgroups of node i
    maximal: Vec<Vec<usize>>,
}

impl SubgroupLattice {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Subgroup] {
        &self.nodes
    }

    pub fn get(&self, i: usize) -> &Subgroup {
        &self.nodes[i]
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn position(&self, h: &Subgroup) -> Option<usize> {
        self.index.get(h.members()).copied()
    }

    pub fn position_of_members(&self, members: &FixedBitSet) -> Option<usize> {
        self.index.get(members).copied()
    }

    /// `nodes[a] ≤ nodes[b]`.
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.nodes[a].is_subgroup_of(&self.nodes[b])
    }

    /// Maximal subgroups (index p) of node `i`.
    pub fn maximal_subgroups(&self, i: usize) -> &[usize] {
        &self.maximal[i]
    }

    /// Indices of subgroups of node `i`, including `i` itself.
    pub fn subgroups_of(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&j| self.contains(j, i)).collect()
    }

    /// Indices of subgroups that are normal in node `i`.
    pub fn normal_subgroups_of(&self, g: &ConcreteGroup, i: usize) -> Vec<usize> {
        let h = &self.nodes[i];
        (0..self.nodes.len())
            .filter(|&j| self.contains(j, i) && self.nodes[j].is_normal_in(g, h))
            .collect()
    }
}

pub fn all_subgroups(g: &ConcreteGroup) -> Result<SubgroupLattice> {
    all_subgroups_capped(g, DEFAULT_LATTICE_CAP)
}

/// Layered cyclic extension: every subgroup of order `p^(k+1)` is `<S, x>` for
/// a subgroup `S` of order `p^k` and some `x` normalizing `S` with `x^p ∈ S`.
pub fn all_subgroups_capped(g: &ConcreteGroup, cap: usize) -> Result<SubgroupLattice> {
    if g.order() > cap {
        return Err(Error::LatticeCapExceeded { order: g.order(), cap });
    }
    g.require_p_group()?;
    let p = g.prime() as i64;
    let n = g.order();
    let powers: Vec<usize> = g.elements().map(|x| g.pow(x, p)).collect();

    let mut layers: Vec<Vec<Subgroup>> = vec![vec![Subgroup::trivial(g)]];
    // (layer, index in layer) of each cover edge lower -> upper
    let mut covers: Vec<(usize, usize, usize)> = Vec::new();
    loop {
        let k = layers.len() - 1;
        let mut next: Vec<Subgroup> = Vec::new();
        let mut seen: HashMap<FixedBitSet, usize> = HashMap::new();
        for (si, s) in layers[k].iter().enumerate() {
            let mut done = s.members().clone();
            for x in 0..n {
                if done.contains(x) || !s.contains(powers[x]) || !s.is_normalized_by(g, x) {
                    continue;
                }
                let mut gen = Generator::from_subgroup(g, s);
                gen.add(x);
                let t = gen.finish();
                done.union_with(t.members());
                let ti = match seen.get(t.members()) {
                    Some(&ti) => ti,
                    None => {
                        let ti = next.len();
                        seen.insert(t.members().clone(), ti);
                        next.push(t);
                        ti
                    }
                };
                covers.push((si, k, ti));
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }

    // canonical order within each layer
    let mut offsets = Vec::with_capacity(layers.len());
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(layers.len());
    let mut nodes = Vec::new();
    for layer in &mut layers {
        let mut order: Vec<usize> = (0..layer.len()).collect();
        order.sort_by(|&a, &b| layer[a].cmp(&layer[b]));
        let mut rank = vec![0; layer.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        offsets.push(nodes.len());
        nodes.extend(order.iter().map(|&i| layer[i].clone()));
        perms.push(rank);
    }
    let mut maximal = vec![Vec::new(); nodes.len()];
    for (si, k, ti) in covers {
        let lower = offsets[k] + perms[k][si];
        let upper = offsets[k + 1] + perms[k + 1][ti];
        maximal[upper].push(lower);
    }
    for m in &mut maximal {
        m.sort_unstable();
        m.dedup();
    }
    let index = nodes
        .iter()
        .enumerate()
        .map(|(i, s)| (s.members().clone(), i))
        .collect();
    Ok(SubgroupLattice { nodes, index, maximal })
}

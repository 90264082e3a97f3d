use crate::graph::UnionFind;
use crate::instance::{Instance, ItemId};
use crate::packing::{Bin, Label, Packing};
use crate::rational::Rational;

use super::flow::FlowNetwork;

/// Which items share each bin, without the part sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncidenceStructure {
    pub bins: Vec<Vec<ItemId>>,
}

impl IncidenceStructure {
    pub fn new(bins: Vec<Vec<ItemId>>) -> Self {
        IncidenceStructure { bins }
    }

    pub fn of_packing(packing: &Packing) -> Self {
        IncidenceStructure {
            bins: packing.bins.iter().map(|b| b.items().collect()).collect(),
        }
    }

    pub fn degree(&self, item: ItemId) -> usize {
        self.bins.iter().filter(|b| b.contains(&item)).count()
    }

    /// True when the bipartite item/bin incidence graph has no cycle. For
    /// `k = 2` this is the same as the packing graph being a forest plus loops.
    pub fn is_incidence_forest(&self, items: usize) -> bool {
        let mut uf = UnionFind::new(items);
        for bin in &self.bins {
            for w in bin.windows(2) {
                if !uf.union(w[0], w[1]) {
                    return false;
                }
            }
        }
        true
    }

    /// Key that is equal for structures related by swapping items of equal
    /// size and by reordering bins.
    pub fn canonical_key(&self, sizes: &[Rational]) -> Vec<Vec<ItemId>> {
        let n = sizes.len();
        let mut classes: Vec<Vec<ItemId>> = Vec::new();
        let mut ids: Vec<ItemId> = (0..n).collect();
        ids.sort_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(a.cmp(&b)));
        for id in ids {
            match classes.last_mut() {
                Some(c) if sizes[c[0]] == sizes[id] => c.push(id),
                _ => classes.push(vec![id]),
            }
        }
        let mut best: Option<Vec<Vec<ItemId>>> = None;
        for perm in class_permutations(&classes, n) {
            let mut bins: Vec<Vec<ItemId>> = self
                .bins
                .iter()
                .map(|b| {
                    let mut v: Vec<_> = b.iter().map(|&i| perm[i]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            bins.sort();
            if best.as_ref().is_none_or(|b| bins < *b) {
                best = Some(bins);
            }
        }
        best.unwrap_or_default()
    }
}

/// Every relabeling that permutes items within their class.
fn class_permutations(classes: &[Vec<ItemId>], n: usize) -> Vec<Vec<ItemId>> {
    let mut out = vec![(0..n).collect::<Vec<_>>()];
    for class in classes.iter().filter(|c| c.len() > 1) {
        let mut next = Vec::new();
        for arrangement in permutations(class) {
            for base in &out {
                let mut p = base.clone();
                for (from, to) in class.iter().zip(&arrangement) {
                    p[*from] = *to;
                }
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// A packing with exactly the given incidences (zero parts dropped), if the
/// sizes can be routed into the bins.
pub fn feasible(inst: &Instance, structure: &IncidenceStructure) -> Option<Packing> {
    let n = inst.len();
    let b = structure.bins.len();
    if structure.bins.iter().flatten().any(|&i| i >= n) {
        return None;
    }
    let source = 0;
    let sink = n + b + 1;
    let mut net = FlowNetwork::new(n + b + 2);
    for (i, s) in inst.items() {
        net.add_arc(source, 1 + i, s);
    }
    let mut arcs = Vec::new();
    for (j, bin) in structure.bins.iter().enumerate() {
        for &i in bin {
            arcs.push((j, i, net.add_arc(1 + i, 1 + n + j, Rational::ONE)));
        }
        net.add_arc(1 + n + j, sink, Rational::ONE);
    }
    if net.max_flow(source, sink) != inst.total_size() {
        return None;
    }
    let mut bins: Vec<Bin> = (0..b).map(|_| Bin::new(Label::Exact)).collect();
    for (j, i, arc) in arcs {
        let f = net.flow(arc);
        if f.is_positive() {
            bins[j].add(i, f);
        }
    }
    let mut packing = Packing::new(bins);
    packing.drop_empty();
    Some(packing)
}

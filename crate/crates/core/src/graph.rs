//! The multigraph view of a `k = 2` packing: items are nodes, every bin is an
//! edge between the two items it holds, or a loop when it holds one.

use crate::error::Error;
use crate::instance::{Instance, ItemId};
use crate::packing::{Bin, Label, Packing};
use crate::rational::Rational;

/// One bin seen as an edge. For a loop `u == v` and `part_v` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: ItemId,
    pub v: ItemId,
    pub part_u: Rational,
    pub part_v: Rational,
    pub bin: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other(&self, x: ItemId) -> ItemId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingGraph {
    pub nodes: usize,
    pub edges: Vec<Edge>,
    labels: Vec<Label>,
}

pub fn graph_of(inst: &Instance, packing: &Packing) -> Result<PackingGraph, Error> {
    if inst.k() != 2 {
        return Err(Error::UnsupportedK {
            expected: 2,
            got: inst.k(),
        });
    }
    let mut edges = Vec::with_capacity(packing.len());
    for (idx, bin) in packing.bins.iter().enumerate() {
        let e = match bin.entries() {
            [(a, pa)] => Edge {
                u: *a,
                v: *a,
                part_u: *pa,
                part_v: Rational::ZERO,
                bin: idx,
            },
            [(a, pa), (b, pb)] => {
                let ((u, pu), (v, pv)) = if a <= b { ((a, pa), (b, pb)) } else { ((b, pb), (a, pa)) };
                Edge {
                    u: *u,
                    v: *v,
                    part_u: *pu,
                    part_v: *pv,
                    bin: idx,
                }
            }
            other => {
                return Err(Error::InvalidPacking(format!(
                    "bin {idx} has {} parts, a packing graph needs 1 or 2",
                    other.len()
                )))
            }
        };
        edges.push(e);
    }
    Ok(PackingGraph {
        nodes: inst.len(),
        edges,
        labels: packing.labels(),
    })
}

pub fn packing_of_graph(graph: &PackingGraph) -> Packing {
    let bins = graph
        .edges
        .iter()
        .zip(&graph.labels)
        .map(|(e, &label)| {
            if e.is_loop() {
                Bin::with_entries(label, [(e.u, e.part_u)])
            } else {
                Bin::with_entries(label, [(e.u, e.part_u), (e.v, e.part_v)])
            }
        })
        .collect();
    Packing::new(bins)
}

impl PackingGraph {
    /// Number of edges (loops included) at `x`; equals the number of bins holding `x`.
    pub fn degree(&self, x: ItemId) -> usize {
        self.edges.iter().filter(|e| e.u == x || e.v == x).count()
    }

    /// Distinct items sharing a bin with `x`.
    pub fn neighbors(&self, x: ItemId) -> Vec<ItemId> {
        let mut n: Vec<_> = self
            .edges
            .iter()
            .filter(|e| !e.is_loop() && (e.u == x || e.v == x))
            .map(|e| e.other(x))
            .collect();
        n.sort_unstable();
        n.dedup();
        n
    }

    /// Sorted `(u, v)` pairs, loops included.
    pub fn edge_multiset(&self) -> Vec<(ItemId, ItemId)> {
        let mut m: Vec<_> = self.edges.iter().map(|e| (e.u, e.v)).collect();
        m.sort_unstable();
        m
    }

    /// Finds a cycle among non-loop edges (parallel edges count as a 2-cycle).
    /// Edges are scanned by bin index; the first one that closes a cycle is
    /// returned first, followed by the path that it closes.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let mut uf = UnionFind::new(self.nodes);
        for (idx, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            if !uf.union(e.u, e.v) {
                // Path between u and v among earlier edges closes the cycle.
                let path = self.path_avoiding(e.v, e.u, idx)?;
                let mut cycle = vec![idx];
                cycle.extend(path);
                return Some(cycle);
            }
        }
        None
    }

    /// Edge indices of a path from `from` to `to` using only edges with index < `limit`.
    fn path_avoiding(&self, from: ItemId, to: ItemId, limit: usize) -> Option<Vec<usize>> {
        let mut prev: Vec<Option<(ItemId, usize)>> = vec![None; self.nodes];
        let mut seen = vec![false; self.nodes];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for (idx, e) in self.edges.iter().enumerate().take(limit) {
                if e.is_loop() || (e.u != x && e.v != x) {
                    continue;
                }
                let y = e.other(x);
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, idx));
                    queue.push_back(y);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let (p, idx) = prev[cur].expect("bfs parent");
            path.push(idx);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    pub fn is_forest(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Connected components (loops ignored), as a component id per node.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.nodes);
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            uf.union(e.u, e.v);
        }
        (0..self.nodes).map(|x| uf.find(x)).collect()
    }
}

/// Disjoint sets with path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

//! Depth-first enumeration of incidence structures with at most `B` bins.
//!
//! Items are processed in order of decreasing size ("positions"). At
//! position `p` the search decides every bin whose lowest position is `p`:
//! some loops (bins holding `p` alone) plus a family of subsets of later
//! positions that share a bin with `p`. Once `p` is decided no later bin can
//! touch it, so a relaxed flow problem (later items may also use an
//! aggregated pool of the bins still to be opened) must already route every
//! size. At the last position the relaxation is exact and yields the witness.
//!
//! In forest mode only incidence forests are generated: a bin may not join
//! two items that are already connected, and an item gets at most
//! `ceil(size)` loops. Any feasible packing can be moved to a vertex of its
//! part polytope, whose support has no cycle and at most one non-full bin per
//! tree, so this loses no optimum.

use std::collections::HashSet;

use crate::error::Error;
use crate::instance::{Instance, ItemId};
use crate::packing::{Bin, Label, Packing};
use crate::rational::Rational;

use super::flow::FlowNetwork;
use super::structure::permutations;

/// Relabelings considered per memo key; larger symmetry groups are not memoized.
const MAX_GROUP: usize = 720;
const MAX_MEMO: usize = 2_000_000;

pub(crate) struct Search<'a> {
    inst: &'a Instance,
    k: usize,
    order: Vec<ItemId>,
    size: Vec<Rational>,
    need: Vec<usize>,
    max_bins: usize,
    forest: bool,
    bins: Vec<u32>,
    deg: Vec<usize>,
    comp: Vec<usize>,
    /// Symmetry group per position (None when trivial or too large).
    groups: Vec<Option<Vec<Vec<u8>>>>,
    memo: HashSet<(u8, Vec<u32>)>,
    pub(crate) nodes: u64,
    max_nodes: u64,
    pub(crate) witness: Option<Packing>,
}

impl<'a> Search<'a> {
    pub(crate) fn new(inst: &'a Instance, max_bins: usize, forest: bool, symmetry: bool, max_nodes: u64) -> Self {
        let n = inst.len();
        assert!(n <= 32, "search supports at most 32 items");
        let mut order: Vec<ItemId> = (0..n).collect();
        order.sort_by(|&a, &b| inst.size(b).cmp(&inst.size(a)).then(a.cmp(&b)));
        let size: Vec<Rational> = order.iter().map(|&i| inst.size(i)).collect();
        let need = size.iter().map(|s| s.ceil() as usize).collect();
        let groups = (0..n)
            .map(|p| if symmetry { symmetry_group(&size, p) } else { None })
            .collect();
        Search {
            inst,
            k: inst.k(),
            order,
            size,
            need,
            max_bins,
            forest,
            bins: Vec::new(),
            deg: vec![0; n],
            comp: (0..n).collect(),
            groups,
            memo: HashSet::new(),
            nodes: 0,
            max_nodes,
            witness: None,
        }
    }

    /// Searches for a packing; on success the witness is stored.
    pub(crate) fn run(&mut self) -> Result<bool, Error> {
        if self.order.is_empty() {
            self.witness = Some(Packing::default());
            return Ok(true);
        }
        self.visit(0)
    }

    fn tick(&mut self) -> Result<(), Error> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded(format!(
                "more than {} search nodes",
                self.max_nodes
            )));
        }
        Ok(())
    }

    fn visit(&mut self, p: usize) -> Result<bool, Error> {
        let candidates = self.candidates(p);
        self.choose(p, &candidates, 0, 0)
    }

    /// Subsets of later positions with at most `k - 1` members, as masks.
    fn candidates(&self, p: usize) -> Vec<u32> {
        let n = self.order.len();
        let later: Vec<usize> = (p + 1..n).collect();
        let mut out = Vec::new();
        fn rec(later: &[usize], start: usize, mask: u32, left: usize, out: &mut Vec<u32>) {
            for i in start..later.len() {
                let m = mask | (1 << later[i]);
                out.push(m);
                if left > 1 {
                    rec(later, i + 1, m, left - 1, out);
                }
            }
        }
        rec(&later, 0, 0, self.k - 1, &mut out);
        out
    }

    fn choose(&mut self, p: usize, candidates: &[u32], start: usize, used: u32) -> Result<bool, Error> {
        self.tick()?;
        let room = self.max_bins - self.bins.len();

        // Stop adding shared bins; finish `p` with loops.
        let lo = self.need[p].saturating_sub(self.deg[p]);
        let hi = if self.forest { self.need[p] } else { room }.min(room);
        for loops in lo..=hi {
            for _ in 0..loops {
                self.bins.push(1 << p);
            }
            self.deg[p] += loops;
            let done = self.close(p)?;
            self.deg[p] -= loops;
            self.bins.truncate(self.bins.len() - loops);
            if done {
                return Ok(true);
            }
        }

        if room == 0 {
            return Ok(false);
        }
        for ci in start..candidates.len() {
            let t = candidates[ci];
            if self.forest && (t & used != 0 || !self.joins_distinct_trees(p, t)) {
                continue;
            }
            let saved = if self.forest { Some(self.comp.clone()) } else { None };
            self.push_bin((1 << p) | t);
            let next = if self.forest { ci + 1 } else { ci };
            let done = self.choose(p, candidates, next, used | t)?;
            self.pop_bin();
            if let Some(c) = saved {
                self.comp = c;
            }
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn joins_distinct_trees(&self, p: usize, t: u32) -> bool {
        let mut seen = vec![self.comp[p]];
        for q in members(t) {
            let c = self.comp[q];
            if seen.contains(&c) {
                return false;
            }
            seen.push(c);
        }
        true
    }

    fn push_bin(&mut self, mask: u32) {
        let ms: Vec<usize> = members(mask).collect();
        for &q in &ms {
            self.deg[q] += 1;
        }
        if self.forest {
            let root = self.comp[ms[0]];
            let merged: Vec<usize> = ms.iter().map(|&q| self.comp[q]).collect();
            for c in self.comp.iter_mut() {
                if merged.contains(c) {
                    *c = root;
                }
            }
        }
        self.bins.push(mask);
    }

    fn pop_bin(&mut self) {
        let mask = self.bins.pop().expect("bin to pop");
        for q in members(mask) {
            self.deg[q] -= 1;
        }
    }

    /// Position `p` is fully decided: prune, then move on.
    fn close(&mut self, p: usize) -> Result<bool, Error> {
        let n = self.order.len();
        if self.deg[p] < self.need[p] {
            return Ok(false);
        }
        let room = self.max_bins - self.bins.len();
        let mut deficit = 0;
        for q in p + 1..n {
            let d = self.need[q].saturating_sub(self.deg[q]);
            if d > room {
                return Ok(false);
            }
            deficit += d;
        }
        if deficit > self.k * room {
            return Ok(false);
        }
        if !self.route(p)? {
            return Ok(false);
        }
        if p + 1 == n {
            return Ok(true);
        }
        let key = self.groups[p].as_ref().map(|g| (p as u8, canonical(&self.bins, g)));
        if let Some(key) = &key {
            if self.memo.contains(key) {
                return Ok(false);
            }
        }
        let done = self.visit(p + 1)?;
        if !done {
            if let Some(key) = key {
                if self.memo.len() < MAX_MEMO {
                    self.memo.insert(key);
                }
            }
        }
        Ok(done)
    }

    /// Flow check with positions `> p` allowed to use `room` fresh bins.
    /// At the last position this is the exact test and records the witness.
    fn route(&mut self, p: usize) -> Result<bool, Error> {
        let n = self.order.len();
        let b = self.bins.len();
        let room = self.max_bins - b;
        let source = 0;
        let pool = n + b + 1;
        let sink = n + b + 2;
        let mut net = FlowNetwork::new(n + b + 3);
        for q in 0..n {
            net.add_arc(source, 1 + q, self.size[q]);
        }
        let mut arcs = Vec::new();
        for (j, &mask) in self.bins.iter().enumerate() {
            for q in members(mask) {
                arcs.push((j, q, net.add_arc(1 + q, 1 + n + j, Rational::ONE)));
            }
            net.add_arc(1 + n + j, sink, Rational::ONE);
        }
        if room > 0 && p + 1 < n {
            let r = Rational::from(room);
            for q in p + 1..n {
                net.add_arc(1 + q, pool, r);
            }
            net.add_arc(pool, sink, r);
        }
        let total: Rational = self.size.iter().sum();
        if net.max_flow(source, sink) != total {
            return Ok(false);
        }
        if p + 1 == n {
            let mut bins: Vec<Bin> = (0..b).map(|_| Bin::new(Label::Exact)).collect();
            for (j, q, arc) in arcs {
                let f = net.flow(arc);
                if f.is_positive() {
                    bins[j].add(self.order[q], f);
                }
            }
            let mut packing = Packing::new(bins);
            packing.drop_empty();
            debug_assert!(crate::packing::is_valid(self.inst, &packing));
            self.witness = Some(packing);
        }
        Ok(true)
    }
}

fn members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| mask & (1 << i) != 0)
}

/// Permutations of positions within runs of equal size, runs split at the
/// decided/undecided boundary after `p`.
fn symmetry_group(size: &[Rational], p: usize) -> Option<Vec<Vec<u8>>> {
    let n = size.len();
    let mut segments: Vec<Vec<u8>> = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && size[end] == size[start] && !(end == p + 1) {
            end += 1;
        }
        if end - start > 1 {
            segments.push((start as u8..end as u8).collect());
        }
        start = end;
    }
    if segments.is_empty() {
        return None;
    }
    let count: usize = segments.iter().map(|s| (1..=s.len()).product::<usize>()).product();
    if count > MAX_GROUP {
        return None;
    }
    let mut group: Vec<Vec<u8>> = vec![(0..n as u8).collect()];
    for seg in &segments {
        let mut next = Vec::new();
        for arrangement in permutations(seg) {
            for base in &group {
                let mut g = base.clone();
                for (from, to) in seg.iter().zip(&arrangement) {
                    g[*from as usize] = *to;
                }
                next.push(g);
            }
        }
        group = next;
    }
    Some(group)
}

fn canonical(bins: &[u32], group: &[Vec<u8>]) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    for g in group {
        let mut mapped: Vec<u32> = bins
            .iter()
            .map(|&m| members(m).fold(0u32, |acc, q| acc | (1 << g[q])))
            .collect();
        mapped.sort_unstable();
        if best.as_ref().is_none_or(|b| mapped < *b) {
            best = Some(mapped);
        }
    }
    best.expect("group contains the identity")
}

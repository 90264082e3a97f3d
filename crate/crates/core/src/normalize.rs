//! Structural normal form for `k = 2` packings.
//!
//! Three rewrites, each keeping every bin within capacity and every item
//! fully covered:
//!
//! * [`remove_cycles`] makes the packing graph a forest plus loops;
//! * [`smalls_to_leaves`] leaves every small item in a single bin;
//! * [`bound_degrees`] keeps an item of size in `((i-1)/2, i/2]` in at most
//!   `i` bins.
//!
//! Each rewrite is the identity on packings that already satisfy its
//! postcondition, so [`normalize`] is idempotent.

use std::collections::VecDeque;

use crate::error::Error;
use crate::graph::graph_of;
use crate::instance::{size_type, Instance, ItemClass, ItemId};
use crate::packing::{validate_packing, Bin, Packing};
use crate::rational::Rational;

fn check_input(inst: &Instance, p: &Packing) -> Result<(), Error> {
    if inst.k() != 2 {
        return Err(Error::UnsupportedK {
            expected: 2,
            got: inst.k(),
        });
    }
    if let Some(v) = validate_packing(inst, p).first() {
        return Err(Error::InvalidPacking(v.to_string()));
    }
    Ok(())
}

fn is_small(inst: &Instance, x: ItemId) -> bool {
    ItemClass::of(inst.size(x)) == ItemClass::Small
}

fn bins_of(bins: &[Bin], x: ItemId) -> Vec<usize> {
    (0..bins.len()).filter(|&j| bins[j].contains(x)).collect()
}

/// The entry of a two-item bin that is not `x`.
fn partner(bin: &Bin, x: ItemId) -> Option<(ItemId, Rational)> {
    bin.entries().iter().copied().find(|&(i, _)| i != x)
}

fn set_part(bin: &mut Bin, item: ItemId, part: Rational) {
    bin.remove(item);
    if part.is_positive() {
        bin.add(item, part);
    }
}

fn finish(mut bins: Vec<Bin>) -> Packing {
    bins.retain(|b| !b.is_empty());
    Packing::new(bins)
}

/// Nodes in breadth-first order from the smallest item of each component,
/// with the bin leading to each node's parent.
fn rooted(items: usize, bins: &[Bin]) -> (Vec<ItemId>, Vec<Option<usize>>) {
    let mut adj: Vec<Vec<(ItemId, usize)>> = vec![Vec::new(); items];
    for (j, b) in bins.iter().enumerate() {
        if let [(a, _), (c, _)] = b.entries() {
            adj[*a].push((*c, j));
            adj[*c].push((*a, j));
        }
    }
    let mut up = vec![None; items];
    let mut seen = vec![false; items];
    let mut order = Vec::with_capacity(items);
    for root in 0..items {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &(y, j) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    up[y] = Some(j);
                    queue.push_back(y);
                }
            }
        }
    }
    (order, up)
}

/// Breaks every cycle of the packing graph. A cycle bin whose two parts fit
/// into the neighbouring cycle bins is emptied and dropped; otherwise mass
/// is rotated around the cycle until one part vanishes.
pub fn remove_cycles(inst: &Instance, p: &Packing) -> Result<Packing, Error> {
    check_input(inst, p)?;
    let mut bins = p.bins.clone();
    loop {
        let graph = graph_of(inst, &Packing::new(bins.clone()))?;
        let Some(cycle) = graph.find_cycle() else { break };
        let edges: Vec<usize> = cycle.iter().map(|&i| graph.edges[i].bin).collect();
        // nodes[j] and nodes[j + 1] share bin edges[j]
        let first = &graph.edges[cycle[0]];
        let mut nodes = vec![first.u, first.v];
        for &i in &cycle[1..] {
            let last = *nodes.last().expect("non-empty");
            nodes.push(graph.edges[i].other(last));
        }
        debug_assert_eq!(nodes.first(), nodes.last());
        let len = edges.len();

        let mut emptied = None;
        let mut by_bin: Vec<usize> = (0..len).collect();
        by_bin.sort_by_key(|&j| edges[j]);
        for j in by_bin {
            let (prev, next) = (edges[(j + len - 1) % len], edges[(j + 1) % len]);
            let a = bins[edges[j]].part_of(nodes[j]).expect("cycle part");
            let b = bins[edges[j]].part_of(nodes[j + 1]).expect("cycle part");
            let fits = if prev == next {
                a + b <= bins[prev].slack()
            } else {
                a <= bins[prev].slack() && b <= bins[next].slack()
            };
            if fits {
                bins[prev].add(nodes[j], a);
                bins[next].add(nodes[j + 1], b);
                bins[edges[j]] = Bin::new(bins[edges[j]].label);
                emptied = Some(edges[j]);
                break;
            }
        }
        if let Some(j) = emptied {
            bins.remove(j);
            continue;
        }

        let delta = (0..len)
            .map(|j| bins[edges[j]].part_of(nodes[j + 1]).expect("cycle part"))
            .min()
            .expect("cycle has edges");
        for j in 0..len {
            let bin = &mut bins[edges[j]];
            let gain = bin.part_of(nodes[j]).expect("cycle part") + delta;
            let lose = bin.part_of(nodes[j + 1]).expect("cycle part") - delta;
            set_part(bin, nodes[j], gain);
            set_part(bin, nodes[j + 1], lose);
        }
    }
    Ok(finish(bins))
}

/// Leaves every small item in exactly one bin. Two small items sharing a
/// bin are gathered whole into that bin; otherwise the small item's part in
/// one bin is traded for a slice of its neighbour in the other bin.
pub fn smalls_to_leaves(inst: &Instance, p: &Packing) -> Result<Packing, Error> {
    check_input(inst, p)?;
    let mut bins = p.bins.clone();
    let limit = 4 * inst.len() * (bins.len() + 1);
    for _ in 0..=limit {
        let next = (0..inst.len()).find(|&x| is_small(inst, x) && bins_of(&bins, x).len() >= 2);
        let Some(s) = next else {
            return Ok(finish(bins));
        };
        let held = bins_of(&bins, s);

        let shared = held.iter().copied().find_map(|j| match partner(&bins[j], s) {
            Some((t, _)) if is_small(inst, t) => Some((j, t)),
            _ => None,
        });
        if let Some((home, t)) = shared {
            for (j, bin) in bins.iter_mut().enumerate() {
                if j != home {
                    bin.remove(s);
                    bin.remove(t);
                }
            }
            set_part(&mut bins[home], s, inst.size(s));
            set_part(&mut bins[home], t, inst.size(t));
            bins.retain(|b| !b.is_empty());
            continue;
        }

        let b2 = held.iter().copied().find(|&j| bins[j].len() == 1).unwrap_or(held[1]);
        let b1 = held.iter().copied().find(|&j| j != b2).expect("two bins");
        let s1 = bins[b1].remove(s).expect("part in b1");
        match partner(&bins[b2], s) {
            Some((w2, part)) if s1 <= part => {
                bins[b1].add(w2, s1);
                set_part(&mut bins[b2], w2, part - s1);
            }
            _ => {}
        }
        bins[b2].add(s, s1);
        if bins[b1].is_empty() {
            bins.remove(b1);
        }
    }
    unreachable!("smalls_to_leaves did not converge")
}

/// Merges the two smallest parts of `x` held in bins `j1` and `j2`.
fn merge_parts(inst: &Instance, bins: &mut [Bin], x: ItemId, j1: usize, j2: usize) {
    let m1 = bins[j1].part_of(x).expect("part in j1");
    let m2 = bins[j2].part_of(x).expect("part in j2");
    let m = m1 + m2;
    let w1 = partner(&bins[j1], x);
    let w2 = partner(&bins[j2], x);
    let into = |bins: &mut [Bin], to: usize, from: usize| {
        bins[from].remove(x);
        set_part(&mut bins[to], x, m);
    };
    match (w1, w2) {
        (_, None) => into(bins, j2, j1),
        (None, _) => into(bins, j1, j2),
        (Some((_, p1)), _) if m + p1 <= Rational::ONE => into(bins, j1, j2),
        (_, Some((_, p2))) if m + p2 <= Rational::ONE => into(bins, j2, j1),
        (Some((a, pa)), Some((b, pb))) => {
            let cut = if !is_small(inst, a) {
                Some((j1, j2, a, pa))
            } else if !is_small(inst, b) {
                Some((j2, j1, b, pb))
            } else {
                None
            };
            match cut {
                // The non-small neighbour is split: it tops up the merged bin
                // and the rest moves to the vacated bin.
                Some((keep, vacate, w, pw)) => {
                    bins[vacate].remove(x);
                    set_part(&mut bins[keep], x, m);
                    set_part(&mut bins[keep], w, Rational::ONE - m);
                    bins[vacate].add(w, pw + m - Rational::ONE);
                }
                None => {
                    bins[j1] = Bin::with_entries(bins[j1].label, [(x, m)]);
                    bins[j2] = Bin::with_entries(bins[j2].label, [(a, pa), (b, pb)]);
                }
            }
        }
    }
}

/// Reduces every non-small item of size in `((i-1)/2, i/2]` to at most `i`
/// bins, working down each tree from its root.
pub fn bound_degrees(inst: &Instance, p: &Packing) -> Result<Packing, Error> {
    check_input(inst, p)?;
    let mut bins = p.bins.clone();
    let limit = 4 * inst.len() * (bins.len() + 1);
    for _ in 0..=limit {
        let (order, up) = rooted(inst.len(), &bins);
        let over = order
            .into_iter()
            .find(|&x| !is_small(inst, x) && bins_of(&bins, x).len() > size_type(inst.size(x)));
        let Some(x) = over else {
            return Ok(finish(bins));
        };
        let mut down: Vec<usize> = bins_of(&bins, x).into_iter().filter(|&j| Some(j) != up[x]).collect();
        down.sort_by_key(|&j| (bins[j].part_of(x), j));
        merge_parts(inst, &mut bins, x, down[0], down[1]);
        bins.retain(|b| !b.is_empty());
    }
    unreachable!("bound_degrees did not converge")
}

/// Cycle removal, then small items to leaves, then degree bounds.
pub fn normalize(inst: &Instance, p: &Packing) -> Result<Packing, Error> {
    let p = remove_cycles(inst, p)?;
    let p = smalls_to_leaves(inst, &p)?;
    bound_degrees(inst, &p)
}

/// Every way the packing misses the normal form, one message each.
pub fn normal_form_violations(inst: &Instance, p: &Packing) -> Result<Vec<String>, Error> {
    check_input(inst, p)?;
    let graph = graph_of(inst, p)?;
    let mut out = Vec::new();
    if let Some(cycle) = graph.find_cycle() {
        let bins: Vec<usize> = cycle.iter().map(|&i| graph.edges[i].bin).collect();
        out.push(format!("cycle through bins {bins:?}"));
    }
    for (x, s) in inst.items() {
        let degree = graph.degree(x);
        if is_small(inst, x) {
            if degree > 1 {
                out.push(format!("small item {x} is in {degree} bins"));
            }
        } else if degree > size_type(s) {
            out.push(format!("item {x} of size {s} is in {degree} > {} bins", size_type(s)));
        }
    }
    Ok(out)
}

//! Maximum flow over exact rational capacities (Edmonds-Karp).
//!
//! Augmenting along shortest paths bounds the number of augmentations by
//! `O(V E)` independently of the capacity values.

use std::collections::VecDeque;

use crate::rational::Rational;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: Rational,
    flow: Rational,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Adds `u -> v` with capacity `cap`; returns the arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: Rational) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to: v,
            cap,
            flow: Rational::ZERO,
        });
        self.arcs.push(Arc {
            to: u,
            cap: Rational::ZERO,
            flow: Rational::ZERO,
        });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow(&self, arc: usize) -> Rational {
        self.arcs[arc].flow
    }

    fn residual(&self, arc: usize) -> Rational {
        self.arcs[arc].cap - self.arcs[arc].flow
    }

    /// Pushes as much flow as possible from `source` to `sink`, returning the total.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> Rational {
        let mut total = Rational::ZERO;
        let n = self.nodes();
        let mut via: Vec<Option<usize>> = vec![None; n];
        loop {
            via.iter_mut().for_each(|v| *v = None);
            let mut seen = vec![false; n];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &a in &self.adj[u] {
                    let v = self.arcs[a].to;
                    if !seen[v] && self.residual(a).is_positive() {
                        seen[v] = true;
                        via[v] = Some(a);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut bottleneck: Option<Rational> = None;
            let mut v = sink;
            while let Some(a) = via[v] {
                let r = self.residual(a);
                bottleneck = Some(bottleneck.map_or(r, |b| b.min(r)));
                v = self.arcs[a ^ 1].to;
            }
            let delta = bottleneck.expect("augmenting path has at least one arc");
            let mut v = sink;
            while let Some(a) = via[v] {
                self.arcs[a].flow += delta;
                self.arcs[a ^ 1].flow -= delta;
                v = self.arcs[a ^ 1].to;
            }
            total += delta;
        }
    }
}

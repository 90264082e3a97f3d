//! Online NEXT FIT for splittable items with at most `k` parts per bin.
//!
//! An item goes into the current bin while that bin has spare capacity and
//! fewer than `k` parts. An item that does not fit fills the current bin and
//! continues in as many fresh bins as it needs, all full except the last.
//!
//! The run is split into blocks: maximal runs of bins that are full except
//! the last, where a block ends at a bin that was closed because it reached
//! `k` parts before the next item arrived.

use serde::Serialize;

use crate::error::Error;
use crate::instance::{item_weight, Instance, ItemId};
use crate::packing::{validate_packing, Bin, Label, Packing};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CloseReason {
    /// Closed at capacity (including bins an item spilled out of).
    Filled,
    /// Closed because it held `k` parts when the next item arrived; ends a block.
    CardinalityReached,
    EndOfInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub start: usize,
    pub len: usize,
}

/// Execution record of one NEXT FIT run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NfTrace {
    pub k: usize,
    pub blocks: Vec<Block>,
    pub close_reasons: Vec<CloseReason>,
}

impl NfTrace {
    pub fn bins(&self) -> usize {
        self.close_reasons.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Incremental NEXT FIT state; other algorithms reuse it for their NF phases.
#[derive(Debug, Clone)]
pub struct NextFit {
    k: usize,
    label: Label,
    bins: Vec<Bin>,
    reasons: Vec<CloseReason>,
    /// Index of the open bin, if any.
    current: Option<usize>,
}

impl NextFit {
    pub fn new(k: usize, label: Label) -> Self {
        NextFit {
            k,
            label,
            bins: Vec::new(),
            reasons: Vec::new(),
            current: None,
        }
    }

    fn close_current(&mut self, reason: CloseReason) {
        if let Some(c) = self.current.take() {
            self.reasons[c] = reason;
        }
    }

    fn open(&mut self, item: ItemId, part: Rational) -> usize {
        self.bins.push(Bin::with_entries(self.label, [(item, part)]));
        self.reasons.push(CloseReason::EndOfInput);
        self.bins.len() - 1
    }

    /// Places `amount` of `item`.
    pub fn push(&mut self, item: ItemId, amount: Rational) {
        debug_assert!(amount.is_positive());
        let mut rest = amount;
        if let Some(c) = self.current {
            let bin = &self.bins[c];
            let room = bin.slack();
            if room.is_positive() && bin.len() < self.k {
                if rest <= room {
                    self.bins[c].add(item, rest);
                    return;
                }
                self.bins[c].add(item, room);
                rest -= room;
                self.close_current(CloseReason::Filled);
            } else if bin.len() >= self.k {
                self.close_current(CloseReason::CardinalityReached);
            } else {
                self.close_current(CloseReason::Filled);
            }
        }
        while rest > Rational::ONE {
            let full = self.open(item, Rational::ONE);
            self.reasons[full] = CloseReason::Filled;
            rest -= Rational::ONE;
        }
        // The last bin of the item stays open, even when exactly full.
        self.current = Some(self.open(item, rest));
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn finish(mut self) -> (Vec<Bin>, NfTrace) {
        self.close_current(CloseReason::EndOfInput);
        let mut blocks = Vec::new();
        let mut start = 0;
        for (i, r) in self.reasons.iter().enumerate() {
            if *r == CloseReason::CardinalityReached || i + 1 == self.reasons.len() {
                blocks.push(Block {
                    start,
                    len: i + 1 - start,
                });
                start = i + 1;
            }
        }
        let trace = NfTrace {
            k: self.k,
            blocks,
            close_reasons: self.reasons,
        };
        (self.bins, trace)
    }
}

/// Runs NEXT FIT over the items in instance order.
pub fn next_fit(inst: &Instance) -> (Packing, NfTrace) {
    next_fit_order(inst, &(0..inst.len()).collect::<Vec<_>>())
}

/// Runs NEXT FIT over the items in the given order.
pub fn next_fit_order(inst: &Instance, order: &[ItemId]) -> (Packing, NfTrace) {
    let mut nf = NextFit::new(inst.k(), Label::NextFit);
    for &id in order {
        nf.push(id, inst.size(id));
    }
    let (bins, trace) = nf.finish();
    (Packing::new(bins), trace)
}

/// Item order by non-increasing size (ties by id), for the optional pre-sort.
pub fn decreasing_order(inst: &Instance) -> Vec<ItemId> {
    let mut order: Vec<_> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| inst.size(b).cmp(&inst.size(a)).then(a.cmp(&b)));
    order
}

/// Evaluates `sum of weights >= (nf + (blocks - 1)(k - 1)) / k` exactly.
///
/// Errors if the trace was not produced for this instance.
pub fn check_block_inequality(inst: &Instance, packing: &Packing, trace: &NfTrace) -> Result<bool, Error> {
    if trace.k != inst.k() {
        return Err(Error::TraceMismatch(format!(
            "trace k={} but instance k={}",
            trace.k,
            inst.k()
        )));
    }
    if trace.bins() != packing.len() {
        return Err(Error::TraceMismatch(format!(
            "trace has {} bins, packing has {}",
            trace.bins(),
            packing.len()
        )));
    }
    let block_total: usize = trace.blocks.iter().map(|b| b.len).sum();
    if block_total != trace.bins() {
        return Err(Error::TraceMismatch(format!(
            "blocks cover {block_total} bins of {}",
            trace.bins()
        )));
    }
    let violations = validate_packing(inst, packing);
    if let Some(v) = violations.first() {
        return Err(Error::TraceMismatch(v.to_string()));
    }
    let blocks = trace.blocks.len();
    if blocks == 0 {
        return Ok(true);
    }
    let k = inst.k() as i128;
    let weight: Rational = inst.sizes().iter().map(|&s| item_weight(s, inst.k())).sum();
    let rhs = Rational::new(trace.bins() as i128 + (blocks as i128 - 1) * (k - 1), k);
    Ok(weight >= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::is_valid;
    use crate::rational::r;

    fn nf_family(k: usize, m: usize) -> Instance {
        let big = Rational::from((m * k - 1) as i128);
        let eps = Rational::new(1, (m * k * (k - 1)) as i128);
        let mut sizes = vec![big];
        sizes.extend(std::iter::repeat_n(eps, m * (k - 1) * k));
        Instance::new(k, sizes).unwrap()
    }

    #[test]
    fn family_k2_m2_uses_five_bins() {
        let inst = Instance::new(2, vec![r(3, 1), r(1, 4), r(1, 4), r(1, 4), r(1, 4)]).unwrap();
        let (p, t) = next_fit(&inst);
        assert!(is_valid(&inst, &p));
        assert_eq!(p.len(), 5);
        assert!(check_block_inequality(&inst, &p, &t).unwrap());
        // Σw = 7/2 ≥ (5 + (m-1)) / 2 with m read from the trace
        let m = t.blocks.len() as i128;
        assert!(r(7, 2) >= Rational::new(5 + (m - 1), 2));
    }

    #[test]
    fn family_k3_m1_uses_four_bins() {
        let inst = nf_family(3, 1);
        let (p, t) = next_fit(&inst);
        assert!(is_valid(&inst, &p));
        assert_eq!(p.len(), 4);
        assert!(check_block_inequality(&inst, &p, &t).unwrap());
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new(2, vec![]).unwrap();
        let (p, t) = next_fit(&inst);
        assert!(p.is_empty());
        assert!(t.blocks.is_empty());
        assert!(check_block_inequality(&inst, &p, &t).unwrap());
    }

    #[test]
    fn single_half_item() {
        let inst = Instance::new(2, vec![r(1, 2)]).unwrap();
        let (p, t) = next_fit(&inst);
        assert_eq!(p.len(), 1);
        assert_eq!(t.blocks, vec![Block { start: 0, len: 1 }]);
        assert!(check_block_inequality(&inst, &p, &t).unwrap());
    }

    #[test]
    fn spill_out_of_a_k_part_bin_stays_in_block() {
        // {1/2, 1/2 of 3/5} is full with k parts but the item continues.
        let inst = Instance::new(2, vec![r(1, 2), r(3, 5)]).unwrap();
        let (p, t) = next_fit(&inst);
        assert_eq!(p.len(), 2);
        assert_eq!(t.close_reasons, vec![CloseReason::Filled, CloseReason::EndOfInput]);
        assert_eq!(t.blocks.len(), 1);
        assert!(check_block_inequality(&inst, &p, &t).unwrap());
    }

    #[test]
    fn exactly_full_k_part_bin_ends_block() {
        let inst = Instance::new(2, vec![r(1, 2), r(1, 2), r(3, 5)]).unwrap();
        let (p, t) = next_fit(&inst);
        assert_eq!(p.len(), 2);
        assert_eq!(t.close_reasons[0], CloseReason::CardinalityReached);
        assert_eq!(t.blocks.len(), 2);
        assert!(check_block_inequality(&inst, &p, &t).unwrap());
    }

    #[test]
    fn oversized_item_opens_ceil_bins() {
        let inst = Instance::new(3, vec![r(5, 2)]).unwrap();
        let (p, _) = next_fit(&inst);
        let loads: Vec<_> = p.bins.iter().map(Bin::load).collect();
        assert_eq!(loads, vec![r(1, 1), r(1, 1), r(1, 2)]);
    }

    #[test]
    fn full_bin_with_fewer_than_k_parts_is_closed_untouched() {
        let inst = Instance::new(3, vec![r(1, 1), r(1, 2)]).unwrap();
        let (p, t) = next_fit(&inst);
        assert_eq!(p.len(), 2);
        assert_eq!(t.close_reasons[0], CloseReason::Filled);
        assert_eq!(t.blocks.len(), 1);
    }

    #[test]
    fn mismatched_trace_is_an_error() {
        let a = Instance::new(2, vec![r(1, 2), r(1, 2)]).unwrap();
        let b = Instance::new(2, vec![r(1, 2), r(1, 3)]).unwrap();
        let (p, t) = next_fit(&a);
        assert!(check_block_inequality(&b, &p, &t).is_err());
        let c = Instance::new(3, vec![r(1, 2), r(1, 2)]).unwrap();
        assert!(check_block_inequality(&c, &p, &t).is_err());
    }

    #[test]
    fn presort_orders_by_size() {
        let inst = Instance::new(2, vec![r(1, 4), r(3, 2), r(1, 4), r(3, 4)]).unwrap();
        assert_eq!(decreasing_order(&inst), vec![1, 3, 0, 2]);
        let (p, _) = next_fit_order(&inst, &decreasing_order(&inst));
        assert!(is_valid(&inst, &p));
    }
}

//! The 7/5-approximation for `k = 2`.
//!
//! Mediums are paired with small items first (one bin when the smallest
//! small fits, otherwise split over two bins with the two largest smalls).
//! What is left goes through NEXT FIT, either directly or with the large
//! items threaded through bins seeded with the remaining smalls. Two repair
//! passes then handle the configurations where the greedy result can be
//! worse than 7/5 of optimal.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::Error;
use crate::exact::{feasible_in, Budget, ExactOptions};
use crate::instance::{Instance, ItemClass, ItemId};
use crate::nextfit::NextFit;
use crate::packing::{Bin, Label, Packing};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    #[default]
    None,
    TwoBinRepack,
    SevenBinSearch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A75Report {
    pub packing: Packing,
    /// A lone small item was treated as medium.
    pub reclassified_small: bool,
    /// The repair pattern that matched, if any.
    pub fallback: Fallback,
    /// Whether the matched repair replaced bins.
    pub fallback_applied: bool,
    /// Bin indices of the last NEXT FIT block of the final NEXT FIT phase.
    /// Cleared when a repair rewrites the packing.
    pub trailing_group: Vec<usize>,
    /// Each medium split in step 2(b), with the smallest small item that was
    /// still unpacked at that moment.
    pub critical: Vec<(ItemId, ItemId)>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    bins: usize,
    counts: BTreeMap<&'static str, usize>,
    reclassified_small: bool,
    fallback_triggered: Fallback,
    fallback_applied: bool,
    trailing_group: &'a [usize],
}

impl A75Report {
    pub fn bins(&self) -> usize {
        self.packing.len()
    }

    pub fn count(&self, label: Label) -> usize {
        self.packing.bins.iter().filter(|b| b.label == label).count()
    }

    pub fn counts(&self) -> BTreeMap<Label, usize> {
        let mut out = BTreeMap::new();
        for b in &self.packing.bins {
            *out.entry(b.label).or_default() += 1;
        }
        out
    }

    pub fn to_json(&self) -> String {
        let json = ReportJson {
            bins: self.bins(),
            counts: self.counts().into_iter().map(|(l, c)| (l.as_str(), c)).collect(),
            reclassified_small: self.reclassified_small,
            fallback_triggered: self.fallback,
            fallback_applied: self.fallback_applied,
            trailing_group: &self.trailing_group,
        };
        serde_json::to_string_pretty(&json).expect("report serializes")
    }
}

/// Split of a medium item over two bins holding smalls `s_a >= s_b`: the
/// first bin is filled exactly.
pub fn split_2b(medium: Rational, s_a: Rational, s_b: Rational) -> Result<(Rational, Rational), Error> {
    let ok = medium <= Rational::ONE
        && s_b.is_positive()
        && s_b <= s_a
        && s_a <= Rational::HALF
        && medium + s_a > Rational::ONE;
    if !ok {
        return Err(Error::Precondition(format!(
            "split_2b needs medium <= 1, 0 < s_b <= s_a <= 1/2 and medium + s_a > 1; got ({medium}, {s_a}, {s_b})"
        )));
    }
    let part1 = Rational::ONE - s_a;
    Ok((part1, medium - part1))
}

fn sorted_class(inst: &Instance, class: ItemClass, ascending: bool) -> Vec<ItemId> {
    let mut ids: Vec<ItemId> = (0..inst.len())
        .filter(|&i| ItemClass::of(inst.size(i)) == class)
        .collect();
    ids.sort_by(|&a, &b| {
        let by_size = inst.size(a).cmp(&inst.size(b));
        (if ascending { by_size } else { by_size.reverse() }).then(a.cmp(&b))
    });
    ids
}

/// Appends the bins of a NEXT FIT run and returns the indices of its last block.
fn append_next_fit(bins: &mut Vec<Bin>, nf: NextFit) -> Vec<usize> {
    let offset = bins.len();
    let (new_bins, trace) = nf.finish();
    bins.extend(new_bins);
    trace
        .blocks
        .last()
        .map(|b| (offset + b.start..offset + b.start + b.len).collect())
        .unwrap_or_default()
}

/// Steps 1 to 6 without the repair passes.
pub fn pack_greedy(inst: &Instance) -> Result<A75Report, Error> {
    if inst.k() != 2 {
        return Err(Error::UnsupportedK {
            expected: 2,
            got: inst.k(),
        });
    }
    let size = |i: ItemId| inst.size(i);
    let mut smalls: VecDeque<ItemId> = sorted_class(inst, ItemClass::Small, true).into();
    let mediums = sorted_class(inst, ItemClass::Medium, false);
    let larges = sorted_class(inst, ItemClass::Large, false);

    let mut bins: Vec<Bin> = Vec::new();
    let mut critical = Vec::new();
    let mut deferred: Vec<ItemId> = Vec::new();
    let mut reclassified: Option<ItemId> = None;

    // Step 2.
    let mut next = 0;
    while next < mediums.len() {
        let Some(&smallest) = smalls.front() else { break };
        let m = mediums[next];
        if size(m) + size(smallest) <= Rational::ONE {
            smalls.pop_front();
            bins.push(Bin::with_entries(
                Label::S2a,
                [(m, size(m)), (smallest, size(smallest))],
            ));
        } else if smalls.len() >= 2 {
            let a = smalls.pop_back().expect("two smalls");
            let b = smalls.pop_back().expect("two smalls");
            let (p1, p2) = split_2b(size(m), size(a), size(b))?;
            bins.push(Bin::with_entries(Label::S2b, [(a, size(a)), (m, p1)]));
            bins.push(Bin::with_entries(Label::S2b, [(b, size(b)), (m, p2)]));
            critical.push((m, smallest));
        } else if mediums[next + 1..]
            .iter()
            .any(|&x| size(x) + size(smallest) <= Rational::ONE)
        {
            // A later medium takes the last small; this one waits for step 3.
            deferred.push(m);
        } else {
            smalls.pop_front();
            reclassified = Some(smallest);
            break;
        }
        next += 1;
    }
    let mut remaining_mediums = deferred;
    remaining_mediums.extend_from_slice(&mediums[next..]);

    let mut report = A75Report {
        packing: Packing::default(),
        reclassified_small: reclassified.is_some(),
        fallback: Fallback::None,
        fallback_applied: false,
        trailing_group: Vec::new(),
        critical,
    };

    if smalls.is_empty() {
        // Step 3.
        let mut nf = NextFit::new(2, Label::S3);
        for &i in remaining_mediums.iter().chain(&reclassified).chain(&larges) {
            nf.push(i, size(i));
        }
        report.trailing_group = append_next_fit(&mut bins, nf);
        report.packing = Packing::new(bins);
        return Ok(report);
    }
    debug_assert!(remaining_mediums.is_empty());

    // Step 4: one bin per small, larges threaded through them.
    let mut seeded: Vec<Bin> = smalls
        .iter()
        .map(|&s| Bin::with_entries(Label::S4, [(s, size(s))]))
        .collect();
    let mut cur = 0;
    let mut spill: Option<(usize, Rational)> = None;
    'larges: for (li, &l) in larges.iter().enumerate() {
        let mut rest = size(l);
        while rest.is_positive() {
            if cur == seeded.len() {
                spill = Some((li, rest));
                break 'larges;
            }
            let put = rest.min(seeded[cur].slack());
            seeded[cur].add(l, put);
            rest -= put;
            cur += 1;
        }
    }
    // Step 5: leftover single-small bins in pairs.
    let singles: Vec<ItemId> = seeded.drain(cur..).map(|b| b.entries()[0].0).collect();
    bins.extend(seeded);
    for pair in singles.chunks(2) {
        bins.push(Bin::with_entries(Label::S5, pair.iter().map(|&s| (s, size(s)))));
    }
    // Step 6.
    if let Some((li, rest)) = spill {
        let mut nf = NextFit::new(2, Label::S6);
        nf.push(larges[li], rest);
        for &l in &larges[li + 1..] {
            nf.push(l, size(l));
        }
        report.trailing_group = append_next_fit(&mut bins, nf);
    }
    report.packing = Packing::new(bins);
    Ok(report)
}

/// Runs the algorithm including both repair passes.
pub fn pack_75(inst: &Instance) -> Result<A75Report, Error> {
    let report = pack_greedy(inst)?;
    let report = repair_two_bin(inst, report);
    let report = repair_seven_bin(inst, report);
    debug_assert!(report.count(Label::S2b).is_multiple_of(2));
    Ok(report)
}

/// Removes `targets` from the packing and returns, per item, the amount
/// they held (in order of first appearance).
fn contents(packing: &Packing, targets: &[usize]) -> Vec<(ItemId, Rational)> {
    let mut out: Vec<(ItemId, Rational)> = Vec::new();
    for &j in targets {
        for &(item, part) in packing.bins[j].entries() {
            match out.iter_mut().find(|(i, _)| *i == item) {
                Some(e) => e.1 += part,
                None => out.push((item, part)),
            }
        }
    }
    out
}

fn replace_bins(report: &mut A75Report, targets: &[usize], new_bins: Vec<Bin>) {
    let mut bins = std::mem::take(&mut report.packing.bins);
    let mut index = 0;
    bins.retain(|_| {
        index += 1;
        !targets.contains(&(index - 1))
    });
    bins.extend(new_bins.into_iter().map(|mut b| {
        b.label = Label::Repacked;
        b
    }));
    report.packing = Packing::new(bins);
    report.trailing_group.clear();
    report.fallback_applied = true;
}

/// One S2a bin, a trailing group of two bins and a single large item: try
/// the medium, then the large item, then the small item by NEXT FIT, and
/// keep the result if it needs only two bins.
pub fn repair_two_bin(inst: &Instance, mut report: A75Report) -> A75Report {
    let s2a: Vec<usize> = (0..report.bins())
        .filter(|&j| report.packing.bins[j].label == Label::S2a)
        .collect();
    let larges = inst
        .sizes()
        .iter()
        .filter(|&&s| ItemClass::of(s) == ItemClass::Large)
        .count();
    if inst.k() != 2 || s2a.len() != 1 || report.trailing_group.len() != 2 || larges != 1 {
        return report;
    }
    report.fallback = Fallback::TwoBinRepack;

    let pair = report.packing.bins[s2a[0]].sorted_entries();
    let (medium, small) = if pair[0].1 >= pair[1].1 {
        (pair[0], pair[1])
    } else {
        (pair[1], pair[0])
    };
    let mut nf = NextFit::new(2, Label::Repacked);
    nf.push(medium.0, medium.1);
    for (item, amount) in contents(&report.packing, &report.trailing_group) {
        nf.push(item, amount);
    }
    nf.push(small.0, small.1);
    let (new_bins, _) = nf.finish();
    if new_bins.len() <= 2 {
        let mut targets = report.trailing_group.clone();
        targets.push(s2a[0]);
        replace_bins(&mut report, &targets, new_bins);
    }
    report
}

/// Search limits for the seven-bin repair; the hazard pattern involves at
/// most 14 items.
pub const SEVEN_BIN_BUDGET: Budget = Budget {
    max_items: 14,
    max_bins: 7,
    max_nodes: 20_000_000,
};

/// Four S2b bins, one S2a bin and a trailing group of five bins: search for
/// a packing of exactly those contents into seven bins and use it if found.
pub fn repair_seven_bin(inst: &Instance, mut report: A75Report) -> A75Report {
    if inst.k() != 2
        || report.count(Label::S2b) != 4
        || report.count(Label::S2a) != 1
        || report.trailing_group.len() != 5
    {
        return report;
    }
    report.fallback = Fallback::SevenBinSearch;

    let mut targets: Vec<usize> = (0..report.bins())
        .filter(|&j| matches!(report.packing.bins[j].label, Label::S2a | Label::S2b))
        .collect();
    targets.extend(&report.trailing_group);
    let held = contents(&report.packing, &targets);
    let ids: Vec<ItemId> = held.iter().map(|&(i, _)| i).collect();
    let Ok(sub) = Instance::new(2, held.iter().map(|&(_, a)| a).collect()) else {
        return report;
    };
    let found = match feasible_in(&sub, 7, &ExactOptions::with_budget(SEVEN_BIN_BUDGET)) {
        Ok(Some(p)) => p,
        // Not packable in seven bins, or not decided within budget.
        Ok(None) | Err(_) => return report,
    };
    let new_bins = found
        .bins
        .into_iter()
        .map(|b| Bin::with_entries(Label::Repacked, b.entries().iter().map(|&(i, a)| (ids[i], a))))
        .collect();
    replace_bins(&mut report, &targets, new_bins);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_a75_worst;
    use crate::packing::is_valid;
    use crate::rational::r;

    fn run(sizes: Vec<Rational>) -> (Instance, A75Report) {
        let inst = Instance::new(2, sizes).unwrap();
        let rep = pack_75(&inst).unwrap();
        assert!(is_valid(&inst, &rep.packing), "{:?}", rep.packing);
        (inst, rep)
    }

    #[test]
    fn single_s2a_bin() {
        let (_, rep) = run(vec![r(3, 10), r(3, 5)]);
        assert_eq!(rep.bins(), 1);
        assert_eq!(rep.count(Label::S2a), 1);
    }

    #[test]
    fn split_then_pair() {
        let (_, rep) = run(vec![r(9, 10), r(4, 5), r(3, 20), r(1, 5), r(3, 10)]);
        assert_eq!(rep.bins(), 3);
        assert_eq!(rep.count(Label::S2b), 2);
        assert_eq!(rep.count(Label::S2a), 1);
        let b = &rep.packing.bins;
        assert_eq!(b[0].sorted_entries(), vec![(0, r(7, 10)), (4, r(3, 10))]);
        assert_eq!(b[1].sorted_entries(), vec![(0, r(1, 5)), (3, r(1, 5))]);
        assert_eq!(b[1].load(), r(2, 5));
        assert_eq!(b[2].sorted_entries(), vec![(1, r(4, 5)), (2, r(3, 20))]);
        assert_eq!(rep.critical, vec![(0, 2)]);
    }

    #[test]
    fn split_arithmetic() {
        assert_eq!(split_2b(r(9, 10), r(3, 10), r(1, 5)).unwrap(), (r(7, 10), r(1, 5)));
        assert_eq!(split_2b(r(1, 1), r(1, 2), r(1, 2)).unwrap(), (r(1, 2), r(1, 2)));
        assert_eq!(split_2b(r(3, 5), r(1, 2), r(1, 2)).unwrap(), (r(1, 2), r(1, 10)));
        assert!(split_2b(r(3, 5), r(1, 5), r(1, 5)).is_err());
        assert!(split_2b(r(9, 10), r(1, 5), r(3, 10)).is_err());
    }

    #[test]
    fn lone_small_is_reclassified() {
        let (_, rep) = run(vec![r(9, 10), r(9, 10), r(1, 4)]);
        assert!(rep.reclassified_small);
        assert_eq!(rep.count(Label::S3), rep.bins());
        assert_eq!(rep.bins(), 3);
    }

    #[test]
    fn lone_small_waits_for_a_medium_that_fits() {
        let (_, rep) = run(vec![r(9, 10), r(3, 5), r(1, 4)]);
        assert!(!rep.reclassified_small);
        assert_eq!(rep.count(Label::S2a), 1);
        assert!(rep
            .packing
            .bins
            .iter()
            .any(|b| b.label == Label::S2a && b.contains(1) && b.contains(2)));
    }

    #[test]
    fn no_smalls_means_nothing_to_reclassify() {
        let (_, rep) = run(vec![r(9, 10), r(3, 5)]);
        assert!(!rep.reclassified_small);
        assert_eq!(rep.count(Label::S3), 2);
    }

    #[test]
    fn large_through_small_bins() {
        let (_, rep) = run(vec![r(1, 4), r(1, 4), r(3, 2)]);
        assert_eq!(rep.bins(), 2);
        for b in &rep.packing.bins {
            assert_eq!(b.label, Label::S4);
            assert_eq!(b.part_of(2), Some(r(3, 4)));
        }
    }

    #[test]
    fn smalls_run_out_mid_large() {
        let (_, rep) = run(vec![r(1, 4), r(5, 2)]);
        let loads: Vec<_> = rep.packing.bins.iter().map(|b| (b.label, b.load())).collect();
        assert_eq!(
            loads,
            vec![(Label::S4, r(1, 1)), (Label::S6, r(1, 1)), (Label::S6, r(3, 4))]
        );
        assert_eq!(rep.trailing_group, vec![1, 2]);
    }

    #[test]
    fn leftover_smalls_are_paired() {
        let (_, rep) = run(vec![r(1, 4), r(1, 4)]);
        assert_eq!(rep.bins(), 1);
        assert_eq!(rep.count(Label::S5), 1);
        let (_, rep) = run(vec![r(1, 4), r(1, 3), r(1, 2)]);
        assert_eq!(rep.count(Label::S5), 2);
        assert_eq!(rep.packing.bins.iter().filter(|b| b.len() == 1).count(), 1);
    }

    #[test]
    fn bad_example_n10() {
        let (inst, _) = gen_a75_worst(10).unwrap();
        let rep = pack_75(&inst).unwrap();
        assert!(is_valid(&inst, &rep.packing));
        assert_eq!(rep.bins(), 64);
        assert_eq!(rep.count(Label::S2b), 40);
        assert_eq!(rep.count(Label::S3), 24);
        assert_eq!(rep.fallback, Fallback::None);
        for &(m, s) in &rep.critical {
            assert!(inst.size(m) + inst.size(s) > Rational::ONE);
        }
    }

    #[test]
    fn two_bin_repack_applies() {
        let (_, rep) = run(vec![r(3, 5), r(1, 5), r(6, 5)]);
        assert_eq!(rep.fallback, Fallback::TwoBinRepack);
        assert!(rep.fallback_applied);
        assert_eq!(rep.bins(), 2);
        assert_eq!(rep.count(Label::Repacked), 2);
        let b = &rep.packing.bins;
        assert_eq!(b[0].sorted_entries(), vec![(0, r(3, 5)), (2, r(2, 5))]);
        assert_eq!(b[1].sorted_entries(), vec![(1, r(1, 5)), (2, r(4, 5))]);
    }

    #[test]
    fn two_bin_repack_fails_and_keeps_packing() {
        let inst = Instance::new(2, vec![r(9, 10), r(1, 10), r(3, 2)]).unwrap();
        let greedy = pack_greedy(&inst).unwrap();
        assert_eq!(greedy.bins(), 3);
        let rep = pack_75(&inst).unwrap();
        assert_eq!(rep.fallback, Fallback::TwoBinRepack);
        assert!(!rep.fallback_applied);
        assert_eq!(rep.packing, greedy.packing);
    }

    #[test]
    fn two_bin_gate_needs_one_large() {
        let (_, rep) = run(vec![r(3, 5), r(1, 5), r(11, 10), r(11, 10)]);
        assert_eq!(rep.fallback, Fallback::None);
        let (_, rep) = run(vec![r(9, 10), r(2, 5), r(6, 5)]);
        assert_eq!(rep.fallback, Fallback::None);
    }

    #[test]
    fn seven_bin_search_finds_seven() {
        let mut sizes = vec![r(1, 20); 5];
        sizes.extend([r(39, 40), r(39, 40), r(11, 20), r(21, 5)]);
        let inst = Instance::new(2, sizes).unwrap();
        let greedy = pack_greedy(&inst).unwrap();
        assert_eq!(greedy.bins(), 10);
        assert_eq!(greedy.trailing_group.len(), 5);
        let rep = pack_75(&inst).unwrap();
        assert!(is_valid(&inst, &rep.packing));
        assert_eq!(rep.fallback, Fallback::SevenBinSearch);
        assert!(rep.fallback_applied);
        assert_eq!(rep.bins(), 7);
    }

    #[test]
    fn seven_bin_search_keeps_packing_when_impossible() {
        let mut sizes = vec![r(1, 20); 5];
        sizes.extend([r(39, 40), r(39, 40), r(11, 20), r(24, 5)]);
        let inst = Instance::new(2, sizes).unwrap();
        let greedy = pack_greedy(&inst).unwrap();
        let rep = pack_75(&inst).unwrap();
        assert_eq!(rep.fallback, Fallback::SevenBinSearch);
        assert!(!rep.fallback_applied);
        assert_eq!(rep.packing, greedy.packing);
    }

    #[test]
    fn rejects_k3() {
        let inst = Instance::new(3, vec![r(1, 2)]).unwrap();
        assert!(matches!(
            pack_75(&inst),
            Err(Error::UnsupportedK { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn empty_instance() {
        let (_, rep) = run(vec![]);
        assert_eq!(rep.bins(), 0);
    }

    #[test]
    fn report_json_has_counts() {
        let (_, rep) = run(vec![r(3, 5), r(1, 5), r(6, 5)]);
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["counts"]["Repacked"], 2);
        assert_eq!(v["fallback_triggered"], "two_bin_repack");
        assert_eq!(v["fallback_applied"], true);
    }
}

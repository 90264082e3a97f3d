//! Packings, bins, provenance labels and feasibility checking.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::instance::{Instance, ItemId};
use crate::rational::Rational;

/// Which algorithm step produced a bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Label {
    #[default]
    None,
    NextFit,
    Exact,
    Certified,
    S2a,
    S2b,
    S3,
    S4,
    S5,
    S6,
    Repacked,
}

impl Label {
    pub const ALL: [Label; 11] = [
        Label::None,
        Label::NextFit,
        Label::Exact,
        Label::Certified,
        Label::S2a,
        Label::S2b,
        Label::S3,
        Label::S4,
        Label::S5,
        Label::S6,
        Label::Repacked,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::None => "none",
            Label::NextFit => "nf",
            Label::Exact => "exact",
            Label::Certified => "certified",
            Label::S2a => "S2a",
            Label::S2b => "S2b",
            Label::S3 => "S3",
            Label::S4 => "S4",
            Label::S5 => "S5",
            Label::S6 => "S6",
            Label::Repacked => "Repacked",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Label::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown bin label `{s}`")))
    }
}

/// One bin: parts of distinct items plus a provenance label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bin {
    entries: Vec<(ItemId, Rational)>,
    pub label: Label,
}

impl Bin {
    pub fn new(label: Label) -> Self {
        Bin {
            entries: Vec::new(),
            label,
        }
    }

    /// Builds a bin from entries, merging repeated items and dropping zero parts.
    pub fn with_entries(label: Label, entries: impl IntoIterator<Item = (ItemId, Rational)>) -> Self {
        let mut bin = Bin::new(label);
        for (item, part) in entries {
            bin.add(item, part);
        }
        bin
    }

    /// Adds `part` of `item`. Parts of the same item merge; a resulting zero part is dropped.
    pub fn add(&mut self, item: ItemId, part: Rational) {
        if let Some(pos) = self.entries.iter().position(|&(i, _)| i == item) {
            self.entries[pos].1 += part;
            if self.entries[pos].1.is_zero() {
                self.entries.remove(pos);
            }
        } else if !part.is_zero() {
            self.entries.push((item, part));
        }
    }

    pub fn remove(&mut self, item: ItemId) -> Option<Rational> {
        let pos = self.entries.iter().position(|&(i, _)| i == item)?;
        Some(self.entries.remove(pos).1)
    }

    pub fn entries(&self) -> &[(ItemId, Rational)] {
        &self.entries
    }

    pub fn part_of(&self, item: ItemId) -> Option<Rational> {
        self.entries.iter().find(|&&(i, _)| i == item).map(|&(_, p)| p)
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.entries.iter().any(|&(i, _)| i == item)
    }

    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn load(&self) -> Rational {
        self.entries.iter().map(|&(_, p)| p).sum()
    }

    pub fn slack(&self) -> Rational {
        Rational::ONE - self.load()
    }

    /// Entries sorted by item id, for order-insensitive comparisons.
    pub fn sorted_entries(&self) -> Vec<(ItemId, Rational)> {
        let mut e = self.entries.clone();
        e.sort();
        e
    }
}

/// A list of bins.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Packing {
    pub bins: Vec<Bin>,
}

impl Packing {
    pub fn new(bins: Vec<Bin>) -> Self {
        Packing { bins }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.bins.iter().map(|b| b.label).collect()
    }

    pub fn relabel(mut self, label: Label) -> Self {
        for b in &mut self.bins {
            b.label = label;
        }
        self
    }

    /// Removes bins left without entries.
    pub fn drop_empty(&mut self) {
        self.bins.retain(|b| !b.is_empty());
    }

    /// Total part assigned to each item id seen in the packing.
    pub fn coverage(&self) -> BTreeMap<ItemId, Rational> {
        let mut cov = BTreeMap::new();
        for bin in &self.bins {
            for &(item, part) in bin.entries() {
                *cov.entry(item).or_insert(Rational::ZERO) += part;
            }
        }
        cov
    }

    /// Number of bins containing a part of `item`.
    pub fn degree(&self, item: ItemId) -> usize {
        self.bins.iter().filter(|b| b.contains(item)).count()
    }

    /// Canonical form that ignores bin order and labels.
    pub fn canonical(&self) -> Vec<Vec<(ItemId, Rational)>> {
        let mut bins: Vec<_> = self.bins.iter().map(Bin::sorted_entries).collect();
        bins.sort();
        bins
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let raw: PackingFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if !raw.labels.is_empty() && raw.labels.len() != raw.bins.len() {
            return Err(Error::Parse(format!(
                "{} labels for {} bins",
                raw.labels.len(),
                raw.bins.len()
            )));
        }
        let mut bins = Vec::with_capacity(raw.bins.len());
        for (idx, entries) in raw.bins.into_iter().enumerate() {
            let label = match raw.labels.get(idx) {
                Some(s) => s.parse()?,
                None => Label::None,
            };
            // Raw construction: merge repeats but keep non-positive parts so
            // validation can report them.
            let mut bin = Bin::new(label);
            for e in entries {
                match bin.entries.iter_mut().find(|(i, _)| *i == e.item) {
                    Some(slot) => slot.1 += e.part,
                    None => bin.entries.push((e.item, e.part)),
                }
            }
            bins.push(bin);
        }
        Ok(Packing { bins })
    }

    pub fn to_json(&self) -> String {
        let raw = PackingFile {
            bins: self
                .bins
                .iter()
                .map(|b| {
                    b.entries()
                        .iter()
                        .map(|&(item, part)| EntryFile { item, part })
                        .collect()
                })
                .collect(),
            labels: self.bins.iter().map(|b| b.label.to_string()).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("packing serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    item: ItemId,
    part: Rational,
}

#[derive(Serialize, Deserialize)]
struct PackingFile {
    bins: Vec<Vec<EntryFile>>,
    #[serde(default)]
    labels: Vec<String>,
}

/// A single broken packing invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownItem {
        bin: usize,
        item: ItemId,
    },
    NonPositivePart {
        bin: usize,
        item: ItemId,
        part: Rational,
    },
    Overfull {
        bin: usize,
        load: Rational,
    },
    TooManyParts {
        bin: usize,
        parts: usize,
        k: usize,
    },
    EmptyBin {
        bin: usize,
    },
    Coverage {
        item: ItemId,
        covered: Rational,
        size: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownItem { bin, item } => write!(f, "bin {bin} references unknown item {item}"),
            Violation::NonPositivePart { bin, item, part } => {
                write!(f, "bin {bin} holds non-positive part {part} of item {item}")
            }
            Violation::Overfull { bin, load } => write!(f, "bin {bin} holds {load} > 1"),
            Violation::TooManyParts { bin, parts, k } => write!(f, "bin {bin} has {parts} > k={k} parts"),
            Violation::EmptyBin { bin } => write!(f, "bin {bin} is empty"),
            Violation::Coverage { item, covered, size } => {
                write!(f, "item {item} covered {covered} of {size}")
            }
        }
    }
}

/// Every violated invariant of `packing` as a packing of `inst`; empty iff feasible.
pub fn validate_packing(inst: &Instance, packing: &Packing) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut covered = vec![Rational::ZERO; inst.len()];
    for (b, bin) in packing.bins.iter().enumerate() {
        if bin.is_empty() {
            out.push(Violation::EmptyBin { bin: b });
            continue;
        }
        if bin.len() > inst.k() {
            out.push(Violation::TooManyParts {
                bin: b,
                parts: bin.len(),
                k: inst.k(),
            });
        }
        let load = bin.load();
        if load > Rational::ONE {
            out.push(Violation::Overfull { bin: b, load });
        }
        for &(item, part) in bin.entries() {
            if item >= inst.len() {
                out.push(Violation::UnknownItem { bin: b, item });
                continue;
            }
            if !part.is_positive() {
                out.push(Violation::NonPositivePart { bin: b, item, part });
            }
            covered[item] += part;
        }
    }
    for (item, size) in inst.items() {
        if covered[item] != size {
            out.push(Violation::Coverage {
                item,
                covered: covered[item],
                size,
            });
        }
    }
    out
}

pub fn is_valid(inst: &Instance, packing: &Packing) -> bool {
    validate_packing(inst, packing).is_empty()
}

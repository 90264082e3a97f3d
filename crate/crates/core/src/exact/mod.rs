//! Exact optimum by exhaustive search over incidence structures.
//!
//! A structure fixes which items share each bin; whether the sizes can be
//! split to fit is then a max-flow question over exact rationals. The number
//! of bins is raised from the best lower bound until a structure routes, so
//! the first success is optimal. This is an oracle for small instances, not
//! a scalable solver: anything beyond the [`Budget`] is reported as an error
//! rather than answered approximately.

mod flow;
mod search;
mod structure;

pub use flow::FlowNetwork;
pub use structure::{feasible, IncidenceStructure};

use crate::bounds::lower_bounds;
use crate::error::Error;
use crate::instance::Instance;
use crate::packing::Packing;

use search::Search;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_items: usize,
    pub max_bins: usize,
    pub max_nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_items: 8,
            max_bins: 10,
            max_nodes: 5_000_000,
        }
    }
}

/// Which incidence structures the search enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StructureClass {
    /// Incidence forests only (forest plus loops when `k = 2`).
    #[default]
    Forest,
    /// Every multiset of bins; only practical for a handful of items.
    Unrestricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    pub budget: Budget,
    pub structures: StructureClass,
    pub symmetry_pruning: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            budget: Budget::default(),
            structures: StructureClass::Forest,
            symmetry_pruning: true,
        }
    }
}

impl ExactOptions {
    pub fn with_budget(budget: Budget) -> Self {
        ExactOptions {
            budget,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub opt_bins: usize,
    pub witness: Packing,
    /// Search nodes expanded over all bin counts tried.
    pub nodes: u64,
}

fn check_items(inst: &Instance, budget: &Budget) -> Result<(), Error> {
    if inst.len() > budget.max_items {
        return Err(Error::BudgetExceeded(format!(
            "{} items exceeds the limit of {}",
            inst.len(),
            budget.max_items
        )));
    }
    Ok(())
}

fn search(inst: &Instance, bins: usize, opts: &ExactOptions, max_nodes: u64) -> Result<(Option<Packing>, u64), Error> {
    let mut s = Search::new(
        inst,
        bins,
        opts.structures == StructureClass::Forest,
        opts.symmetry_pruning,
        max_nodes,
    );
    let found = s.run()?;
    Ok((if found { s.witness.take() } else { None }, s.nodes))
}

/// Minimum number of bins, with a witness packing.
pub fn exact_opt(inst: &Instance, opts: &ExactOptions) -> Result<ExactSolution, Error> {
    check_items(inst, &opts.budget)?;
    if inst.is_empty() {
        return Ok(ExactSolution {
            opt_bins: 0,
            witness: Packing::default(),
            nodes: 0,
        });
    }
    let lb = lower_bounds(inst).best;
    let mut nodes = 0;
    for bins in lb..=opts.budget.max_bins {
        let (found, used) = search(inst, bins, opts, opts.budget.max_nodes - nodes).map_err(|e| match e {
            Error::BudgetExceeded(msg) => Error::BudgetExceeded(format!("{msg} (at {bins} bins)")),
            other => other,
        })?;
        nodes += used;
        if let Some(witness) = found {
            return Ok(ExactSolution {
                opt_bins: witness.len(),
                witness,
                nodes,
            });
        }
    }
    Err(Error::BudgetExceeded(format!(
        "no packing within {} bins",
        opts.budget.max_bins
    )))
}

/// A packing into at most `bins` bins, if one exists.
pub fn feasible_in(inst: &Instance, bins: usize, opts: &ExactOptions) -> Result<Option<Packing>, Error> {
    check_items(inst, &opts.budget)?;
    if bins > opts.budget.max_bins {
        return Err(Error::BudgetExceeded(format!(
            "{bins} bins exceeds the limit of {}",
            opts.budget.max_bins
        )));
    }
    if lower_bounds(inst).best > bins {
        return Ok(None);
    }
    Ok(search(inst, bins, opts, opts.budget.max_nodes)?.0)
}

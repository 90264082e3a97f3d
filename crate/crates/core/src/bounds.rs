//! Lower bounds on the optimal number of bins.

use serde::Serialize;

use crate::instance::{item_weight, Instance};
use crate::rational::Rational;

/// The three simple lower bounds and their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    /// `ceil(sum of sizes)`: capacity.
    pub size_bound: usize,
    /// `ceil(sum of ceil(size) / k)`: every item needs `ceil(size)` parts.
    pub weight_bound: usize,
    /// `ceil(n / k)`: every item needs at least one part.
    pub count_bound: usize,
    pub best: usize,
}

pub fn lower_bounds(inst: &Instance) -> BoundsReport {
    let k = inst.k();
    let size_bound = inst.total_size().ceil() as usize;
    let weight: Rational = inst.sizes().iter().map(|&s| item_weight(s, k)).sum();
    let weight_bound = weight.ceil() as usize;
    let count_bound = inst.len().div_ceil(k);
    BoundsReport {
        size_bound,
        weight_bound,
        count_bound,
        best: size_bound.max(weight_bound).max(count_bound),
    }
}

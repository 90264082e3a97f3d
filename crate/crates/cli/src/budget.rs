//! Oracle budget resolution: defaults, then `SPLITPACK_BUDGET`, then flags.

use splitpack_core::Budget;

use crate::error::CliError;

pub const BUDGET_ENV: &str = "SPLITPACK_BUDGET";

/// Applies a `key=value` list such as `items=8,bins=10,nodes=5000000` on top
/// of `base`. Keys may be omitted or repeated; the last one wins.
pub fn parse_budget(list: &str, base: Budget) -> Result<Budget, CliError> {
    let mut budget = base;
    for field in list.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("budget field {field:?} is not key=value")))?;
        let bad = || CliError::Usage(format!("budget value {value:?} for {key} is not a count"));
        match key.trim() {
            "items" => budget.max_items = value.trim().parse().map_err(|_| bad())?,
            "bins" => budget.max_bins = value.trim().parse().map_err(|_| bad())?,
            "nodes" => budget.max_nodes = value.trim().parse().map_err(|_| bad())?,
            other => return Err(CliError::Usage(format!("unknown budget key {other:?}"))),
        }
    }
    Ok(budget)
}

/// The default budget overridden by the environment, then by explicit flags.
pub fn resolve_budget(
    env: Option<&str>,
    max_items: Option<usize>,
    max_bins: Option<usize>,
    max_nodes: Option<u64>,
) -> Result<Budget, CliError> {
    let mut budget = match env {
        Some(list) => parse_budget(list, Budget::default())?,
        None => Budget::default(),
    };
    if let Some(v) = max_items {
        budget.max_items = v;
    }
    if let Some(v) = max_bins {
        budget.max_bins = v;
    }
    if let Some(v) = max_nodes {
        budget.max_nodes = v;
    }
    Ok(budget)
}

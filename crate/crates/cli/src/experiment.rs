//! Ratio sweeps and consistency checks written as CSV.
//!
//! Trials run in parallel but each trial derives everything from its own
//! seed, and rows are collected in trial order, so the report is the same
//! for any number of worker threads.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use splitpack_core::graph::graph_of;
use splitpack_core::rational::Rational;
use splitpack_core::{
    exact_opt, feasible_in, gen_from_3partition, gen_random, gen_random_k2_packing, lower_bounds, next_fit,
    normal_form_violations, normalize, pack_75, three_partition_brute, validate_packing, Budget, Error, ExactOptions,
    Instance, SizeDistribution,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// NEXT FIT against the exact optimum.
    NfRatio,
    /// The 7/5 algorithm against the exact optimum (k = 2).
    A75Ratio,
    /// 3-Partition answers against packings of the reduced instance.
    ReductionCheck,
    /// Normal-form post-conditions on random packings (k = 2).
    NormalizeCheck,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub k: usize,
    pub max_n: usize,
    pub dist: SizeDistribution,
    /// Number of triples in reduction-check instances.
    pub m: usize,
    pub budget: Budget,
}

/// Totals over all trials, also written as the final CSV row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub trials: usize,
    pub skipped: usize,
    /// Largest ratio over the trials that were not skipped.
    pub max_ratio: Option<Rational>,
    /// Trials whose check failed: ratio above the proven bound, a
    /// disagreement, or a normal-form violation.
    pub failures: usize,
}

impl Summary {
    pub fn line(&self, suite: Suite) -> String {
        let mut s = format!(
            "suite={} trials={} skipped={} failures={}",
            suite_name(suite),
            self.trials,
            self.skipped,
            self.failures
        );
        if let Some(r) = self.max_ratio {
            s.push_str(&format!(" max_ratio={r}"));
        }
        s
    }
}

pub fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::NfRatio => "nf-ratio",
        Suite::A75Ratio => "a75-ratio",
        Suite::ReductionCheck => "reduction-check",
        Suite::NormalizeCheck => "normalize-check",
    }
}

struct Row {
    fields: Vec<String>,
    skipped: bool,
    failed: bool,
    ratio: Option<Rational>,
}

/// Seed of one trial, spread so neighbouring trials do not share streams.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (trial as u64).wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

fn sizes_field(inst: &Instance) -> String {
    inst.sizes().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn header(suite: Suite) -> Vec<&'static str> {
    match suite {
        Suite::NfRatio | Suite::A75Ratio => vec![
            "trial",
            "seed",
            "k",
            "n",
            "sizes",
            "algorithm_bins",
            "reference_bins",
            "reference",
            "ratio",
            "ratio_decimal",
            "status",
        ],
        Suite::ReductionCheck => vec![
            "trial",
            "seed",
            "k",
            "b",
            "numbers",
            "partition",
            "packs_in_m",
            "agree",
            "status",
        ],
        Suite::NormalizeCheck => vec![
            "trial",
            "seed",
            "source",
            "n",
            "bins_before",
            "bins_after",
            "cyclic_before",
            "violations",
            "idempotent",
            "status",
        ],
    }
}

fn ratio_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Row, CliError> {
    let seed = trial_seed(cfg.seed, trial);
    let n = 1 + (seed % cfg.max_n as u64) as usize;
    let inst = gen_random(n, cfg.k, cfg.dist, seed)?;
    let alg = match cfg.suite {
        Suite::A75Ratio => pack_75(&inst)?.bins(),
        _ => next_fit(&inst).0.len(),
    };
    let (reference, kind, skipped) = match exact_opt(&inst, &ExactOptions::with_budget(cfg.budget)) {
        Ok(sol) => (sol.opt_bins, "exact", false),
        Err(Error::BudgetExceeded(_)) => (lower_bounds(&inst).best, "lower_bound", true),
        Err(e) => return Err(e.into()),
    };
    let ratio = Rational::new(alg as i128, reference.max(1) as i128);
    // Bounds that must hold whenever the reference is the true optimum.
    let failed = !skipped
        && match cfg.suite {
            Suite::A75Ratio => 5 * alg > 7 * reference + 4,
            _ => alg * cfg.k > (2 * cfg.k - 1) * reference,
        };
    let status = if skipped {
        "skipped"
    } else if failed {
        "bound_violated"
    } else {
        "ok"
    };
    Ok(Row {
        fields: vec![
            trial.to_string(),
            seed.to_string(),
            cfg.k.to_string(),
            n.to_string(),
            sizes_field(&inst),
            alg.to_string(),
            reference.to_string(),
            kind.to_string(),
            ratio.to_string(),
            ratio.to_decimal_string(6),
            status.to_string(),
        ],
        skipped,
        failed,
        ratio: (!skipped).then_some(ratio),
    })
}

/// `3m` numbers strictly inside `(b/4, b/2)` summing to `m * b`.
fn three_partition_input(rng: &mut ChaCha8Rng, m: usize) -> (Vec<u64>, u64) {
    loop {
        let b = [20u64, 24, 28, 32][rng.gen_range(0..4)];
        let (lo, hi) = (b / 4 + 1, (b - 1) / 2);
        let mut numbers: Vec<u64> = (0..3 * m - 1).map(|_| rng.gen_range(lo..=hi)).collect();
        let sum: u64 = numbers.iter().sum();
        let target = m as u64 * b;
        if sum < target && (lo..=hi).contains(&(target - sum)) {
            numbers.push(target - sum);
            numbers.sort_unstable();
            return (numbers, b);
        }
    }
}

fn reduction_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Row, CliError> {
    let seed = trial_seed(cfg.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (numbers, b) = three_partition_input(&mut rng, cfg.m);
    let inst = gen_from_3partition(&numbers, b, cfg.k)?;
    let target = cfg.m;
    let answers = three_partition_brute(&numbers, b).and_then(|yes| {
        let packs = feasible_in(&inst, target, &ExactOptions::with_budget(cfg.budget))?;
        if let Some(p) = &packs {
            if !validate_packing(&inst, p).is_empty() {
                return Err(Error::InvalidPacking("oracle witness failed validation".into()));
            }
        }
        Ok((yes, packs.is_some()))
    });
    let (partition, packs, skipped) = match answers {
        Ok((yes, packs)) => (yes_no(yes), yes_no(packs), false),
        Err(Error::BudgetExceeded(_)) => (String::new(), String::new(), true),
        Err(e) => return Err(e.into()),
    };
    let failed = !skipped && partition != packs;
    let (agree, status) = match (skipped, failed) {
        (true, _) => ("", "skipped"),
        (false, true) => ("no", "disagree"),
        (false, false) => ("yes", "ok"),
    };
    Ok(Row {
        fields: vec![
            trial.to_string(),
            seed.to_string(),
            cfg.k.to_string(),
            b.to_string(),
            numbers.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
            partition,
            packs,
            agree.to_string(),
            status.to_string(),
        ],
        skipped,
        failed,
        ratio: None,
    })
}

fn normalize_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Row, CliError> {
    let seed = trial_seed(cfg.seed, trial);
    // Alternate between arbitrary (often cyclic) packings and oracle witnesses.
    let source = if trial.is_multiple_of(2) { "random" } else { "exact" };
    let (inst, before) = if trial.is_multiple_of(2) {
        gen_random_k2_packing(cfg.max_n, 2 * cfg.max_n, seed)
    } else {
        let n = 1 + (seed % cfg.max_n as u64) as usize;
        let inst = gen_random(n, 2, cfg.dist, seed)?;
        match exact_opt(&inst, &ExactOptions::with_budget(cfg.budget)) {
            Ok(sol) => (inst, sol.witness),
            Err(Error::BudgetExceeded(_)) => {
                return Ok(Row {
                    fields: vec![
                        trial.to_string(),
                        seed.to_string(),
                        source.to_string(),
                        n.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        "skipped".to_string(),
                    ],
                    skipped: true,
                    failed: false,
                    ratio: None,
                })
            }
            Err(e) => return Err(e.into()),
        }
    };
    let cyclic = !graph_of(&inst, &before)?.is_forest();
    let after = normalize(&inst, &before)?;
    let mut violations = normal_form_violations(&inst, &after)?.len() + validate_packing(&inst, &after).len();
    if after.len() > before.len() {
        violations += 1;
    }
    let idempotent = normalize(&inst, &after)?.canonical() == after.canonical();
    let failed = violations > 0 || !idempotent;
    Ok(Row {
        fields: vec![
            trial.to_string(),
            seed.to_string(),
            source.to_string(),
            inst.len().to_string(),
            before.len().to_string(),
            after.len().to_string(),
            yes_no(cyclic),
            violations.to_string(),
            yes_no(idempotent),
            if failed { "violated" } else { "ok" }.to_string(),
        ],
        skipped: false,
        failed,
        ratio: None,
    })
}

fn check_config(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.k < 2 {
        return Err(CliError::Usage(format!("k must be at least 2, got {}", cfg.k)));
    }
    if cfg.max_n == 0 {
        return Err(CliError::Usage("--max-n must be positive".into()));
    }
    match cfg.suite {
        Suite::A75Ratio | Suite::NormalizeCheck if cfg.k != 2 => Err(CliError::Usage(format!(
            "{} requires k = 2, got k = {}",
            suite_name(cfg.suite),
            cfg.k
        ))),
        Suite::ReductionCheck if cfg.k < 3 || cfg.m == 0 => Err(CliError::Usage(format!(
            "reduction-check requires k >= 3 and m >= 1, got k = {} and m = {}",
            cfg.k, cfg.m
        ))),
        _ => Ok(()),
    }
}

/// Runs every trial and renders the CSV report, summary row last.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(String, Summary), CliError> {
    check_config(cfg)?;
    let rows: Vec<Row> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| match cfg.suite {
            Suite::NfRatio | Suite::A75Ratio => ratio_trial(cfg, t),
            Suite::ReductionCheck => reduction_trial(cfg, t),
            Suite::NormalizeCheck => normalize_trial(cfg, t),
        })
        .collect::<Result<_, _>>()?;

    let summary = Summary {
        trials: rows.len(),
        skipped: rows.iter().filter(|r| r.skipped).count(),
        max_ratio: rows.iter().filter_map(|r| r.ratio).max(),
        failures: rows.iter().filter(|r| r.failed).count(),
    };

    let head = header(cfg.suite);
    let mut out = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    out.write_record(&head).map_err(csv_err)?;
    for row in &rows {
        out.write_record(&row.fields).map_err(csv_err)?;
    }
    let mut last = vec![String::new(); head.len()];
    last[0] = "summary".into();
    last[1] = format!(
        "{} trials, {} skipped, {} failed",
        summary.trials, summary.skipped, summary.failures
    );
    if let Some(r) = summary.max_ratio {
        let at = head.iter().position(|h| *h == "ratio").expect("ratio column");
        last[at] = r.to_string();
        last[at + 1] = r.to_decimal_string(6);
    }
    if cfg.suite == Suite::ReductionCheck {
        let decided = summary.trials - summary.skipped;
        last[7] = format!("{}/{decided}", decided - summary.failures);
    }
    *last.last_mut().expect("columns") = if summary.failures == 0 { "ok" } else { "failed" }.into();
    out.write_record(&last).map_err(csv_err)?;
    let bytes = out.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok((String::from_utf8(bytes).expect("csv is utf-8"), summary))
}

//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use splitpack_core::algo75::pack_greedy;
use splitpack_core::graph::graph_of;
use splitpack_core::instance::{size_type, ItemClass};
use splitpack_core::rational::{r, Rational};
use splitpack_core::*;

type Verdict = Result<String, String>;

fn oracle() -> ExactOptions {
    ExactOptions::with_budget(Budget {
        max_items: 8,
        max_bins: 14,
        max_nodes: 5_000_000,
    })
}

struct Solved {
    inst: Instance,
    opt: usize,
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:.0?}"))
    }
}

/// NEXT FIT worst-case family.
fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    for k in 2..=5 {
        for m in 1..=3 {
            let (inst, opt) = gen_nf_worst(k, m).map_err(|e| e.to_string())?;
            let (nf, trace) = next_fit(&inst);
            if nf.len() != m * (2 * k - 1) - 1 {
                failures.push(format!("k={k} M={m}: nf={} expected {}", nf.len(), m * (2 * k - 1) - 1));
            }
            if !is_valid(&inst, &nf) || !check_block_inequality(&inst, &nf, &trace).unwrap_or(false) {
                failures.push(format!("k={k} M={m}: invalid NEXT FIT run"));
            }
            if !is_valid(&inst, &opt) || opt.len() != m * k {
                failures.push(format!(
                    "k={k} M={m}: certified packing has {} bins or is invalid",
                    opt.len()
                ));
            }
        }
    }
    let ratio = |m: usize| {
        let (inst, opt) = gen_nf_worst(2, m).expect("family");
        Rational::new(next_fit(&inst).0.len() as i128, opt.len() as i128)
    };
    // (M(2k-1)-1)/(Mk) at k = 2 is 4/3 for M = 3 and 17/12 for M = 6.
    if ratio(3) != r(4, 3) || ratio(6) != r(17, 12) {
        failures.push(format!("ratios {} (M=3), {} (M=6)", ratio(3), ratio(6)));
    }
    let gaps: Vec<Rational> = (1..=8).map(|m| r(3, 2) - ratio(m)).collect();
    if !gaps.windows(2).all(|w| w[1] < w[0]) || gaps[7] != r(1, 16) {
        failures.push(format!("ratio does not approach 3/2: gaps {gaps:?}"));
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "12 (k, M) pairs exact; ratio 4/3 at M=3, 17/12 at M=6, gap to 3/2 is 1/(2M)".into()
        } else {
            failures.join("; ")
        },
    )
}

/// NEXT FIT within (2 - 1/k) of optimal.
fn criterion_2(solved: &mut Vec<Solved>) -> Verdict {
    let start = Instant::now();
    let mut summary = Vec::new();
    for k in [2usize, 3] {
        let (mut done, mut skipped, mut seed) = (0, 0, 0u64);
        let mut worst = Rational::ZERO;
        while done < 1000 {
            let n = 1 + (seed % 6) as usize;
            let dist = if seed % 2 == 0 {
                SizeDistribution::uniform()
            } else {
                SizeDistribution::mixed()
            };
            let inst = gen_random(n, k, dist, 20_000 * k as u64 + seed).expect("instance");
            seed += 1;
            let opt = match exact_opt(&inst, &oracle()) {
                Ok(s) => s.opt_bins,
                Err(Error::BudgetExceeded(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e.to_string()),
            };
            let nf = next_fit(&inst).0.len();
            if nf * k > (2 * k - 1) * opt {
                return Err(format!("k={k} sizes {:?}: nf={nf} opt={opt}", inst.sizes()));
            }
            worst = worst.max(Rational::new(nf as i128, opt as i128));
            solved.push(Solved { inst, opt });
            done += 1;
        }
        summary.push(format!("k={k}: {done} instances, {skipped} skipped, max ratio {worst}"));
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(summary.join("; "))
}

/// The 7/5 algorithm within ceil(7/5 OPT).
fn criterion_3(solved: &mut Vec<Solved>) -> Verdict {
    let start = Instant::now();
    let (mut done, mut skipped, mut seed) = (0, 0, 0u64);
    let mut worst = Rational::ZERO;
    while done < 1000 {
        let n = 1 + (seed % 7) as usize;
        let inst = gen_random(n, 2, SizeDistribution::mixed(), 90_000 + seed).expect("instance");
        seed += 1;
        let opt = match exact_opt(&inst, &oracle()) {
            Ok(s) => s.opt_bins,
            Err(Error::BudgetExceeded(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        let rep = pack_75(&inst).map_err(|e| e.to_string())?;
        if !is_valid(&inst, &rep.packing) {
            return Err(format!("invalid packing for {:?}", inst.sizes()));
        }
        let bound = (7 * opt).div_ceil(5);
        if rep.bins() > bound {
            return Err(format!("sizes {:?}: alg={} opt={opt}", inst.sizes(), rep.bins()));
        }
        worst = worst.max(Rational::new(rep.bins() as i128, opt as i128));
        solved.push(Solved { inst, opt });
        done += 1;
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("{done} instances, {skipped} skipped, max ratio {worst}"))
}

/// The 7/5 bad example.
fn criterion_4() -> Verdict {
    let mut out = Vec::new();
    for (n, alg, opt) in [(10, 64, 50), (100, 694, 500)] {
        let (inst, certified) = gen_a75_worst(n).map_err(|e| e.to_string())?;
        let rep = pack_75(&inst).map_err(|e| e.to_string())?;
        let ratio = Rational::new(rep.bins() as i128, certified.len() as i128);
        let ok = rep.bins() == alg
            && is_valid(&inst, &rep.packing)
            && certified.len() == opt
            && is_valid(&inst, &certified)
            && ratio < r(7, 5);
        if !ok {
            return Err(format!("N={n}: alg={} certified={}", rep.bins(), certified.len()));
        }
        out.push(format!("N={n}: {alg} vs {opt} (ratio {})", ratio.to_decimal_string(3)));
    }
    let (inst, _) = gen_a75_worst(10).expect("family");
    let rep = pack_75(&inst).map_err(|e| e.to_string())?;
    check(
        rep.count(Label::S2b) == 40 && rep.count(Label::S3) == 24,
        format!("{}; N=10 uses 40 S2b + 24 S3 bins", out.join(", ")),
    )
}

/// Every sorted 6-tuple strictly inside (B/4, B/2) that sums to 2B.
fn three_partition_corpus() -> Vec<(Vec<u64>, u64)> {
    let mut out = Vec::new();
    for b in [20u64, 24, 28, 32] {
        let lo = b / 4 + 1;
        let hi = (b - 1) / 2;
        fn rec(lo: u64, hi: u64, left: usize, sum: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if left == 0 {
                if sum == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for x in lo..=hi.min(sum) {
                cur.push(x);
                rec(x, hi, left - 1, sum - x, cur, out);
                cur.pop();
            }
        }
        let mut tuples = Vec::new();
        rec(lo, hi, 6, 2 * b, &mut Vec::new(), &mut tuples);
        out.extend(tuples.into_iter().map(|t| (t, b)));
    }
    out
}

/// 3-Partition reduction agrees with brute force.
fn criterion_5() -> Verdict {
    let corpus = three_partition_corpus();
    let mut summary = Vec::new();
    for k in [3usize, 4] {
        let (mut yes, mut no) = (0, 0);
        for (numbers, b) in &corpus {
            let truth = three_partition_brute(numbers, *b).map_err(|e| e.to_string())?;
            let inst = gen_from_3partition(numbers, *b, k).map_err(|e| e.to_string())?;
            if inst.total_size() != r(2, 1) {
                return Err(format!("k={k} {numbers:?}: total size {}", inst.total_size()));
            }
            let packed = feasible_in(&inst, 2, &oracle()).map_err(|e| e.to_string())?;
            if let Some(p) = &packed {
                if !is_valid(&inst, p) {
                    return Err(format!("k={k} {numbers:?}: invalid witness"));
                }
            }
            if packed.is_some() != truth {
                return Err(format!(
                    "k={k} B={b} {numbers:?}: partition {truth}, packing {}",
                    packed.is_some()
                ));
            }
            if truth {
                yes += 1;
            } else {
                no += 1;
            }
        }
        if yes < 20 || no < 20 {
            return Err(format!("k={k}: corpus has only {yes} YES / {no} NO"));
        }
        summary.push(format!("k={k}: {yes} YES + {no} NO agree"));
    }
    Ok(summary.join("; "))
}

/// Lower bounds below the optimum and the block inequality on every trace.
fn criterion_6(solved: &[Solved]) -> Verdict {
    let mut traces = 0;
    let mut gaps = 0;
    for s in solved {
        let lb = lower_bounds(&s.inst).best;
        if lb > s.opt {
            return Err(format!("sizes {:?}: bound {lb} > opt {}", s.inst.sizes(), s.opt));
        }
        gaps += usize::from(lb < s.opt);
    }
    let mut instances: Vec<Instance> = solved.iter().map(|s| s.inst.clone()).collect();
    for k in 2..=5 {
        for m in 1..=3 {
            instances.push(gen_nf_worst(k, m).expect("family").0);
        }
        for seed in 0..300 {
            instances.push(gen_random(1 + seed % 40, k, SizeDistribution::heavy(), seed as u64).expect("instance"));
        }
    }
    for inst in &instances {
        let (p, trace) = next_fit(inst);
        if !check_block_inequality(inst, &p, &trace).map_err(|e| e.to_string())? {
            return Err(format!("block inequality fails for {:?}", inst.sizes()));
        }
        traces += 1;
    }
    Ok(format!(
        "{} optima checked ({gaps} strictly above the bound), {traces} NEXT FIT traces",
        solved.len()
    ))
}

fn normal_form_errors(inst: &Instance, before: &Packing) -> Option<String> {
    let q = match normalize(inst, before) {
        Ok(q) => q,
        Err(e) => return Some(e.to_string()),
    };
    if !is_valid(inst, &q) {
        return Some("normalized packing is invalid".into());
    }
    if q.len() > before.len() {
        return Some(format!("bins grew from {} to {}", before.len(), q.len()));
    }
    let graph = graph_of(inst, &q).ok()?;
    if !graph.is_forest() {
        return Some("cycle left".into());
    }
    for (x, s) in inst.items() {
        let bound = if ItemClass::of(s) == ItemClass::Small {
            1
        } else {
            size_type(s)
        };
        if graph.degree(x) > bound || graph.neighbors(x).len() > bound {
            return Some(format!("item {x} of size {s} has degree {}", graph.degree(x)));
        }
    }
    match normalize(inst, &q) {
        Ok(again) if again.canonical() == q.canonical() => None,
        _ => Some("normalize is not idempotent".into()),
    }
}

/// Normal form on random k = 2 packings.
fn criterion_7(solved: &[Solved]) -> Verdict {
    let mut corpus: Vec<(Instance, Packing, &str)> = Vec::new();
    for seed in 0..400 {
        let (inst, p) = gen_random_k2_packing(7, 10, seed);
        corpus.push((inst, p, "constructed"));
    }
    for s in solved.iter().filter(|s| s.inst.k() == 2).take(150) {
        let witness = exact_opt(&s.inst, &oracle()).map_err(|e| e.to_string())?.witness;
        corpus.push((s.inst.clone(), witness, "exact"));
        corpus.push((s.inst.clone(), next_fit(&s.inst).0, "nf"));
        corpus.push((
            s.inst.clone(),
            pack_75(&s.inst).map_err(|e| e.to_string())?.packing,
            "a75",
        ));
    }
    let cyclic = corpus
        .iter()
        .filter(|(inst, p, _)| !graph_of(inst, p).map(|g| g.is_forest()).unwrap_or(true))
        .count();
    for (inst, p, source) in &corpus {
        if let Some(err) = normal_form_errors(inst, p) {
            return Err(format!("{source} packing of {:?}: {err}", inst.sizes()));
        }
    }
    check(
        corpus.len() >= 500,
        format!(
            "{} packings ({cyclic} with cycles) normalized with zero violations",
            corpus.len()
        ),
    )
}

/// Repair passes never make things worse and fire when they should.
fn criterion_8() -> Verdict {
    // One medium with one small in a single bin, one large item over two bins.
    let (mut applied, mut kept) = (0, 0);
    for m in 6..=10 {
        for s in 1..=(10 - m) {
            for l in 11..=20 {
                let sizes = vec![r(m, 10), r(s, 10), r(l, 10)];
                let inst = Instance::new(2, sizes.clone()).expect("instance");
                let greedy = pack_greedy(&inst).map_err(|e| e.to_string())?;
                let rep = pack_75(&inst).map_err(|e| e.to_string())?;
                if rep.fallback != Fallback::TwoBinRepack || greedy.bins() != 3 {
                    return Err(format!("{sizes:?}: two-bin pattern not triggered"));
                }
                // Medium, then large, then small fit in two bins exactly when
                // everything sums to at most two.
                let fits = m + s + l <= 20;
                let ok = is_valid(&inst, &rep.packing)
                    && rep.fallback_applied == fits
                    && rep.bins() == if fits { 2 } else { 3 }
                    && (fits || rep.packing == greedy.packing);
                if !ok {
                    return Err(format!(
                        "{sizes:?}: {} bins, applied={}",
                        rep.bins(),
                        rep.fallback_applied
                    ));
                }
                if fits {
                    applied += 1;
                } else {
                    kept += 1;
                }
            }
        }
    }

    // Two critical mediums, one medium paired with a small, and one large
    // item over five bins.
    let (mut seven_applied, mut seven_kept) = (0, 0);
    for eps in [r(1, 20), r(1, 10), r(1, 8)] {
        for critical in [Rational::ONE - eps / r(2, 1), Rational::ONE] {
            for paired in [r(11, 20), r(3, 5), r(3, 4)] {
                for large in [r(41, 10), r(21, 5), r(9, 2), r(24, 5), r(5, 1)] {
                    let mut sizes = vec![eps; 5];
                    sizes.extend([critical, critical, paired, large]);
                    let inst = Instance::new(2, sizes.clone()).expect("instance");
                    let greedy = pack_greedy(&inst).map_err(|e| e.to_string())?;
                    let rep = pack_75(&inst).map_err(|e| e.to_string())?;
                    if rep.fallback != Fallback::SevenBinSearch {
                        return Err(format!("{sizes:?}: seven-bin pattern not triggered"));
                    }
                    if !is_valid(&inst, &rep.packing) || rep.bins() > greedy.bins() {
                        return Err(format!(
                            "{sizes:?}: {} bins after repair vs {}",
                            rep.bins(),
                            greedy.bins()
                        ));
                    }
                    if rep.fallback_applied {
                        if rep.bins() != 7 {
                            return Err(format!("{sizes:?}: repaired to {} bins", rep.bins()));
                        }
                        seven_applied += 1;
                    } else {
                        if rep.packing != greedy.packing {
                            return Err(format!("{sizes:?}: packing changed without a repair"));
                        }
                        seven_kept += 1;
                    }
                }
            }
        }
    }
    check(
        applied > 0 && kept > 0 && seven_applied > 0 && seven_kept > 0,
        format!(
            "two-bin: {applied} repacked 3->2, {kept} kept; seven-bin: {seven_applied} repacked 10->7, {seven_kept} kept"
        ),
    )
}

fn main() -> ExitCode {
    let mut solved = Vec::new();
    let mut results: Vec<(u8, &str, Verdict)> = Vec::new();
    let start = Instant::now();
    results.push((1, "NEXT FIT worst-case family", criterion_1()));
    results.push((2, "NEXT FIT ratio bound", criterion_2(&mut solved)));
    results.push((3, "7/5 ratio bound", criterion_3(&mut solved)));
    results.push((4, "7/5 bad example", criterion_4()));
    results.push((5, "3-Partition equivalence", criterion_5()));
    results.push((6, "lower bounds and block inequality", criterion_6(&solved)));
    results.push((7, "normalization", criterion_7(&solved)));
    results.push((8, "repair passes", criterion_8()));

    let mut failed = 0;
    for (id, name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1?}",
        results.len() - failed,
        results.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

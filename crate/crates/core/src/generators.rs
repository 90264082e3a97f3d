//! Instance families: NEXT FIT worst case, the 7/5 bad example, the
//! 3-Partition reduction, and seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::instance::Instance;
use crate::packing::{Bin, Label, Packing};
use crate::rational::Rational;

/// One item of size `Mk - 1` followed by `M(k-1)k` items of size
/// `1/(Mk(k-1))`, plus an optimal packing into `Mk` bins.
pub fn gen_nf_worst(k: usize, m: usize) -> Result<(Instance, Packing), Error> {
    if k < 2 || m < 1 {
        return Err(Error::Precondition(format!("need k >= 2 and M >= 1, got k={k}, M={m}")));
    }
    let (ki, mi) = (k as i128, m as i128);
    let bins = mi * ki;
    let tiny = Rational::new(1, bins * (ki - 1));
    let mut sizes = vec![Rational::from(bins - 1)];
    sizes.extend(std::iter::repeat_n(tiny, m * (k - 1) * k));
    let inst = Instance::new(k, sizes)?;

    let big_part = Rational::new(bins - 1, bins);
    let mut next_tiny = 1;
    let packing = (0..bins)
        .map(|_| {
            let mut bin = Bin::with_entries(Label::Certified, [(0, big_part)]);
            for _ in 0..k - 1 {
                bin.add(next_tiny, tiny);
                next_tiny += 1;
            }
            bin
        })
        .collect();
    Ok((inst, Packing::new(packing)))
}

/// `4N` small items of size `2/N`, `2N` mediums of `1 - 1/N` and `3N`
/// mediums of `1 - 2/N` (k = 2), plus a packing into `5N` bins.
pub fn gen_a75_worst(n: usize) -> Result<(Instance, Packing), Error> {
    if n < 3 {
        return Err(Error::Precondition(format!("need N >= 3, got {n}")));
    }
    let ni = n as i128;
    let small = Rational::new(2, ni);
    let big_medium = Rational::ONE - Rational::new(1, ni);
    let medium = Rational::ONE - Rational::new(2, ni);
    let mut sizes = vec![small; 4 * n];
    sizes.extend(vec![big_medium; 2 * n]);
    sizes.extend(vec![medium; 3 * n]);
    let inst = Instance::new(2, sizes)?;

    let big_medium_id = |j: usize| 4 * n + j;
    let medium_id = |j: usize| 6 * n + j;
    let mut bins: Vec<Bin> = (0..3 * n)
        .map(|i| Bin::with_entries(Label::Certified, [(i, small), (medium_id(i), medium)]))
        .collect();
    let half = Rational::new(1, ni);
    for j in 0..2 * n {
        bins.push(Bin::with_entries(
            Label::Certified,
            [(3 * n + j / 2, half), (big_medium_id(j), big_medium)],
        ));
    }
    Ok((inst, Packing::new(bins)))
}

fn check_three_partition(numbers: &[u64], b: u64) -> Result<usize, Error> {
    if numbers.is_empty() || !numbers.len().is_multiple_of(3) {
        return Err(Error::Precondition(format!(
            "need 3m numbers with m >= 1, got {}",
            numbers.len()
        )));
    }
    let m = numbers.len() / 3;
    for (i, &x) in numbers.iter().enumerate() {
        // B/4 < x < B/2, strictly
        if 4 * x <= b || 2 * x >= b {
            return Err(Error::Precondition(format!(
                "number {x} at index {i} is not strictly between B/4 and B/2 for B={b}"
            )));
        }
    }
    let sum: u64 = numbers.iter().sum();
    if sum != m as u64 * b {
        return Err(Error::Precondition(format!(
            "numbers sum to {sum}, expected m*B = {}",
            m as u64 * b
        )));
    }
    Ok(m)
}

/// The 3-Partition reduction: the numbers can be split into triples summing
/// to `B` iff the instance packs into `m` bins.
///
/// Items `0..3m` are the scaled numbers in input order, followed by
/// `m(k-3)` padding items.
pub fn gen_from_3partition(numbers: &[u64], b: u64, k: usize) -> Result<Instance, Error> {
    if k < 3 {
        return Err(Error::Precondition(format!("need k >= 3, got {k}")));
    }
    let m = check_three_partition(numbers, b)?;
    let ki = k as i128;
    let scale = if k == 3 { b as i128 } else { 3 * ki * b as i128 };
    let mut sizes: Vec<Rational> = numbers.iter().map(|&x| Rational::new(x as i128, scale)).collect();
    if k > 3 {
        let padding = Rational::new(3 * ki - 1, 3 * ki * (ki - 3));
        sizes.extend(std::iter::repeat_n(padding, m * (k - 3)));
    }
    Instance::new(k, sizes)
}

/// Whether the numbers split into triples each summing to `B`. Only meant
/// for `m <= 4`.
pub fn three_partition_brute(numbers: &[u64], b: u64) -> Result<bool, Error> {
    let m = check_three_partition(numbers, b)?;
    if m > 4 {
        return Err(Error::BudgetExceeded(format!(
            "brute force is limited to m <= 4, got {m}"
        )));
    }
    fn rec(nums: &[u64], used: &mut [bool], b: u64) -> bool {
        let Some(first) = used.iter().position(|u| !u) else {
            return true;
        };
        used[first] = true;
        for i in first + 1..nums.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            for j in i + 1..nums.len() {
                if !used[j] && nums[first] + nums[i] + nums[j] == b {
                    used[j] = true;
                    if rec(nums, used, b) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            used[i] = false;
        }
        used[first] = false;
        false
    }
    Ok(rec(numbers, &mut vec![false; numbers.len()], b))
}

/// Size distributions for [`gen_random`]. All sizes have denominator at
/// most `max_denom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeDistribution {
    /// Uniform over fractions in (0, 1].
    Uniform { max_denom: u32 },
    /// Small (0, 1/2], medium (1/2, 1] and large (1, 5/2] items drawn with
    /// the given relative weights.
    Mixed {
        small: u32,
        medium: u32,
        large: u32,
        max_denom: u32,
    },
    /// Sizes in (0, k].
    Heavy { max_denom: u32 },
}

impl SizeDistribution {
    pub const DEFAULT_DENOM: u32 = 12;

    pub fn uniform() -> Self {
        SizeDistribution::Uniform {
            max_denom: Self::DEFAULT_DENOM,
        }
    }

    pub fn mixed() -> Self {
        SizeDistribution::Mixed {
            small: 2,
            medium: 2,
            large: 1,
            max_denom: Self::DEFAULT_DENOM,
        }
    }

    pub fn heavy() -> Self {
        SizeDistribution::Heavy {
            max_denom: Self::DEFAULT_DENOM,
        }
    }
}

impl fmt::Display for SizeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeDistribution::Uniform { max_denom } => write!(f, "uniform:{max_denom}"),
            SizeDistribution::Mixed {
                small,
                medium,
                large,
                max_denom,
            } => write!(f, "mixed:{small},{medium},{large}:{max_denom}"),
            SizeDistribution::Heavy { max_denom } => write!(f, "heavy:{max_denom}"),
        }
    }
}

/// Accepts `uniform`, `mixed` and `heavy`, optionally with parameters as
/// printed by `Display` (`uniform:12`, `mixed:2,2,1:12`, `heavy:8`).
impl FromStr for SizeDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("unknown size distribution {s:?}"));
        let mut fields = s.split(':');
        let name = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();
        let denom = |text: Option<&&str>| -> Result<u32, Error> {
            match text {
                None => Ok(Self::DEFAULT_DENOM),
                Some(t) => match t.parse::<u32>() {
                    Ok(d) if d >= 1 => Ok(d),
                    _ => Err(bad()),
                },
            }
        };
        match name {
            "uniform" if rest.len() <= 1 => Ok(SizeDistribution::Uniform {
                max_denom: denom(rest.first())?,
            }),
            "heavy" if rest.len() <= 1 => Ok(SizeDistribution::Heavy {
                max_denom: denom(rest.first())?,
            }),
            "mixed" if rest.len() <= 2 => {
                let (small, medium, large) = match rest.first() {
                    None => (2, 2, 1),
                    Some(w) => {
                        let w: Vec<u32> = w
                            .split(',')
                            .map(|x| x.parse().map_err(|_| bad()))
                            .collect::<Result<_, _>>()?;
                        match w[..] {
                            [s, m, l] if s + m + l > 0 => (s, m, l),
                            _ => return Err(bad()),
                        }
                    }
                };
                Ok(SizeDistribution::Mixed {
                    small,
                    medium,
                    large,
                    max_denom: denom(rest.get(1))?,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// A fraction in `(lo, hi]` with denominator at most `max_denom`; `lo` and
/// `hi` are given as multiples of one half.
fn fraction_between<R: Rng>(rng: &mut R, lo_halves: i128, hi_halves: i128, max_denom: u32) -> Rational {
    loop {
        let q = rng.gen_range(1..=max_denom.max(2)) as i128;
        // lo/2 < p/q <= hi/2  <=>  lo*q < 2p <= hi*q
        let p_min = (lo_halves * q) / 2 + 1;
        let p_max = (hi_halves * q) / 2;
        if p_min <= p_max {
            return Rational::new(rng.gen_range(p_min..=p_max), q);
        }
    }
}

/// Random instance, deterministic in `seed`.
pub fn gen_random(n: usize, k: usize, dist: SizeDistribution, seed: u64) -> Result<Instance, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = (0..n)
        .map(|_| match dist {
            SizeDistribution::Uniform { max_denom } => fraction_between(&mut rng, 0, 2, max_denom),
            SizeDistribution::Heavy { max_denom } => fraction_between(&mut rng, 0, 2 * k as i128, max_denom),
            SizeDistribution::Mixed {
                small,
                medium,
                large,
                max_denom,
            } => {
                let pick = rng.gen_range(0..small + medium + large);
                if pick < small {
                    fraction_between(&mut rng, 0, 1, max_denom)
                } else if pick < small + medium {
                    fraction_between(&mut rng, 1, 2, max_denom)
                } else {
                    fraction_between(&mut rng, 2, 5, max_denom)
                }
            }
        })
        .collect();
    Instance::new(k, sizes)
}

/// A random `k = 2` packing built bin by bin, with the instance read off
/// from it. Unlike solver output these often contain cycles, items spread
/// over many bins and small items sharing several bins. Parts are multiples
/// of 1/12.
pub fn gen_random_k2_packing(max_items: usize, max_bins: usize, seed: u64) -> (Instance, Packing) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_items.max(1));
    let count = rng.gen_range(1..=max_bins.max(1));
    let unit = 12;
    let mut bins: Vec<Bin> = Vec::new();
    for _ in 0..count {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || rng.gen_bool(0.2) {
            let a = rng.gen_range(1..=unit);
            bins.push(Bin::with_entries(Label::None, [(u, Rational::new(a, unit))]));
        } else {
            let a = rng.gen_range(1..unit);
            let b = rng.gen_range(1..=unit - a);
            bins.push(Bin::with_entries(
                Label::None,
                [(u, Rational::new(a, unit)), (v, Rational::new(b, unit))],
            ));
        }
    }
    for x in 0..n {
        if !bins.iter().any(|b| b.contains(x)) {
            let a = rng.gen_range(1..=unit);
            bins.push(Bin::with_entries(Label::None, [(x, Rational::new(a, unit))]));
        }
    }
    let packing = Packing::new(bins);
    let cover = packing.coverage();
    let sizes = (0..n).map(|x| cover[&x]).collect();
    (Instance::new(2, sizes).expect("parts are positive"), packing)
}

//! Problem instances and item classification.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::Rational;

/// Dense item identifier, `0..n`.
pub type ItemId = usize;

/// A splittable bin packing instance: item sizes and the per-bin part limit `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    k: usize,
    sizes: Vec<Rational>,
}

impl Instance {
    /// Checks `k >= 2` and that every size is strictly positive.
    pub fn new(k: usize, sizes: Vec<Rational>) -> Result<Self, Error> {
        if k < 2 {
            return Err(Error::InvalidInstance(format!("k must be at least 2, got {k}")));
        }
        if let Some((id, s)) = sizes.iter().enumerate().find(|(_, s)| !s.is_positive()) {
            return Err(Error::InvalidInstance(format!("item {id} has non-positive size {s}")));
        }
        Ok(Instance { k, sizes })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn size(&self, id: ItemId) -> Rational {
        self.sizes[id]
    }

    pub fn sizes(&self) -> &[Rational] {
        &self.sizes
    }

    pub fn items(&self) -> impl Iterator<Item = (ItemId, Rational)> + '_ {
        self.sizes.iter().copied().enumerate()
    }

    pub fn total_size(&self) -> Rational {
        self.sizes.iter().sum()
    }

    /// Sub-instance on the given items; returns it with the map from new ids to old ids.
    pub fn restrict(&self, items: &[ItemId]) -> (Instance, Vec<ItemId>) {
        let sizes = items.iter().map(|&i| self.sizes[i]).collect();
        (Instance { k: self.k, sizes }, items.to_vec())
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let raw: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Instance::new(raw.k, raw.items)
    }

    pub fn to_json(&self) -> String {
        let raw = InstanceFile {
            k: self.k,
            items: self.sizes.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    k: usize,
    items: Vec<Rational>,
}

/// Size class used by the `k = 2` algorithms and normalizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ItemClass {
    /// size <= 1/2
    Small,
    /// 1/2 < size <= 1
    Medium,
    /// size > 1
    Large,
}

impl ItemClass {
    pub fn of(size: Rational) -> Self {
        if size <= Rational::HALF {
            ItemClass::Small
        } else if size <= Rational::ONE {
            ItemClass::Medium
        } else {
            ItemClass::Large
        }
    }
}

/// Lower-bound weight of an item: it needs at least `ceil(size)` parts and a
/// bin holds at most `k` of them.
pub fn item_weight(size: Rational, k: usize) -> Rational {
    Rational::new(size.ceil(), k as i128)
}

/// The `i` with `size` in `((i-1)/2, i/2]`; small items have type 1.
pub fn size_type(size: Rational) -> usize {
    (size + size).ceil().max(1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::r;

    #[test]
    fn rejects_bad_instances() {
        assert!(Instance::new(1, vec![r(1, 2)]).is_err());
        assert!(Instance::new(2, vec![r(1, 2), Rational::ZERO]).is_err());
        assert!(Instance::new(2, vec![r(-1, 2)]).is_err());
        assert!(Instance::new(2, vec![]).is_ok());
    }

    #[test]
    fn classification_boundaries() {
        assert_eq!(ItemClass::of(r(1, 2)), ItemClass::Small);
        assert_eq!(ItemClass::of(r(51, 100)), ItemClass::Medium);
        assert_eq!(ItemClass::of(r(1, 1)), ItemClass::Medium);
        assert_eq!(ItemClass::of(r(101, 100)), ItemClass::Large);
    }

    #[test]
    fn weights() {
        assert_eq!(item_weight(r(3, 10), 2), r(1, 2));
        assert_eq!(item_weight(r(5, 2), 2), r(3, 2));
        assert_eq!(item_weight(r(2, 1), 3), r(2, 3));
    }

    #[test]
    fn size_types() {
        assert_eq!(size_type(r(1, 4)), 1);
        assert_eq!(size_type(r(1, 2)), 1);
        assert_eq!(size_type(r(3, 4)), 2);
        assert_eq!(size_type(r(1, 1)), 2);
        assert_eq!(size_type(r(5, 4)), 3);
        assert_eq!(size_type(r(3, 2)), 3);
    }

    #[test]
    fn json_accepts_decimals_and_fractions() {
        let inst = Instance::from_json(r#"{"k": 2, "items": ["3/4", "0.25", "2"]}"#).unwrap();
        assert_eq!(inst.sizes(), &[r(3, 4), r(1, 4), r(2, 1)]);
        assert!(Instance::from_json(r#"{"k": 2, "items": ["0"]}"#).is_err());
        assert!(Instance::from_json(r#"{"k": 2, "items": [0.5]}"#).is_err());
    }

    proptest::proptest! {
        #[test]
        fn weight_monotone_in_size(a in 1i128..400, b in 1i128..400, d in 1i128..40, k in 2usize..6) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            proptest::prop_assert!(item_weight(r(lo, d), k) <= item_weight(r(hi, d), k));
            // scales as 1/k
            proptest::prop_assert_eq!(item_weight(r(lo, d), k) * Rational::from(k), Rational::from(r(lo, d).ceil()));
        }
    }
}

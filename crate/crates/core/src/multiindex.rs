//! Multi-indices `α ∈ ℕⁿ` and the two enumerations used for Taylor sums.
//!
//! Both enumerations are colexicographic: the *last* component varies
//! slowest, so `(1, 0)` comes before `(0, 1)`. This is the same order as the
//! dense coefficient layout of [`crate::weil::WeilElement`].

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde_json::Value;

use crate::error::ArityError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(parts: impl Into<Vec<u32>>) -> Self {
        MultiIndex(parts.into())
    }

    pub fn zeros(arity: usize) -> Self {
        MultiIndex(vec![0; arity])
    }

    /// The unit index `e_i` of the given arity.
    pub fn unit(arity: usize, i: usize) -> Self {
        let mut parts = vec![0; arity];
        parts[i] = 1;
        MultiIndex(parts)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// `|α|`, the total degree.
    pub fn norm(&self) -> u64 {
        self.0.iter().map(|&a| u64::from(a)).sum()
    }

    /// `α! = Π α_i!`.
    pub fn factorial(&self) -> BigUint {
        self.0
            .iter()
            .flat_map(|&a| 1..=a)
            .fold(BigUint::one(), |acc, j| acc * j)
    }

    /// Componentwise `α ≤ β`.
    pub fn leq(&self, other: &MultiIndex) -> Result<bool, ArityError> {
        self.check_arity(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    pub fn add(&self, other: &MultiIndex) -> Result<MultiIndex, ArityError> {
        self.check_arity(other)?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Extends with trailing zeros up to `arity`. Indices already at least
    /// that long are returned unchanged.
    pub fn padded(&self, arity: usize) -> MultiIndex {
        let mut parts = self.0.clone();
        if parts.len() < arity {
            parts.resize(arity, 0);
        }
        MultiIndex(parts)
    }

    /// Number of indices in the box `{α ≤ self}`.
    pub fn box_len(&self) -> usize {
        self.0.iter().map(|&k| k as usize + 1).product()
    }

    /// All `α ≤ k` in colexicographic order.
    pub fn enumerate_box(k: &MultiIndex) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(k.box_len());
        let mut current = vec![0u32; k.arity()];
        loop {
            out.push(MultiIndex(current.clone()));
            // mixed-radix increment, first component fastest
            let mut i = 0;
            loop {
                if i == current.len() {
                    return out;
                }
                if current[i] < k.0[i] {
                    current[i] += 1;
                    break;
                }
                current[i] = 0;
                i += 1;
            }
        }
    }

    /// All `α ∈ ℕⁿ` with `|α| ≤ total`, in colexicographic order.
    pub fn enumerate_simplex(arity: usize, total: u32) -> Vec<MultiIndex> {
        fn go(arity: usize, budget: u32, suffix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if arity == 0 {
                out.push(MultiIndex(suffix.iter().rev().copied().collect()));
                return;
            }
            for last in 0..=budget {
                suffix.push(last);
                go(arity - 1, budget - last, suffix, out);
                suffix.pop();
            }
        }
        let mut out = Vec::new();
        go(arity, total, &mut Vec::with_capacity(arity), &mut out);
        out
    }

    pub fn to_json(&self) -> Value {
        Value::from(self.0.clone())
    }

    pub fn from_json(v: &Value) -> Option<MultiIndex> {
        v.as_array()?
            .iter()
            .map(|x| x.as_u64().and_then(|n| u32::try_from(n).ok()))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    fn check_arity(&self, other: &MultiIndex) -> Result<(), ArityError> {
        if self.arity() == other.arity() {
            Ok(())
        } else {
            Err(ArityError {
                expected: self.arity(),
                found: other.arity(),
            })
        }
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(parts: Vec<u32>) -> Self {
        MultiIndex(parts)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(parts: [u32; N]) -> Self {
        MultiIndex(parts.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;

    fn mi(parts: &[u32]) -> MultiIndex {
        MultiIndex::new(parts.to_vec())
    }

    #[test]
    fn norm_and_factorial() {
        assert_eq!(mi(&[2, 1]).norm(), 3);
        assert_eq!(mi(&[]).norm(), 0);
        assert_eq!(mi(&[0, 0, 5]).norm(), 5);
        assert_eq!(mi(&[2, 1]).factorial(), BigUint::from(2u32));
        assert_eq!(mi(&[0, 0]).factorial(), BigUint::from(1u32));
        assert_eq!(mi(&[3, 2]).factorial(), BigUint::from(12u32));
    }

    #[test]
    fn factorial_does_not_wrap() {
        // 30! overflows u64
        let expected: BigUint = "265252859812191058636308480000000".parse().unwrap();
        assert_eq!(mi(&[30]).factorial(), expected);
    }

    #[test]
    fn leq_examples() {
        assert!(mi(&[1, 0]).leq(&mi(&[1, 1])).unwrap());
        assert!(!mi(&[2, 0]).leq(&mi(&[1, 1])).unwrap());
        assert!(mi(&[0, 0]).leq(&mi(&[0, 0])).unwrap());
        assert_eq!(
            mi(&[0]).leq(&mi(&[0, 0])),
            Err(ArityError {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn box_examples() {
        assert_eq!(
            MultiIndex::enumerate_box(&mi(&[1, 1])),
            vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1]), mi(&[1, 1])]
        );
        assert_eq!(
            MultiIndex::enumerate_box(&mi(&[2])),
            vec![mi(&[0]), mi(&[1]), mi(&[2])]
        );
        assert_eq!(MultiIndex::enumerate_box(&mi(&[0, 0])), vec![mi(&[0, 0])]);
        assert_eq!(MultiIndex::enumerate_box(&mi(&[])), vec![mi(&[])]);
    }

    #[test]
    fn simplex_examples() {
        assert_eq!(
            MultiIndex::enumerate_simplex(2, 1),
            vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]
        );
        assert_eq!(
            MultiIndex::enumerate_simplex(1, 3),
            vec![mi(&[0]), mi(&[1]), mi(&[2]), mi(&[3])]
        );
        assert_eq!(MultiIndex::enumerate_simplex(0, 4), vec![mi(&[])]);
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Brute force: filter the cube `{0..=N}ⁿ`.
    fn simplex_by_filter(arity: usize, total: u32) -> Vec<MultiIndex> {
        MultiIndex::enumerate_box(&MultiIndex::new(vec![total; arity]))
            .into_iter()
            .filter(|a| a.norm() <= u64::from(total))
            .collect()
    }

    #[test]
    fn simplex_matches_filtered_cube() {
        assert_eq!(MultiIndex::enumerate_simplex(2, 2).len(), 6);
        for n in 0..=4 {
            for total in 0..=4 {
                let got = MultiIndex::enumerate_simplex(n, total);
                assert_eq!(got, simplex_by_filter(n, total), "n={n} N={total}");
                assert_eq!(
                    got.len() as u64,
                    binomial(u64::from(total) + n as u64, n as u64)
                );
            }
        }
    }

    #[test]
    fn box_exhaustive_counts() {
        for n in 0..=4usize {
            let all_k = MultiIndex::enumerate_box(&MultiIndex::new(vec![4; n]));
            for k in all_k {
                let items = MultiIndex::enumerate_box(&k);
                assert_eq!(items.len(), k.box_len());
                let unique: HashSet<_> = items.iter().collect();
                assert_eq!(unique.len(), items.len());
                assert!(items.iter().all(|a| a.leq(&k).unwrap()));
            }
        }
    }

    fn triple() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<u32>)> {
        (0usize..4).prop_flat_map(|n| {
            (
                prop::collection::vec(0u32..3, n),
                prop::collection::vec(0u32..3, n),
                prop::collection::vec(0u32..3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn leq_is_a_partial_order((a, b, c) in triple()) {
            let (a, b, c) = (mi(&a), mi(&b), mi(&c));
            prop_assert!(a.leq(&a).unwrap());
            if a.leq(&b).unwrap() && b.leq(&a).unwrap() {
                prop_assert_eq!(&a, &b);
            }
            if a.leq(&b).unwrap() && b.leq(&c).unwrap() {
                prop_assert!(a.leq(&c).unwrap());
            }
        }

        #[test]
        fn factorial_is_supermultiplicative((a, b, _c) in triple()) {
            let (a, b) = (mi(&a), mi(&b));
            let sum = a.add(&b).unwrap();
            prop_assert!(sum.factorial() >= a.factorial() * b.factorial());
        }

        #[test]
        fn json_round_trip(parts in prop::collection::vec(0u32..100, 0..5)) {
            let a = mi(&parts);
            prop_assert_eq!(MultiIndex::from_json(&a.to_json()), Some(a));
        }
    }
}

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::gfp::Prime;

/// Multiplicity of each power `p^i` among the nonzero elementary divisors,
/// counted by p-part: an invariant factor `d` contributes to exponent
/// `v_p(d)`.
///
/// `size` is `min(rows, cols)`; the number of zero invariant factors is
/// `size - total()`. Exponents are listed contiguously from 0 to the largest
/// one present, so intermediate zero counts appear explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryDivisorProfile {
    pub p: Prime,
    pub size: usize,
    pub multiplicities: BTreeMap<u32, usize>,
}

/// `v_p(x)` for nonzero `x`.
pub fn valuation(x: &BigInt, p: Prime) -> u32 {
    assert!(!x.is_zero(), "valuation of zero");
    let pb = BigInt::from(p.get());
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = (&x / &pb, &x % &pb);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

impl ElementaryDivisorProfile {
    pub fn from_valuations(
        p: Prime,
        size: usize,
        valuations: impl IntoIterator<Item = u32>,
    ) -> Self {
        let mut multiplicities = BTreeMap::new();
        for v in valuations {
            *multiplicities.entry(v).or_insert(0) += 1;
        }
        let top = multiplicities.keys().next_back().copied();
        if let Some(top) = top {
            for i in 0..top {
                multiplicities.entry(i).or_insert(0);
            }
        }
        ElementaryDivisorProfile {
            p,
            size,
            multiplicities,
        }
    }

    /// p-parts of a list of invariant factors; zeros are skipped.
    pub fn from_invariant_factors(p: Prime, size: usize, factors: &[BigInt]) -> Self {
        Self::from_valuations(
            p,
            size,
            factors
                .iter()
                .filter(|d| !d.is_zero())
                .map(|d| valuation(d, p)),
        )
    }

    /// Multiplicity `f_i` of `p^i`.
    pub fn count(&self, i: u32) -> usize {
        self.multiplicities.get(&i).copied().unwrap_or(0)
    }

    /// Number of nonzero elementary divisors (the rank).
    pub fn total(&self) -> usize {
        self.multiplicities.values().sum()
    }

    pub fn zero_factors(&self) -> usize {
        self.size - self.total()
    }

    /// `Σ i·f_i`, the p-adic valuation of the product of the nonzero divisors.
    pub fn weighted_sum(&self) -> u64 {
        self.multiplicities
            .iter()
            .map(|(&i, &f)| u64::from(i) * f as u64)
            .sum()
    }

    pub fn max_exponent(&self) -> Option<u32> {
        self.multiplicities
            .iter()
            .rev()
            .find(|(_, &f)| f > 0)
            .map(|(&i, _)| i)
    }

    /// `(f_0, ..., f_{len-1})`.
    pub fn counts(&self, len: usize) -> Vec<usize> {
        (0..len as u32).map(|i| self.count(i)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

impl fmt::Display for ElementaryDivisorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>12}  {:>12}", "Elem. Div.", "Multiplicity")?;
        for (&i, &m) in &self.multiplicities {
            let d = num_bigint::BigUint::from(self.p.get()).pow(i);
            writeln!(f, "{:>12}  {:>12}", d.to_string(), m)?;
        }
        if self.zero_factors() > 0 {
            writeln!(f, "{:>12}  {:>12}", 0, self.zero_factors())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_layout() {
        let p = Prime::new(2).unwrap();
        let prof = ElementaryDivisorProfile::from_valuations(p, 5, [0, 0, 2, 3, 3]);
        let v: serde_json::Value = serde_json::from_str(&prof.to_json()).unwrap();
        assert_eq!(v["p"], 2);
        assert_eq!(v["size"], 5);
        let keys: Vec<&String> = v["multiplicities"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["0", "1", "2", "3"]);
        assert_eq!(v["multiplicities"]["1"], 0);
        let compact = serde_json::to_string(&prof).unwrap();
        assert_eq!(
            compact,
            r#"{"p":2,"size":5,"multiplicities":{"0":2,"1":0,"2":1,"3":2}}"#
        );
        let back: ElementaryDivisorProfile = serde_json::from_str(&compact).unwrap();
        assert_eq!(back, prof);
        assert_eq!(prof.weighted_sum(), 2 + 6);
    }

    #[test]
    fn rejects_non_prime_in_json() {
        let r: Result<ElementaryDivisorProfile, _> =
            serde_json::from_str(r#"{"p":4,"size":1,"multiplicities":{"0":1}}"#);
        assert!(r.is_err());
    }

    #[test]
    fn factors_to_profile() {
        let p = Prime::new(3).unwrap();
        let f: Vec<BigInt> = [1, 6, 18, 0].into_iter().map(BigInt::from).collect();
        let prof = ElementaryDivisorProfile::from_invariant_factors(p, 4, &f);
        assert_eq!(prof.counts(3), vec![1, 1, 1]);
        assert_eq!(prof.zero_factors(), 1);
        assert_eq!(valuation(&BigInt::from(-162), p), 4);
    }
}

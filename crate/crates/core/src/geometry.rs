//! Subspaces of F_p^n in canonical form, and their enumeration.
//!
//! Every subspace is stored through the reduced row echelon form of a basis,
//! so two values are equal exactly when they span the same space. Families
//! are ordered lexicographically by the flattened RREF basis, which fixes the
//! row and column order of every incidence matrix built from them.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gfp::{rref, FpMatrix, Prime, Reducer};

/// Default limit on the number of subspaces a single family may hold.
pub const DEFAULT_FAMILY_CAP: u64 = 1_000_000;

/// Environment variable read by [`ResourceGuard::from_env`].
pub const FAMILY_CAP_ENV: &str = "SKEWLINES_FAMILY_CAP";

/// Size limit applied before enumerating a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceGuard {
    pub cap: u64,
    pub allow_override: bool,
}

impl Default for ResourceGuard {
    fn default() -> Self {
        ResourceGuard {
            cap: DEFAULT_FAMILY_CAP,
            allow_override: false,
        }
    }
}

impl ResourceGuard {
    pub fn unlimited() -> Self {
        ResourceGuard {
            cap: u64::MAX,
            allow_override: true,
        }
    }

    /// Default guard with the cap taken from `SKEWLINES_FAMILY_CAP` if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(FAMILY_CAP_ENV) {
            Ok(v) => {
                let cap = v.trim().parse().map_err(|_| {
                    Error::Parse(format!(
                        "{FAMILY_CAP_ENV}={v:?} is not a non-negative integer"
                    ))
                })?;
                Ok(ResourceGuard {
                    cap,
                    allow_override: false,
                })
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn check(&self, size: &BigUint) -> Result<()> {
        if self.allow_override || *size <= BigUint::from(self.cap) {
            Ok(())
        } else {
            Err(Error::ResourceCap {
                size: size.to_string(),
                cap: self.cap,
            })
        }
    }
}

/// Number of `r`-dimensional subspaces of an `n`-dimensional space over F_q.
///
/// Returns 0 when `r < 0` or `r > n`.
pub fn gaussian_binomial(n: i64, r: i64, q: u64) -> BigUint {
    if r < 0 || r > n || n < 0 {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= q.pow((n - i) as u32) - &one;
        den *= q.pow((i + 1) as u32) - &one;
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// An `r`-subspace of F_p^n, held as its canonical RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    basis: FpMatrix,
}

impl Subspace {
    /// The span of the rows of `vectors` (which need not be independent).
    pub fn span(vectors: &FpMatrix) -> Subspace {
        let r = rref(vectors);
        Subspace {
            n: vectors.cols(),
            basis: r.matrix.truncate_rows(r.rank),
        }
    }

    pub fn prime(&self) -> Prime {
        self.basis.prime()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    /// The flattened canonical basis; the key of the canonical order.
    pub fn key(&self) -> &[u32] {
        self.basis.data()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.prime() != other.prime() || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of F_{}^{} and F_{}^{}",
                self.prime(),
                self.n,
                other.prime(),
                other.n
            )));
        }
        Ok(())
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(intersection_dim(self, other)? == other.dim())
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.prime(), self.n, self.dim())
            .cmp(&(other.prime(), other.n, other.dim()))
            .then_with(|| self.key().cmp(other.key()))
    }
}

/// dim(R ∩ S) = dim R + dim S − rank of the stacked bases.
pub fn intersection_dim(a: &Subspace, b: &Subspace) -> Result<usize> {
    a.check_compatible(b)?;
    let mut scratch = Vec::new();
    Ok(intersection_dim_raw(
        Reducer::new(a.prime()),
        a.prime(),
        a.n,
        a.key(),
        b.key(),
        &mut scratch,
    ))
}

/// Incidence of the skew relation: the two subspaces meet only in 0.
pub fn is_incident(a: &Subspace, b: &Subspace) -> Result<bool> {
    Ok(intersection_dim(a, b)? == 0)
}

/// Allocation-free intersection dimension used by the incidence builders.
pub(crate) fn intersection_dim_raw(
    red: Reducer,
    p: Prime,
    n: usize,
    a: &[u32],
    b: &[u32],
    scratch: &mut Vec<u32>,
) -> usize {
    scratch.clear();
    scratch.extend_from_slice(a);
    scratch.extend_from_slice(b);
    let rows = scratch.len() / n.max(1);
    let pu = p.as_u32();
    let mut r = 0;
    for c in 0..n {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| scratch[i * n + c] != 0) else {
            continue;
        };
        for j in 0..n {
            scratch.swap(piv * n + j, r * n + j);
        }
        let inv = p.inv(scratch[r * n + c]);
        for i in r + 1..rows {
            let f = scratch[i * n + c];
            if f != 0 {
                let g = pu - red.mul(f, inv);
                for j in c..n {
                    scratch[i * n + j] = red.fma(scratch[i * n + j], g, scratch[r * n + j]);
                }
            }
        }
        r += 1;
    }
    (a.len() + b.len()) / n.max(1) - r
}

/// The canonically ordered list of all `r`-subspaces of F_p^n.
#[derive(Debug, Clone)]
pub struct SubspaceFamily {
    p: Prime,
    n: usize,
    r: usize,
    members: Vec<Subspace>,
    index: HashMap<Vec<u32>, usize>,
}

impl SubspaceFamily {
    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Subspace {
        &self.members[i]
    }

    /// Position of `s` in the canonical order.
    pub fn position(&self, s: &Subspace) -> Option<usize> {
        if s.prime() != self.p || s.n != self.n || s.dim() != self.r {
            return None;
        }
        self.index.get(s.key()).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subspace> {
        self.members.iter()
    }
}

impl<'a> IntoIterator for &'a SubspaceFamily {
    type Item = &'a Subspace;
    type IntoIter = std::slice::Iter<'a, Subspace>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Lexicographically ordered `r`-element subsets of `0..n`.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            if n - c < r - cur.len() {
                break;
            }
            cur.push(c);
            go(c + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Enumerates every `r`-subspace of F_p^n by generating RREF matrices directly:
/// one pass per pivot-column set, one matrix per filling of the free entries.
pub fn enumerate_subspaces(
    p: Prime,
    n: usize,
    r: usize,
    guard: &ResourceGuard,
) -> Result<SubspaceFamily> {
    if r > n {
        return Err(Error::InvalidSpec(format!(
            "r = {r} exceeds ambient dimension n = {n}"
        )));
    }
    let expected = gaussian_binomial(n as i64, r as i64, p.get());
    guard.check(&expected)?;
    let expected = expected.to_usize().ok_or_else(|| Error::ResourceCap {
        size: gaussian_binomial(n as i64, r as i64, p.get()).to_string(),
        cap: guard.cap,
    })?;

    let pu = p.as_u32();
    let mut members = Vec::with_capacity(expected);
    for pivots in combinations(n, r) {
        let mut template = vec![0u32; r * n];
        let mut free = Vec::new();
        for (i, &c) in pivots.iter().enumerate() {
            template[i * n + c] = 1;
            for j in c + 1..n {
                if !pivots.contains(&j) {
                    free.push(i * n + j);
                }
            }
        }
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut data = template.clone();
            for (&pos, &d) in free.iter().zip(&digits) {
                data[pos] = d;
            }
            members.push(Subspace {
                n,
                basis: FpMatrix::from_raw(p, r, n, data),
            });
            // odometer over the free entries
            let mut k = digits.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < pu {
                    break;
                }
                digits[k] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    members.sort_unstable();
    if members.len() != expected {
        return Err(Error::Inconsistent(format!(
            "enumerated {} subspaces, Gaussian binomial gives {expected}",
            members.len()
        )));
    }
    let index = members
        .iter()
        .enumerate()
        .map(|(i, s)| (s.key().to_vec(), i))
        .collect();
    Ok(SubspaceFamily {
        p,
        n,
        r,
        members,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn span(q: u64, rows: &[Vec<i64>]) -> Subspace {
        Subspace::span(&FpMatrix::from_rows(p(q), rows).unwrap())
    }

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(4, 0, 3), BigUint::one());
        assert_eq!(gaussian_binomial(4, 4, 3), BigUint::one());
        assert_eq!(gaussian_binomial(4, 5, 3), BigUint::zero());
        assert_eq!(gaussian_binomial(4, -1, 3), BigUint::zero());
        // (3^4 - 1)/(3 - 1) one-dimensional subspaces
        assert_eq!(gaussian_binomial(4, 1, 3), BigUint::from(40u32));
        for q in [2u64, 3, 5, 7] {
            let expect = (q * q + 1) * (q * q + q + 1);
            assert_eq!(gaussian_binomial(4, 2, q), BigUint::from(expect));
        }
    }

    /// Brute-force count of distinct spans of all vectors in F_p^n.
    #[test]
    fn one_subspaces_by_brute_force() {
        for (q, n) in [(2u64, 4usize), (3, 4), (5, 3)] {
            let mut spans = BTreeSet::new();
            let total = q.pow(n as u32);
            for code in 1..total {
                let v: Vec<i64> = (0..n)
                    .map(|i| (code / q.pow(i as u32) % q) as i64)
                    .collect();
                spans.insert(span(q, &[v]).key().to_vec());
            }
            let fam = enumerate_subspaces(p(q), n, 1, &ResourceGuard::default()).unwrap();
            assert_eq!(fam.len(), spans.len());
            assert_eq!(fam.len() as u64, (total - 1) / (q - 1));
        }
    }

    #[test]
    fn three_subspaces_of_f3_4_are_dual_to_points() {
        let fam = enumerate_subspaces(p(3), 4, 3, &ResourceGuard::default()).unwrap();
        assert_eq!(fam.len(), 40);
    }

    #[test]
    fn intersection_examples() {
        let e12 = span(2, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        let e34 = span(2, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        let e23 = span(2, &[vec![0, 1, 0, 0], vec![0, 0, 1, 0]]);
        assert_eq!(intersection_dim(&e12, &e12).unwrap(), 2);
        assert_eq!(intersection_dim(&e12, &e34).unwrap(), 0);
        assert_eq!(intersection_dim(&e12, &e23).unwrap(), 1);
        assert!(is_incident(&e12, &e34).unwrap());
        assert!(!is_incident(&e12, &e12).unwrap());
        assert!(!is_incident(&e12, &e23).unwrap());
    }

    #[test]
    fn mismatched_ambient_rejected() {
        let a = span(2, &[vec![1, 0, 0, 0]]);
        let b = span(2, &[vec![1, 0, 0]]);
        let c = span(3, &[vec![1, 0, 0, 0]]);
        assert!(intersection_dim(&a, &b).is_err());
        assert!(is_incident(&a, &c).is_err());
    }

    #[test]
    fn span_is_canonical() {
        let a = span(5, &[vec![2, 4, 1, 0], vec![1, 1, 1, 1]]);
        let b = span(5, &[vec![3, 0, 2, 1], vec![1, 1, 1, 1], vec![0, 0, 0, 0]]);
        // (3,0,2,1) = (2,4,1,0) + (1,1,1,1)
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn guard_rejects_large_families() {
        let g = ResourceGuard {
            cap: 100,
            allow_override: false,
        };
        let err = enumerate_subspaces(p(3), 4, 2, &g).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
        let g = ResourceGuard {
            cap: 100,
            allow_override: true,
        };
        assert_eq!(enumerate_subspaces(p(3), 4, 2, &g).unwrap().len(), 130);
    }

    #[test]
    fn line_skew_degree_is_p4() {
        for q in [2u64, 3] {
            let fam = enumerate_subspaces(p(q), 4, 2, &ResourceGuard::default()).unwrap();
            for x in &fam {
                let deg = fam.iter().filter(|y| is_incident(x, y).unwrap()).count();
                assert_eq!(deg as u64, q.pow(4));
            }
        }
    }

    #[test]
    fn edge_dimensions() {
        let g = ResourceGuard::default();
        let zero = enumerate_subspaces(p(5), 3, 0, &g).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero.get(0).dim(), 0);
        let full = enumerate_subspaces(p(5), 3, 3, &g).unwrap();
        assert_eq!(full.len(), 1);
        assert!(enumerate_subspaces(p(5), 3, 4, &g).is_err());
    }
}

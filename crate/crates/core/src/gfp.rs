//! Dense linear algebra over the prime field F_p.
//!
//! Residues are stored as least non-negative `u32` values, so `p` must be
//! below 2^32. For `p = 2` the echelon routines switch to a bit-packed
//! representation (see [`gf2`]) which produces identical output.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod gf2;

/// A prime number, checked by trial division at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p > u64::from(u32::MAX) {
            return Err(Error::InvalidSpec(format!("p = {p} must be below 2^32")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u64 {
        u64::from(self.0)
    }

    #[inline]
    pub fn as_u32(self) -> u32 {
        self.0
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.0 != 0);
        pow_mod(u64::from(a), self.get() - 2, self.get()) as u32
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.get()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = u128::from(m);
    let mut acc = 1u128 % m128;
    let mut b = u128::from(base % m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Reduction of `a + g*b` style accumulators modulo a fixed `p`.
///
/// For `p < 2^16` every accumulator fits in `u32` and we use Lemire's
/// multiply-shift remainder; otherwise fall back to hardware division.
#[derive(Clone, Copy)]
pub(crate) struct Reducer {
    p: u32,
    magic: u64,
    small: bool,
}

impl Reducer {
    pub(crate) fn new(p: Prime) -> Self {
        let p = p.as_u32();
        Reducer {
            p,
            magic: (u64::MAX / u64::from(p)).wrapping_add(1),
            small: p < (1 << 16),
        }
    }

    /// `(a + g*b) mod p` for residues `a, g, b < p`.
    #[inline(always)]
    pub(crate) fn fma(&self, a: u32, g: u32, b: u32) -> u32 {
        if self.small {
            let x = a + g * b;
            let lowbits = self.magic.wrapping_mul(u64::from(x));
            ((u128::from(lowbits) * u128::from(self.p)) >> 64) as u32
        } else {
            ((u64::from(a) + u64::from(g) * u64::from(b)) % u64::from(self.p)) as u32
        }
    }

    #[inline(always)]
    pub(crate) fn mul(&self, g: u32, b: u32) -> u32 {
        self.fma(0, g, b)
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix(p={}, {}x{})", self.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    /// Builds a matrix from arbitrary `u64` entries, reducing each mod p.
    pub fn new(p: Prime, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let data = entries.into_iter().map(|e| (e % p.get()) as u32).collect();
        Ok(FpMatrix {
            p,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(p: Prime, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let pi = p.get() as i64;
        let data = rows
            .iter()
            .flatten()
            .map(|&e| e.rem_euclid(pi) as u32)
            .collect();
        Ok(FpMatrix {
            p,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Entries must already be reduced.
    pub(crate) fn from_raw(p: Prime, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&e| e < p.as_u32()));
        FpMatrix {
            p,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(
        p: Prime,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push((f(i, j) % p.get()) as u32);
            }
        }
        FpMatrix {
            p,
            rows,
            cols,
            data,
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = (v % self.p.get()) as u32;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        FpMatrix {
            p: self.p,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.p != other.p || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {}x{} over {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Keeps the first `k` rows.
    pub fn truncate_rows(mut self, k: usize) -> FpMatrix {
        let k = k.min(self.rows);
        self.data.truncate(k * self.cols);
        self.rows = k;
        self
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// Reduced row echelon form over F_p. Uses the bit-packed path for `p = 2`.
pub fn rref(m: &FpMatrix) -> Rref {
    if m.p.get() == 2 {
        gf2::BitMatrix::from_fp(m).rref()
    } else {
        rref_generic(m)
    }
}

/// Reduced row echelon form using the word-per-entry path for every `p`.
pub fn rref_generic(m: &FpMatrix) -> Rref {
    let mut a = m.clone();
    let pivot_cols = eliminate(&mut a, true);
    Rref {
        rank: pivot_cols.len(),
        matrix: a,
        pivot_cols,
    }
}

/// Rank over F_p (forward elimination only).
pub fn rank(m: &FpMatrix) -> usize {
    if m.p.get() == 2 {
        return gf2::BitMatrix::from_fp(m).rank();
    }
    let mut a = m.clone();
    eliminate(&mut a, false).len()
}

/// Gauss-Jordan elimination in place; returns the pivot columns.
///
/// With `reduce_above = false` only entries below each pivot are cleared,
/// which is enough for the rank and skips the back-substitution work.
fn eliminate(a: &mut FpMatrix, reduce_above: bool) -> Vec<usize> {
    let p = a.p;
    let pu = p.as_u32();
    let red = Reducer::new(p);
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a.data[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in c..cols {
                a.data.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = p.inv(a.data[r * cols + c]);
        if inv != 1 {
            for e in &mut a.data[r * cols + c..(r + 1) * cols] {
                *e = red.mul(*e, inv);
            }
        }
        let (head, tail) = a.data.split_at_mut(r * cols);
        let (pivot_row, below) = tail.split_at_mut(cols);
        let pivot_row = &pivot_row[c..];
        let update = |row: &mut [u32]| {
            let f = row[c];
            if f != 0 {
                let g = pu - f;
                for (x, &y) in row[c..].iter_mut().zip(pivot_row) {
                    *x = red.fma(*x, g, y);
                }
            }
        };
        below.chunks_exact_mut(cols).for_each(update);
        if reduce_above {
            head.chunks_exact_mut(cols).for_each(update);
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Matrix product over F_p.
pub fn mat_mul_mod_p(a: &FpMatrix, b: &FpMatrix) -> Result<FpMatrix> {
    if a.p != b.p {
        return Err(Error::DimensionMismatch(format!(
            "operands over different fields F_{} and F_{}",
            a.p, b.p
        )));
    }
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let red = Reducer::new(a.p);
    let mut out = FpMatrix::zeros(a.p, a.rows, b.cols);
    for i in 0..a.rows {
        let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let f = a.data[i * a.cols + k];
            if f == 0 {
                continue;
            }
            for (x, &y) in orow.iter_mut().zip(b.row(k)) {
                *x = red.fma(*x, f, y);
            }
        }
    }
    Ok(out)
}

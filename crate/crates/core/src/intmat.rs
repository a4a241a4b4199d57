//! Dense integer matrices with arbitrary-precision entries.
//!
//! Entries live in a `Vec<i64>` while every value fits and are promoted to
//! `BigInt` storage as soon as one does not. The storage choice is not
//! observable through the public API: equality, accessors, and arithmetic
//! all act on the integer values.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfp::{FpMatrix, Prime};

#[derive(Clone)]
enum Entries {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

#[derive(Clone)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Entries,
}

impl PartialEq for IntMatrix {
    fn eq(&self, other: &Self) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        match (&self.data, &other.data) {
            (Entries::Small(a), Entries::Small(b)) => a == b,
            _ => (0..self.rows * self.cols).all(|k| self.flat(k) == other.flat(k)),
        }
    }
}

impl Eq for IntMatrix {}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix({}x{})", self.rows, self.cols)?;
        for i in 0..self.rows.min(16) {
            let row: Vec<String> = (0..self.cols.min(16))
                .map(|j| self.get(i, j).to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn dims_err(what: &str, a: &IntMatrix, b: &IntMatrix) -> Error {
    Error::DimensionMismatch(format!(
        "{what}: {}x{} and {}x{}",
        a.rows, a.cols, b.rows, b.cols
    ))
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: Entries::Small(vec![0; rows * cols]),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut d = vec![0; n * n];
        for i in 0..n {
            d[i * n + i] = 1;
        }
        IntMatrix {
            rows: n,
            cols: n,
            data: Entries::Small(d),
        }
    }

    pub fn from_i64(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            data: Entries::Small(data),
        })
    }

    pub fn from_big(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            data: Entries::Big(data),
        }
        .shrink())
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_i64(rows.len(), c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut d = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                d.push(f(i, j));
            }
        }
        IntMatrix {
            rows,
            cols,
            data: Entries::Small(d),
        }
    }

    /// Moves big storage back to `i64` when every entry fits.
    fn shrink(self) -> Self {
        match self.data {
            Entries::Big(ref v) => {
                let small: Option<Vec<i64>> = v.iter().map(ToPrimitive::to_i64).collect();
                match small {
                    Some(s) => IntMatrix {
                        rows: self.rows,
                        cols: self.cols,
                        data: Entries::Small(s),
                    },
                    None => self,
                }
            }
            Entries::Small(_) => self,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn flat(&self, k: usize) -> BigInt {
        match &self.data {
            Entries::Small(v) => BigInt::from(v[k]),
            Entries::Big(v) => v[k].clone(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        self.flat(i * self.cols + j)
    }

    pub fn get_i64(&self, i: usize, j: usize) -> Option<i64> {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        match &self.data {
            Entries::Small(v) => Some(v[i * self.cols + j]),
            Entries::Big(v) => v[i * self.cols + j].to_i64(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        let k = i * self.cols + j;
        match &mut self.data {
            Entries::Small(v) => match value.to_i64() {
                Some(x) => v[k] = x,
                None => {
                    let mut big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
                    big[k] = value;
                    self.data = Entries::Big(big);
                }
            },
            Entries::Big(v) => v[k] = value,
        }
    }

    /// Row-major `i64` view, when every entry fits.
    pub fn as_i64(&self) -> Option<&[i64]> {
        match &self.data {
            Entries::Small(v) => Some(v),
            Entries::Big(_) => None,
        }
    }

    pub fn to_big_vec(&self) -> Vec<BigInt> {
        (0..self.rows * self.cols).map(|k| self.flat(k)).collect()
    }

    pub fn to_big_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.flat(i * self.cols + j))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let (r, c) = (self.rows, self.cols);
        match &self.data {
            Entries::Small(v) => {
                let mut d = vec![0; v.len()];
                for i in 0..r {
                    for j in 0..c {
                        d[j * r + i] = v[i * c + j];
                    }
                }
                IntMatrix {
                    rows: c,
                    cols: r,
                    data: Entries::Small(d),
                }
            }
            Entries::Big(v) => {
                let d = (0..r * c).map(|k| v[(k % r) * c + k / r].clone()).collect();
                IntMatrix {
                    rows: c,
                    cols: r,
                    data: Entries::Big(d),
                }
            }
        }
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> IntMatrix {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        let d = row_perm
            .iter()
            .flat_map(|&i| col_perm.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.flat(i * self.cols + j))
            .collect();
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: Entries::Big(d),
        }
        .shrink()
    }

    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(dims_err("vstack", self, other));
        }
        let mut d = self.to_big_vec();
        d.extend(other.to_big_vec());
        IntMatrix::from_big(self.rows + other.rows, self.cols, d)
    }

    fn max_abs(&self) -> u128 {
        match &self.data {
            Entries::Small(v) => v
                .iter()
                .map(|x| u128::from(x.unsigned_abs()))
                .max()
                .unwrap_or(0),
            Entries::Big(v) => v
                .iter()
                .map(|x| x.abs().to_u128().unwrap_or(u128::MAX))
                .max()
                .unwrap_or(0),
        }
    }

    /// Exact matrix product.
    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(dims_err("product", self, other));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let bound = self
            .max_abs()
            .checked_mul(other.max_abs())
            .and_then(|b| b.checked_mul(k.max(1) as u128));
        if let (Entries::Small(a), Entries::Small(b)) = (&self.data, &other.data) {
            if bound.is_some_and(|b| b < 1 << 62) {
                let mut out = vec![0i64; n * m];
                out.par_chunks_mut(m.max(1))
                    .enumerate()
                    .for_each(|(i, orow)| {
                        for t in 0..k {
                            let f = a[i * k + t];
                            if f != 0 {
                                for (x, &y) in orow.iter_mut().zip(&b[t * m..(t + 1) * m]) {
                                    *x += f * y;
                                }
                            }
                        }
                    });
                return IntMatrix::from_i64(n, m, out);
            }
            if bound.is_some_and(|b| b < 1 << 126) {
                let mut out = vec![0i128; n * m];
                out.par_chunks_mut(m.max(1))
                    .enumerate()
                    .for_each(|(i, orow)| {
                        for t in 0..k {
                            let f = i128::from(a[i * k + t]);
                            if f != 0 {
                                for (x, &y) in orow.iter_mut().zip(&b[t * m..(t + 1) * m]) {
                                    *x += f * i128::from(y);
                                }
                            }
                        }
                    });
                return IntMatrix::from_big(n, m, out.into_iter().map(BigInt::from).collect());
            }
        }
        let a = self.to_big_vec();
        let b = other.to_big_vec();
        let mut out = vec![BigInt::zero(); n * m];
        out.par_chunks_mut(m.max(1))
            .enumerate()
            .for_each(|(i, orow)| {
                for t in 0..k {
                    let f = &a[i * k + t];
                    if !f.is_zero() {
                        for (x, y) in orow.iter_mut().zip(&b[t * m..(t + 1) * m]) {
                            *x += f * y;
                        }
                    }
                }
            });
        IntMatrix::from_big(n, m, out)
    }

    fn zip_with(
        &self,
        other: &IntMatrix,
        what: &str,
        small: impl Fn(i64, i64) -> Option<i64>,
        big: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(dims_err(what, self, other));
        }
        if let (Entries::Small(a), Entries::Small(b)) = (&self.data, &other.data) {
            let out: Option<Vec<i64>> = a.iter().zip(b).map(|(&x, &y)| small(x, y)).collect();
            if let Some(out) = out {
                return IntMatrix::from_i64(self.rows, self.cols, out);
            }
        }
        let out = (0..self.rows * self.cols)
            .map(|k| big(&self.flat(k), &other.flat(k)))
            .collect();
        IntMatrix::from_big(self.rows, self.cols, out)
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, "sum", i64::checked_add, |x, y| x + y)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, "difference", i64::checked_sub, |x, y| x - y)
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        if let (Entries::Small(a), Some(c)) = (&self.data, c.to_i64()) {
            let out: Option<Vec<i64>> = a.iter().map(|&x| x.checked_mul(c)).collect();
            if let Some(out) = out {
                return IntMatrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: Entries::Small(out),
                };
            }
        }
        let out = (0..self.rows * self.cols)
            .map(|k| self.flat(k) * c)
            .collect();
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: Entries::Big(out),
        }
        .shrink()
    }

    /// `self + c·I` for a square matrix.
    pub fn add_identity(&self, c: &BigInt) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "identity shift of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.set(i, i, out.get(i, i) + c);
        }
        Ok(out)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn row_sums(&self) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.flat(i * self.cols + j)).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<BigInt> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.flat(i * self.cols + j)).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Entries::Small(v) => v.iter().all(|&x| x == 0),
            Entries::Big(v) => v.iter().all(Zero::is_zero),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Entrywise reduction into F_p.
    pub fn reduce_mod(&self, p: Prime) -> FpMatrix {
        let pb = BigInt::from(p.get());
        let pi = p.get() as i64;
        let data = match &self.data {
            Entries::Small(v) => v.iter().map(|&x| x.rem_euclid(pi) as u64).collect(),
            Entries::Big(v) => v
                .iter()
                .map(|x| {
                    let r = ((x % &pb) + &pb) % &pb;
                    r.to_u64().expect("residue below p")
                })
                .collect(),
        };
        FpMatrix::new(p, self.rows, self.cols, data).expect("shape preserved")
    }
}

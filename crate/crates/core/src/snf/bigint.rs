//! Smith normal form over the integers by unimodular row and column
//! operations on arbitrary-precision entries.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::intmat::IntMatrix;

/// Unimodular transforms with `left · M · right = diag(d_1, ..., d_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnesses {
    pub left: IntMatrix,
    pub right: IntMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// Non-negative invariant factors `d_1 | d_2 | ...`, `min(rows, cols)` of
    /// them, zeros last.
    pub diagonal: Vec<BigInt>,
    pub witnesses: Option<Witnesses>,
}

impl SnfResult {
    /// The diagonal matrix with the same shape as the input.
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut d = IntMatrix::zeros(rows, cols);
        for (i, x) in self.diagonal.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }

    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
    rows: usize,
    cols: usize,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `dst -= q * src` on two rows of the same table.
fn row_axpy(t: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt, from: usize) {
    let (d, s) = if dst < src {
        let (lo, hi) = t.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = t.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d[from..].iter_mut().zip(&s[from..]) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// `col dst -= q * col src`.
fn col_axpy(t: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt, from: usize) {
    for row in &mut t[from..] {
        if !row[src].is_zero() {
            let delta = q * &row[src];
            row[dst] -= delta;
        }
    }
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(u) = &mut self.u {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in &mut self.a {
                r.swap(i, j);
            }
            if let Some(v) = &mut self.v {
                for r in v {
                    r.swap(i, j);
                }
            }
        }
    }

    fn row_op(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        row_axpy(&mut self.a, dst, src, q, from);
        if let Some(u) = &mut self.u {
            row_axpy(u, dst, src, q, 0);
        }
    }

    fn col_op(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        col_axpy(&mut self.a, dst, src, q, from);
        if let Some(v) = &mut self.v {
            col_axpy(v, dst, src, q, 0);
        }
    }

    /// Position of the nonzero entry of least absolute value in the
    /// trailing block, first in row-major order among ties.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, &BigInt)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(_, _, b)| x.magnitude() < b.magnitude()) {
                    best = Some((i, j, x));
                    if x.magnitude().is_one() {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Clears row and column `t` around the pivot, re-selecting the pivot
    /// whenever a remainder survives. Returns false when the block is zero.
    fn settle_pivot(&mut self, t: usize) -> bool {
        loop {
            let Some((i, j)) = self.min_pivot(t) else {
                return false;
            };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            let pivot = self.a[t][t].clone();
            let mut clean = true;
            for i in t + 1..self.rows {
                if self.a[i][t].is_zero() {
                    continue;
                }
                let q = self.a[i][t].div_floor(&pivot);
                self.row_op(i, t, &q, t);
                clean &= self.a[i][t].is_zero();
            }
            for j in t + 1..self.cols {
                if self.a[t][j].is_zero() {
                    continue;
                }
                let q = self.a[t][j].div_floor(&pivot);
                self.col_op(j, t, &q, t);
                clean &= self.a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // The pivot must divide the whole trailing block; otherwise fold
            // an offending row into row t and go again.
            let offender = (t + 1..self.rows)
                .find(|&i| self.a[i][t + 1..].iter().any(|x| !x.is_multiple_of(&pivot)));
            match offender {
                Some(i) => self.row_op(t, i, &BigInt::from(-1), t),
                None => return true,
            }
        }
    }
}

/// Smith normal form; `want_witnesses` also returns the unimodular
/// transforms.
pub fn smith_normal_form(m: &IntMatrix, want_witnesses: bool) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.to_big_rows(),
        u: want_witnesses.then(|| identity_rows(rows)),
        v: want_witnesses.then(|| identity_rows(cols)),
        rows,
        cols,
    };
    let size = rows.min(cols);
    let mut diagonal = Vec::with_capacity(size);
    for t in 0..size {
        if !w.settle_pivot(t) {
            break;
        }
        if w.a[t][t].is_negative() {
            for x in &mut w.a[t][t..] {
                *x = -&*x;
            }
            if let Some(u) = &mut w.u {
                for x in &mut u[t] {
                    *x = -&*x;
                }
            }
        }
        diagonal.push(w.a[t][t].clone());
    }
    diagonal.resize(size, BigInt::zero());
    let witnesses = match (w.u, w.v) {
        (Some(u), Some(v)) => Some(Witnesses {
            left: IntMatrix::from_big(rows, rows, u.concat()).expect("square"),
            right: IntMatrix::from_big(cols, cols, v.concat()).expect("square"),
        }),
        _ => None,
    };
    SnfResult {
        diagonal,
        witnesses,
    }
}

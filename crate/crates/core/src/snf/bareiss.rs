//! Fraction-free (Bareiss) elimination: every division is exact, so the
//! whole computation stays in the integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;

/// Runs one-step fraction-free elimination in place and returns the pivot
/// positions `(row, col)`. After the call, the last pivot entry equals the
/// determinant of the selected pivot minor up to the sign of the row swaps.
fn fraction_free(a: &mut [Vec<BigInt>], cols: usize) -> (Vec<(usize, usize)>, bool) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut negate = false;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if piv != r {
            a.swap(piv, r);
            negate = !negate;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let prow = &head[r];
        let pivot = &prow[c];
        tail.par_iter_mut().for_each(|row| {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let mut x = pivot * &row[j];
                if !factor.is_zero() {
                    x -= &factor * &prow[j];
                }
                row[j] = if prev.is_one() { x } else { x / &prev };
            }
            row[c] = BigInt::zero();
        });
        prev = pivot.clone();
        pivots.push((r, c));
        r += 1;
    }
    (pivots, negate)
}

/// Exact determinant.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.to_big_rows();
    let (pivots, negate) = fraction_free(&mut a, n);
    if pivots.len() < n {
        return Ok(BigInt::zero());
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Exact rank over the rationals.
pub fn rank_over_rationals(m: &IntMatrix) -> usize {
    let mut a = m.to_big_rows();
    fraction_free(&mut a, m.cols()).0.len()
}

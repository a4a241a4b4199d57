//! The lattice filtration `M_i = { x : m·x ≡ 0 (mod p^i) }` and the
//! dimensions of its reductions mod p, computed by p-adic kernel lifting
//! without touching either Smith form engine.
//!
//! A basis `B_i` of `M_i` (columns) is carried together with `Q_i = m·B_i`.
//! Every column of `Q_i` is divisible by `p^i`; the mod-p kernel of
//! `Q_i / p^i` tells which integer combinations lift to `M_{i+1}`:
//! free columns become kernel combinations, pivot columns get multiplied by
//! `p`. Since `M_i ⊇ p^i·Z^n`, all arithmetic can be done mod `p^(i_max+1)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfp::{rank, rref, FpMatrix, Prime};
use crate::intmat::IntMatrix;

struct Columns {
    len: usize,
    data: Vec<u64>,
}

impl Columns {
    fn col(&self, j: usize) -> &[u64] {
        &self.data[j * self.len..(j + 1) * self.len]
    }

    fn to_fp(&self, p: Prime, divisor: u64) -> FpMatrix {
        let ncols = self.data.len() / self.len.max(1);
        FpMatrix::from_fn(p, self.len, ncols, |i, j| {
            self.data[j * self.len + i] / divisor
        })
    }

    /// New free columns `col_f + Σ coef·col_j` (all mod `modulus`), then
    /// pivot columns multiplied by p.
    fn lift(
        &mut self,
        p: u64,
        modulus: u64,
        pivots: &[usize],
        free: &[(usize, Vec<(usize, u64)>)],
    ) {
        let len = self.len;
        let fresh: Vec<(usize, Vec<u64>)> = free
            .par_iter()
            .map(|(f, combo)| {
                let mut c = self.col(*f).to_vec();
                for &(j, coef) in combo {
                    for (x, &y) in c.iter_mut().zip(self.col(j)) {
                        *x = (*x + coef * y) % modulus;
                    }
                }
                (*f, c)
            })
            .collect();
        for (f, c) in fresh {
            self.data[f * len..(f + 1) * len].copy_from_slice(&c);
        }
        for &j in pivots {
            for x in &mut self.data[j * len..(j + 1) * len] {
                *x = *x * p % modulus;
            }
        }
    }
}

/// `dim_{F_p}` of the image of `M_i` in `F_p^cols`, for `i = 0..=i_max`.
pub fn filtration_dims(m: &IntMatrix, p: Prime, i_max: u32) -> Result<Vec<usize>> {
    let (rows, n) = (m.rows(), m.cols());
    let pw = p.get();
    let exponent = i_max + 1;
    let modulus = pw
        .checked_pow(exponent)
        .filter(|&md| md.checked_mul(pw).is_some_and(|x| x < 1 << 63))
        .ok_or(Error::PrecisionExceeded { p: pw, exponent })?;

    let mi = modulus as i128;
    let reduce = |x: i128| x.rem_euclid(mi) as u64;
    // B_0 = I (column-major), Q_0 = m (column-major)
    let mut basis = Columns {
        len: n,
        data: vec![0; n * n],
    };
    for j in 0..n {
        basis.data[j * n + j] = 1;
    }
    let mut image = Columns {
        len: rows,
        data: vec![0; rows * n],
    };
    for j in 0..n {
        for i in 0..rows {
            let x = match m.get_i64(i, j) {
                Some(v) => reduce(i128::from(v)),
                None => {
                    let mb = num_bigint::BigInt::from(modulus);
                    let r = ((m.get(i, j) % &mb) + &mb) % &mb;
                    u64::try_from(r).expect("residue fits")
                }
            };
            image.data[j * rows + i] = x;
        }
    }

    let mut dims = vec![n];
    let mut scale = 1u64;
    for _ in 0..i_max {
        if rows == 0 {
            dims.push(n);
            continue;
        }
        debug_assert!(image.data.iter().all(|&x| x % scale == 0));
        let c = image.to_fp(p, scale);
        let r = rref(&c);
        let is_pivot = {
            let mut v = vec![false; n];
            for &j in &r.pivot_cols {
                v[j] = true;
            }
            v
        };
        let free: Vec<(usize, Vec<(usize, u64)>)> = (0..n)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let combo = r
                    .pivot_cols
                    .iter()
                    .enumerate()
                    .filter_map(|(row, &j)| {
                        let e = u64::from(r.matrix.get(row, f));
                        (e != 0).then_some((j, pw - e))
                    })
                    .collect();
                (f, combo)
            })
            .collect();
        basis.lift(pw, modulus, &r.pivot_cols, &free);
        image.lift(pw, modulus, &r.pivot_cols, &free);
        scale *= pw;
        // pivot columns are now ≡ 0 mod p
        let survivors: Vec<usize> = free.iter().map(|(f, _)| *f).collect();
        let reduced = FpMatrix::from_fn(p, n, survivors.len(), |i, k| basis.col(survivors[k])[i]);
        dims.push(rank(&reduced));
    }
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_example() {
        let m = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 8]]).unwrap();
        let p = Prime::new(2).unwrap();
        assert_eq!(filtration_dims(&m, p, 5).unwrap(), vec![3, 2, 1, 1, 0, 0]);
    }

    #[test]
    fn kernel_stays() {
        let m = IntMatrix::from_rows(&[vec![3, 3], vec![3, 3]]).unwrap();
        let p = Prime::new(3).unwrap();
        // invariant factors 3, 0: kernel direction survives every level
        assert_eq!(filtration_dims(&m, p, 3).unwrap(), vec![2, 2, 1, 1]);
    }

    #[test]
    fn precision_guard() {
        let p = Prime::new(7).unwrap();
        assert!(filtration_dims(&IntMatrix::identity(2), p, 30).is_err());
    }
}

//! Bit-packed rows over F_2 with word-parallel XOR elimination.

use super::{FpMatrix, Prime, Rref};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn from_fp(m: &FpMatrix) -> Self {
        debug_assert_eq!(m.prime().get(), 2);
        let mut b = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for (j, &e) in m.row(i).iter().enumerate() {
                if e != 0 {
                    b.set(i, j);
                }
            }
        }
        b
    }

    pub fn to_fp(&self) -> FpMatrix {
        let two = Prime::new(2).expect("2 is prime");
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                data.push(u32::from(self.get(i, j)));
            }
        }
        FpMatrix::from_raw(two, self.rows, self.cols, data)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.data.swap(a * self.words + w, b * self.words + w);
            }
        }
    }

    /// `row[dst] ^= row[src]`, starting at word `from`.
    fn xor_row(&mut self, dst: usize, src: usize, from: usize) {
        let w = self.words;
        let (d, s) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..(dst + 1) * w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..(src + 1) * w])
        };
        for (x, y) in d[from..].iter_mut().zip(&s[from..]) {
            *x ^= *y;
        }
    }

    fn eliminate(&mut self, reduce_above: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(piv, r);
            let start = if reduce_above { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row(i, r, c / 64);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(mut self) -> Rref {
        let pivot_cols = self.eliminate(true);
        Rref {
            rank: pivot_cols.len(),
            matrix: self.to_fp(),
            pivot_cols,
        }
    }

    pub fn rank(mut self) -> usize {
        self.eliminate(false).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::rref_generic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_path_matches_generic_on_random_matrices() {
        let two = Prime::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6f2);
        for _ in 0..1000 {
            let rows = rng.gen_range(0..20);
            let cols = rng.gen_range(0..150);
            let density = rng.gen_range(0.05..0.95);
            let m = FpMatrix::from_fn(two, rows, cols, |_, _| u64::from(rng.gen_bool(density)));
            let fast = BitMatrix::from_fp(&m).rref();
            let slow = rref_generic(&m);
            assert_eq!(fast, slow);
            assert_eq!(BitMatrix::from_fp(&m).rank(), slow.rank);
        }
    }
}

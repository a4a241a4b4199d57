//! Exact determinants by Gaussian elimination modulo many word-sized primes
//! and Chinese remaindering past the Hadamard bound.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfp::is_prime;
use crate::intmat::IntMatrix;

/// Barrett reduction for moduli below 2^31, inputs below 2^62.
#[derive(Clone, Copy)]
struct Barrett {
    q: u64,
    m: u64,
}

impl Barrett {
    fn new(q: u64) -> Self {
        Barrett { q, m: u64::MAX / q }
    }

    #[inline(always)]
    fn reduce(&self, x: u64) -> u64 {
        let est = ((u128::from(x) * u128::from(self.m)) >> 64) as u64;
        let r = x - est * self.q;
        if r >= self.q {
            r - self.q
        } else {
            r
        }
    }
}

fn inv_mod(a: u64, q: u64) -> u64 {
    let e = i64::extended_gcd(&(a as i64), &(q as i64));
    e.x.rem_euclid(q as i64) as u64
}

fn det_mod(m: &IntMatrix, q: u64) -> u64 {
    let n = m.rows();
    let br = Barrett::new(q);
    let qi = q as i64;
    let mut a: Vec<u64> = match m.as_i64() {
        Some(v) => v.iter().map(|&x| x.rem_euclid(qi) as u64).collect(),
        None => {
            let qb = BigInt::from(q);
            m.to_big_vec()
                .iter()
                .map(|x| x.mod_floor(&qb).to_u64().expect("residue"))
                .collect()
        }
    };
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| a[i * n + c] != 0) else {
            return 0;
        };
        if piv != c {
            for j in c..n {
                a.swap(piv * n + j, c * n + j);
            }
            det = (q - det) % q;
        }
        let d = a[c * n + c];
        det = br.reduce(det * d);
        let inv = inv_mod(d, q);
        let (top, below) = a.split_at_mut((c + 1) * n);
        let pivot_row = &top[c * n + c..];
        for row in below.chunks_exact_mut(n) {
            let f = br.reduce(row[c] * inv);
            if f == 0 {
                continue;
            }
            let g = q - f;
            for (x, &y) in row[c..].iter_mut().zip(pivot_row) {
                *x = br.reduce(*x + g * y);
            }
        }
    }
    det
}

/// Bits needed to hold `2·H + 1` where `H` is the Hadamard bound on `|det m|`.
fn hadamard_bits(m: &IntMatrix) -> u64 {
    let n = m.cols();
    let log2: f64 = (0..m.rows())
        .map(|i| {
            let s: BigUint = (0..n).map(|j| m.get(i, j).magnitude().pow(2)).sum();
            if s.is_zero() {
                return f64::NEG_INFINITY;
            }
            match s.to_f64() {
                Some(f) if f.is_finite() => 0.5 * f.log2(),
                _ => s.bits() as f64 / 2.0,
            }
        })
        .sum();
    if log2 == f64::NEG_INFINITY {
        return 1;
    }
    log2.max(0.0).ceil() as u64 + 2
}

/// Word primes below 2^31, largest first, whose product exceeds `2^bits`.
fn primes_for(bits: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut have = 0.0;
    let mut q = (1u64 << 31) - 1;
    while have < bits as f64 {
        if is_prime(q) {
            out.push(q);
            have += (q as f64).log2();
        }
        q -= 2;
    }
    out
}

/// `det m` computed modulo enough primes to pin it down exactly.
pub fn determinant_modular(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Ok(BigInt::one());
    }
    let primes = primes_for(hadamard_bits(m));
    let residues: Vec<u64> = primes.par_iter().map(|&q| det_mod(m, q)).collect();
    let mut modulus = BigInt::one();
    let mut x = BigInt::zero();
    for (&q, &r) in primes.iter().zip(&residues) {
        // x ≡ r (mod q), keeping x ≡ previous (mod modulus)
        let qb = BigInt::from(q);
        let xm = (&x % &qb).to_u64().expect("residue") as u128;
        let diff = (u128::from(r) + u128::from(q) - xm) % u128::from(q);
        let mm = (&modulus % &qb).to_u64().expect("residue");
        let t = diff * u128::from(inv_mod(mm, q)) % u128::from(q);
        x += &modulus * BigInt::from(t);
        modulus *= qb;
    }
    let half = &modulus >> 1;
    if x > half {
        x -= &modulus;
    }
    Ok(x)
}

//! p-local elementary divisors by elimination over Z/p^K.
//!
//! Entries are held modulo `p^K`. Pivots are taken in order of increasing
//! p-adic valuation, so the valuations recorded are the p-parts of the
//! invariant factors, exact as long as they stay below `K`. The cap is
//! escalated until every pivot valuation sits at least two below it, and a
//! block that vanishes modulo `p^K` is accepted as genuinely zero only once
//! `p^K` exceeds a Hadamard bound on every minor.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::bareiss::determinant;
use super::profile::{valuation, ElementaryDivisorProfile};
use crate::error::{Error, Result};
use crate::gfp::Prime;
use crate::intmat::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PLocalOptions {
    /// Starting exponent `K` of the working modulus `p^K`.
    pub initial_cap: u32,
    /// Give up (with an error) beyond this exponent.
    pub max_cap: u32,
    /// Square nonsingular inputs up to this dimension are cross-checked
    /// against `v_p(det)` from fraction-free elimination.
    pub validate_max_dim: usize,
}

impl Default for PLocalOptions {
    fn default() -> Self {
        PLocalOptions {
            initial_cap: 8,
            max_cap: 1 << 16,
            validate_max_dim: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLocalRun {
    pub profile: ElementaryDivisorProfile,
    /// Exponent `K` of the modulus that produced the accepted result.
    pub cap: u32,
    /// Whether `Σ i·f_i` was matched against an independent determinant.
    pub validated: bool,
}

/// Residue arithmetic modulo `p^K`.
trait Zpk: Sync {
    type E: Clone + Send + Sync;

    fn reduce(&self, x: &BigInt) -> Self::E;
    fn reduce_i64(&self, x: i64) -> Self::E;
    fn is_zero(&self, x: &Self::E) -> bool;
    /// `x ≡ 0 (mod p^e)` for `e <= K`.
    fn divisible(&self, x: &Self::E, e: u32) -> bool;
    /// `(x / p^v) · u` where `p^v | x`.
    fn scaled_quotient(&self, x: &Self::E, v: u32, u: &Self::E) -> Self::E;
    /// Inverse of `x / p^v`, a unit.
    fn unit_inverse(&self, x: &Self::E, v: u32) -> Self::E;
    /// `dst -= f · src` elementwise.
    fn sub_mul(&self, dst: &mut [Self::E], f: &Self::E, src: &[Self::E]);
}

/// Fixed-width backend for `p^K < 2^62`, using Shoup's precomputed-quotient
/// multiplication for the row updates.
struct Word {
    m: u64,
    pows: Vec<u64>,
}

impl Word {
    fn new(p: Prime, k: u32) -> Option<Word> {
        let mut pows = vec![1u64];
        for _ in 0..k {
            let next = pows.last()?.checked_mul(p.get())?;
            pows.push(next);
        }
        let m = pows[k as usize];
        (m < 1 << 62).then_some(Word { m, pows })
    }
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (i128::from(m), i128::from(a));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "not a unit");
    t0.rem_euclid(i128::from(m)) as u64
}

impl Zpk for Word {
    type E = u64;

    fn reduce(&self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.m);
        (((x % &m) + &m) % &m).to_u64().expect("residue fits")
    }

    fn reduce_i64(&self, x: i64) -> u64 {
        i128::from(x).rem_euclid(i128::from(self.m)) as u64
    }

    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }

    fn divisible(&self, x: &u64, e: u32) -> bool {
        x % self.pows[e as usize] == 0
    }

    fn scaled_quotient(&self, x: &u64, v: u32, u: &u64) -> u64 {
        let q = x / self.pows[v as usize];
        (u128::from(q) * u128::from(*u) % u128::from(self.m)) as u64
    }

    fn unit_inverse(&self, x: &u64, v: u32) -> u64 {
        inverse_mod(x / self.pows[v as usize], self.m)
    }

    fn sub_mul(&self, dst: &mut [u64], f: &u64, src: &[u64]) {
        let m = self.m;
        let g = (m - f) % m;
        if g == 0 {
            return;
        }
        let g_shoup = ((u128::from(g) << 64) / u128::from(m)) as u64;
        for (x, &y) in dst.iter_mut().zip(src) {
            let q = ((u128::from(g_shoup) * u128::from(y)) >> 64) as u64;
            let r = g.wrapping_mul(y).wrapping_sub(q.wrapping_mul(m));
            // r in [0, 2m), x in [0, m)
            let mut s = *x + r;
            if s >= m {
                s -= m;
            }
            if s >= m {
                s -= m;
            }
            *x = s;
        }
    }
}

/// Arbitrary-precision backend for moduli beyond the word size.
struct Big {
    m: BigInt,
    pows: Vec<BigInt>,
}

impl Big {
    fn new(p: Prime, k: u32) -> Big {
        let pb = BigInt::from(p.get());
        let mut pows = vec![BigInt::one()];
        for _ in 0..k {
            let next = pows.last().expect("nonempty") * &pb;
            pows.push(next);
        }
        Big {
            m: pows[k as usize].clone(),
            pows,
        }
    }

    fn normalize(&self, x: BigInt) -> BigInt {
        let r = x % &self.m;
        if r < BigInt::zero() {
            r + &self.m
        } else {
            r
        }
    }
}

impl Zpk for Big {
    type E = BigInt;

    fn reduce(&self, x: &BigInt) -> BigInt {
        self.normalize(x.clone())
    }

    fn reduce_i64(&self, x: i64) -> BigInt {
        self.normalize(BigInt::from(x))
    }

    fn is_zero(&self, x: &BigInt) -> bool {
        x.is_zero()
    }

    fn divisible(&self, x: &BigInt, e: u32) -> bool {
        (x % &self.pows[e as usize]).is_zero()
    }

    fn scaled_quotient(&self, x: &BigInt, v: u32, u: &BigInt) -> BigInt {
        self.normalize(x / &self.pows[v as usize] * u)
    }

    fn unit_inverse(&self, x: &BigInt, v: u32) -> BigInt {
        let a = x / &self.pows[v as usize];
        let e = num_integer::Integer::extended_gcd(&a, &self.m);
        debug_assert!(e.gcd.is_one());
        self.normalize(e.x)
    }

    fn sub_mul(&self, dst: &mut [BigInt], f: &BigInt, src: &[BigInt]) {
        for (x, y) in dst.iter_mut().zip(src) {
            if !y.is_zero() {
                let t = std::mem::take(x) - f * y;
                *x = self.normalize(t);
            }
        }
    }
}

enum Capped {
    /// Pivot valuations in the order found; the remaining block (if any) is
    /// certified zero.
    Done(Vec<u32>),
    NeedLargerCap,
}

/// Smallest `K` with `p^K` above a Hadamard bound on every minor of `m`.
fn hadamard_exponent(m: &IntMatrix, p: Prime) -> u32 {
    let mut bound = BigInt::one();
    for i in 0..m.rows() {
        let sq: BigInt = match m.as_i64() {
            Some(v) => v[i * m.cols()..(i + 1) * m.cols()]
                .iter()
                .map(|&x| BigInt::from(i128::from(x) * i128::from(x)))
                .sum(),
            None => (0..m.cols()).map(|j| m.get(i, j).pow(2)).sum(),
        };
        if sq.is_zero() {
            continue;
        }
        let mut s = sq.sqrt();
        if &s * &s < sq {
            s += 1;
        }
        bound *= s;
    }
    let pb = BigInt::from(p.get());
    let mut k = 0;
    let mut pk = BigInt::one();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    k
}

fn eliminate<R: Zpk>(ring: &R, m: &IntMatrix, k: u32, zero_certified: bool) -> Capped {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<R::E> = match m.as_i64() {
        Some(v) => v.iter().map(|&x| ring.reduce_i64(x)).collect(),
        None => m.to_big_vec().iter().map(|x| ring.reduce(x)).collect(),
    };
    let size = rows.min(cols);
    let margin = k.saturating_sub(2);
    let mut vals = Vec::with_capacity(size);
    let mut t = 0;
    let mut level = 0;
    // rows in [end, rows) have no entry of valuation `level` in the block
    let mut end = rows;
    while t < size {
        if level >= margin {
            let block_zero = (t..rows).all(|i| {
                a[i * cols + t..(i + 1) * cols]
                    .iter()
                    .all(|x| ring.is_zero(x))
            });
            return if block_zero && zero_certified {
                Capped::Done(vals)
            } else {
                Capped::NeedLargerCap
            };
        }
        if end == t {
            level += 1;
            end = rows;
            continue;
        }
        let row = &a[t * cols..(t + 1) * cols];
        let hit = (t..cols).find(|&j| !ring.divisible(&row[j], level + 1));
        let Some(j) = hit else {
            end -= 1;
            if end != t {
                for c in t..cols {
                    a.swap(t * cols + c, end * cols + c);
                }
            }
            continue;
        };
        if j != t {
            for i in 0..rows {
                a.swap(i * cols + j, i * cols + t);
            }
        }
        let (head, tail) = a.split_at_mut((t + 1) * cols);
        let prow = &head[t * cols..];
        let inv = ring.unit_inverse(&prow[t], level);
        tail.par_chunks_mut(cols).for_each(|r| {
            if !ring.is_zero(&r[t]) {
                let f = ring.scaled_quotient(&r[t], level, &inv);
                ring.sub_mul(&mut r[t..], &f, &prow[t..]);
            }
        });
        vals.push(level);
        t += 1;
    }
    Capped::Done(vals)
}

fn run_capped(m: &IntMatrix, p: Prime, k: u32, zero_certified: bool) -> Capped {
    match Word::new(p, k) {
        Some(w) => eliminate(&w, m, k, zero_certified),
        None => eliminate(&Big::new(p, k), m, k, zero_certified),
    }
}

/// p-parts of the elementary divisors of `m`.
pub fn p_local_elementary_divisors(m: &IntMatrix, p: Prime) -> Result<ElementaryDivisorProfile> {
    Ok(p_local_with(m, p, &PLocalOptions::default())?.profile)
}

pub fn p_local_with(m: &IntMatrix, p: Prime, opts: &PLocalOptions) -> Result<PLocalRun> {
    let size = m.rows().min(m.cols());
    let hadamard = hadamard_exponent(m, p);
    let mut k = opts.initial_cap.max(3);
    let mut det_valuation: Option<Option<u64>> = None;
    loop {
        if k > opts.max_cap {
            return Err(Error::Inconsistent(format!(
                "p-local elimination needs a modulus beyond p^{}",
                opts.max_cap
            )));
        }
        let vals = match run_capped(m, p, k, k > hadamard) {
            Capped::Done(v) => v,
            Capped::NeedLargerCap => {
                k *= 2;
                continue;
            }
        };
        let profile = ElementaryDivisorProfile::from_valuations(p, size, vals.iter().copied());
        let full_rank_square = m.is_square() && profile.total() == size;
        if !full_rank_square || size > opts.validate_max_dim {
            return Ok(PLocalRun {
                profile,
                cap: k,
                validated: false,
            });
        }
        let expect = *det_valuation.get_or_insert_with(|| {
            let d = determinant(m).expect("square");
            (!d.is_zero()).then(|| u64::from(valuation(&d, p)))
        });
        match expect {
            Some(v) if v == profile.weighted_sum() => {
                return Ok(PLocalRun {
                    profile,
                    cap: k,
                    validated: true,
                });
            }
            Some(_) => k *= 2,
            None => {
                return Err(Error::Inconsistent(
                    "p-local elimination found full rank but the determinant is zero".into(),
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn identity_is_all_units() {
        for q in [2, 3, 5] {
            let prof = p_local_elementary_divisors(&IntMatrix::identity(6), p(q)).unwrap();
            assert_eq!(prof.counts(2), vec![6, 0]);
        }
    }

    #[test]
    fn small_cases() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]).unwrap();
        assert_eq!(
            p_local_elementary_divisors(&m, p(2)).unwrap().counts(3),
            vec![0, 1, 1]
        );
        assert_eq!(
            p_local_elementary_divisors(&m, p(3)).unwrap().counts(2),
            vec![2, 0]
        );
        let z = IntMatrix::zeros(3, 2);
        let prof = p_local_elementary_divisors(&z, p(5)).unwrap();
        assert_eq!(prof.total(), 0);
        assert_eq!(prof.zero_factors(), 2);
    }

    #[test]
    fn escalates_past_initial_cap() {
        // p^20 needs K well above the starting cap of 8
        let big = 1i64 << 20;
        let m = IntMatrix::from_rows(&[vec![big, 0], vec![0, 1]]).unwrap();
        let run = p_local_with(&m, p(2), &PLocalOptions::default()).unwrap();
        assert_eq!(run.profile.count(0), 1);
        assert_eq!(run.profile.count(20), 1);
        assert!(run.cap >= 22);
        assert!(run.validated);
    }

    #[test]
    fn big_backend_matches() {
        // 3^45 overflows the word backend
        let x = BigInt::from(3u8).pow(45);
        let mut m = IntMatrix::identity(2);
        m.set(1, 1, x);
        let prof = p_local_elementary_divisors(&m, p(3)).unwrap();
        assert_eq!(prof.count(45), 1);
        assert_eq!(prof.count(0), 1);
    }

    #[test]
    fn singular_rectangular() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 6], vec![1, 2, 3], vec![0, 0, 9]]).unwrap();
        let prof = p_local_elementary_divisors(&m, p(3)).unwrap();
        // invariant factors 1, 9, 0 (2x2 minors have gcd 9)
        assert_eq!(prof.counts(3), vec![1, 0, 1]);
        assert_eq!(prof.zero_factors(), 1);
    }
}

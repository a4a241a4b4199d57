//! Random matrix generators and brute-force oracles shared by the test
//! targets.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use skewlines::snf::{
    determinant, filtration_dims, profile_from_filtration, rank_over_rationals,
    ElementaryDivisorProfile,
};
use skewlines::{IntMatrix, Prime};

pub fn random_matrix(rng: &mut impl Rng, max_dim: usize, bound: i64) -> IntMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..=bound))
        .collect();
    IntMatrix::from_i64(rows, cols, data).unwrap()
}

/// `U·D·V` with small random unimodular-ish factors and prime-power
/// diagonal entries, so higher exponents and rank drops actually occur.
pub fn structured_matrix(rng: &mut impl Rng, p: u64) -> IntMatrix {
    let n = rng.gen_range(2..=9);
    let m = rng.gen_range(2..=9);
    let d = IntMatrix::from_fn(n, m, |i, j| {
        if i == j && rng.gen_bool(0.85) {
            (p as i64).pow(rng.gen_range(0..5)) * rng.gen_range(1..3)
        } else {
            0
        }
    });
    let u = IntMatrix::from_fn(n, n, |_, _| rng.gen_range(-2..=2));
    let v = IntMatrix::from_fn(m, m, |_, _| rng.gen_range(-2..=2));
    u.mul(&d).unwrap().mul(&v).unwrap()
}

/// Largest filtration depth whose modulus fits the word arithmetic.
pub fn max_depth(p: u64) -> u32 {
    let mut i = 0;
    while (p as u128).pow(i + 3) < 1 << 63 {
        i += 1;
    }
    i
}

pub fn filtration_profile(m: &IntMatrix, p: Prime) -> ElementaryDivisorProfile {
    let depth = max_depth(p.get());
    let dims = filtration_dims(m, p, depth).unwrap();
    let kernel = m.cols() - rank_over_rationals(m);
    assert_eq!(
        *dims.last().unwrap(),
        kernel,
        "filtration did not reach the kernel by depth {depth}"
    );
    profile_from_filtration(p, m.rows().min(m.cols()), &dims)
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Invariant factors as quotients of consecutive gcds of k×k minors.
pub fn invariant_factors_by_minors(m: &IntMatrix) -> Vec<BigInt> {
    let size = m.rows().min(m.cols());
    let mut prev = BigInt::from(1);
    let mut out = Vec::new();
    for k in 1..=size {
        let mut g = BigInt::zero();
        for rs in combinations(m.rows(), k) {
            for cs in combinations(m.cols(), k) {
                let sub = IntMatrix::from_fn(k, k, |i, j| m.get_i64(rs[i], cs[j]).unwrap());
                g = g.gcd(&determinant(&sub).unwrap());
            }
        }
        if g.is_zero() {
            out.resize(size, BigInt::zero());
            return out;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

pub fn random_unimodular(rng: &mut impl Rng, n: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        return if rng.gen_bool(0.5) {
            u.scale(&BigInt::from(-1))
        } else {
            u
        };
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.gen_range(-3..=3);
        let e = IntMatrix::from_fn(n, n, |a, b| {
            i64::from(a == b) + if (a, b) == (i, j) { c } else { 0 }
        });
        u = e.mul(&u).unwrap();
    }
    if rng.gen_bool(0.5) {
        let perm: Vec<usize> = (0..n).rev().collect();
        u = u.permute(&perm, &(0..n).collect::<Vec<_>>());
    }
    u
}

//! Cross-checks between the divisor engines and brute-force oracles on
//! random small matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewlines::gfp::{rank, rref};
use skewlines::snf::{
    determinant, p_local_elementary_divisors, smith_normal_form, ElementaryDivisorProfile,
};
use skewlines::{FpMatrix, IntMatrix, Prime};

mod support;
use support::*;

const PRIMES: [u64; 3] = [2, 3, 5];

fn engines_agree(m: &IntMatrix) {
    let snf = smith_normal_form(m, false);
    for q in PRIMES {
        let p = Prime::new(q).unwrap();
        let size = m.rows().min(m.cols());
        let from_snf = ElementaryDivisorProfile::from_invariant_factors(p, size, &snf.diagonal);
        let local = p_local_elementary_divisors(m, p).unwrap();
        let filt = filtration_profile(m, p);
        assert_eq!(from_snf, local, "p = {q}, matrix {m:?}");
        assert_eq!(from_snf, filt, "p = {q}, matrix {m:?}");
    }
}

#[test]
fn engines_agree_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..500 {
        engines_agree(&random_matrix(&mut rng, 12, 9));
    }
}

#[test]
fn engines_agree_on_structured_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..150 {
        let p = PRIMES[k % 3];
        engines_agree(&structured_matrix(&mut rng, p));
    }
}

#[test]
fn smith_diagonal_matches_minor_gcds() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in 0..200 {
        let m = if k % 4 == 0 {
            // rank-deficient: repeat a row
            let mut m = random_matrix(&mut rng, 6, 9);
            if m.rows() > 1 {
                for j in 0..m.cols() {
                    m.set(m.rows() - 1, j, m.get(0, j) * 2);
                }
            }
            m
        } else {
            random_matrix(&mut rng, 6, 9)
        };
        assert_eq!(
            smith_normal_form(&m, false).diagonal,
            invariant_factors_by_minors(&m),
            "{m:?}"
        );
    }
}

#[test]
fn smith_form_invariant_under_unimodular_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let m = random_matrix(&mut rng, 8, 9);
        let u = random_unimodular(&mut rng, m.rows());
        let v = random_unimodular(&mut rng, m.cols());
        assert!(determinant(&u).unwrap().abs() == BigInt::from(1));
        let t = u.mul(&m).unwrap().mul(&v).unwrap();
        assert_eq!(
            smith_normal_form(&m, false).diagonal,
            smith_normal_form(&t, false).diagonal
        );
    }
}

#[test]
fn witnesses_are_unimodular_and_diagonalize() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let m = random_matrix(&mut rng, 7, 9);
        let r = smith_normal_form(&m, true);
        let w = r.witnesses.as_ref().unwrap();
        assert_eq!(determinant(&w.left).unwrap().abs(), BigInt::from(1));
        assert_eq!(determinant(&w.right).unwrap().abs(), BigInt::from(1));
        let d = w.left.mul(&m).unwrap().mul(&w.right).unwrap();
        assert_eq!(d, r.diagonal_matrix(m.rows(), m.cols()));
        for pair in r.diagonal.windows(2) {
            assert!(pair[1].is_zero() || pair[1].is_multiple_of(&pair[0]));
        }
    }
}

fn fp_matrix(p: u64, rows: usize, cols: usize) -> impl Strategy<Value = FpMatrix> {
    prop::collection::vec(0..p, rows * cols)
        .prop_map(move |v| FpMatrix::new(Prime::new(p).unwrap(), rows, cols, v).unwrap())
}

fn prime_and_matrix() -> impl Strategy<Value = FpMatrix> {
    (
        prop::sample::select(vec![2u64, 3, 5, 7, 65_537]),
        1usize..9,
        1usize..9,
    )
        .prop_flat_map(|(p, r, c)| fp_matrix(p, r, c))
}

proptest! {
    #[test]
    fn rank_invariant_under_transpose(m in prime_and_matrix()) {
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn rref_unchanged_by_row_mixing(m in prime_and_matrix(), seed in any::<u64>()) {
        let p = m.prime();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = m.rows();
        // random invertible mixing matrix: unit lower times unit upper
        let lower = FpMatrix::from_fn(p, n, n, |i, j| if i == j { 1 } else if i > j { rng.gen_range(0..p.get()) } else { 0 });
        let upper = FpMatrix::from_fn(p, n, n, |i, j| if i == j { 1 } else if i < j { rng.gen_range(0..p.get()) } else { 0 });
        let mix = skewlines::mat_mul_mod_p(&lower, &upper).unwrap();
        let mixed = skewlines::mat_mul_mod_p(&mix, &m).unwrap();
        prop_assert_eq!(rref(&m), rref(&mixed));
    }

    #[test]
    fn rref_is_idempotent(m in prime_and_matrix()) {
        let r = rref(&m);
        prop_assert_eq!(rref(&r.matrix).matrix, r.matrix.clone());
        prop_assert_eq!(r.rank, r.pivot_cols.len());
    }

    #[test]
    fn p_local_matches_smith_on_small_entries(
        rows in 1usize..7,
        cols in 1usize..7,
        seed in any::<u64>(),
        pi in 0usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols).map(|_| rng.gen_range(-30i64..=30)).collect();
        let m = IntMatrix::from_i64(rows, cols, data).unwrap();
        let p = Prime::new(PRIMES[pi]).unwrap();
        let snf = smith_normal_form(&m, false);
        let expect = ElementaryDivisorProfile::from_invariant_factors(p, rows.min(cols), &snf.diagonal);
        prop_assert_eq!(p_local_elementary_divisors(&m, p).unwrap(), expect);
    }
}

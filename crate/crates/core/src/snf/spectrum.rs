//! Spectrum checks for the skew-lines matrix that avoid computing a
//! characteristic polynomial: traces, ranks of the shifted matrices, and
//! annihilation by the product of the three eigenvalue factors.

use num_bigint::BigInt;
use num_traits::Zero;

use super::bareiss::rank_over_rationals;
use crate::error::{Error, Result};
use crate::gfp::{rank, Prime};
use crate::intmat::IntMatrix;
use crate::report::Check;

/// `trace(A²) = Σ_{i,j} a_ij a_ji`, without forming the product.
pub fn trace_of_square(a: &IntMatrix) -> BigInt {
    let n = a.rows();
    match a.as_i64() {
        Some(v) => (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| BigInt::from(i128::from(v[i * n + j]) * i128::from(v[j * n + i])))
            .sum(),
        None => (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j) * a.get(j, i))
            .sum(),
    }
}

/// Modulus for the rank checks when exact rational elimination is skipped.
/// A rank mod this prime is a lower bound for the rank over Q.
pub const RANK_CHECK_PRIME: u64 = 4_294_967_291;

/// Checks `trace A = 0`, `trace A² = p⁴·|L_2|`, the ranks of `A − pI` and
/// `A + p²I`, and `(A − p⁴I)(A − pI)(A + p²I) = 0`.
pub fn char_poly_free_spectrum_check(a: &IntMatrix, p: Prime) -> Result<Vec<Check>> {
    spectrum_checks(a, p, true)
}

/// As [`char_poly_free_spectrum_check`]; with `exact_ranks = false` the two
/// ranks are taken modulo [`RANK_CHECK_PRIME`] instead of over Q.
pub fn spectrum_checks(a: &IntMatrix, p: Prime, exact_ranks: bool) -> Result<Vec<Check>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            a.rows(),
            a.cols()
        )));
    }
    spectrum_checks_from_square(a, &a.mul(a)?, p, exact_ranks)
}

/// [`spectrum_checks`] with `A²` supplied by the caller.
pub(crate) fn spectrum_checks_from_square(
    a: &IntMatrix,
    a2: &IntMatrix,
    p: Prime,
    exact_ranks: bool,
) -> Result<Vec<Check>> {
    let n = a.rows();
    let q = BigInt::from(p.get());
    let p2 = &q * &q;
    let p4 = &p2 * &p2;
    let mult_p = &p4 + &p2;
    let mult_neg = &p2 * &q + &p2 + &q;
    let nb = BigInt::from(n);

    let mut checks = vec![
        Check::new("trace(A)", 0, a.trace()),
        Check::new("trace(A^2) = p^4 |L_2|", &p4 * &nb, trace_of_square(a)),
    ];
    let minus_p = a.add_identity(&-&q)?;
    let plus_p2 = a.add_identity(&p2)?;
    let (suffix, rank_of): (&str, fn(&IntMatrix) -> usize) = if exact_ranks {
        ("", rank_over_rationals)
    } else {
        (" [mod 4294967291]", |m| {
            rank(&m.reduce_mod(Prime::new(RANK_CHECK_PRIME).expect("prime")))
        })
    };
    checks.push(Check::new(
        format!("rank(A - pI) = |L_2| - (p^4 + p^2){suffix}"),
        &nb - &mult_p,
        rank_of(&minus_p),
    ));
    checks.push(Check::new(
        format!("rank(A + p^2 I) = |L_2| - (p^3 + p^2 + p){suffix}"),
        &nb - &mult_neg,
        rank_of(&plus_p2),
    ));
    // (A - pI)(A + p^2 I) = A^2 + (p^2 - p)A - p^3 I
    let quad = a2.add(&a.scale(&(&p2 - &q)))?.add_identity(&-(&p2 * &q))?;
    let prod = a.add_identity(&-&p4)?.mul(&quad)?;
    let nonzero = match prod.as_i64() {
        Some(v) => v.iter().filter(|&&x| x != 0).count(),
        None => prod.to_big_vec().iter().filter(|x| !x.is_zero()).count(),
    };
    checks.push(Check::new(
        "(A - p^4 I)(A - pI)(A + p^2 I) nonzero entries",
        0,
        nonzero,
    ));
    Ok(checks)
}

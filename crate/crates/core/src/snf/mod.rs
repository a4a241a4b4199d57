//! Elementary divisors, determinants, and ranks of integer matrices.
//!
//! Two independent engines compute elementary divisors: [`smith_normal_form`]
//! works over the integers, [`p_local_elementary_divisors`] works modulo a
//! prime power. [`filtration_dims`] recovers the same multiplicities from the
//! kernel lattices of the matrix, sharing no code with either engine.

mod bareiss;
mod bigint;
mod filtration;
mod modular;
mod plocal;
mod profile;
mod spectrum;

pub use bareiss::{determinant, rank_over_rationals};
pub use bigint::{smith_normal_form, SnfResult, Witnesses};
pub use filtration::filtration_dims;
pub use modular::determinant_modular;
pub use plocal::{p_local_elementary_divisors, p_local_with, PLocalOptions, PLocalRun};
pub use profile::{valuation, ElementaryDivisorProfile};
pub(crate) use spectrum::spectrum_checks_from_square;
pub use spectrum::{
    char_poly_free_spectrum_check, spectrum_checks, trace_of_square, RANK_CHECK_PRIME,
};

use num_bigint::BigInt;

use crate::gfp::Prime;
use crate::intmat::IntMatrix;

/// Profile of the p-parts of the integer Smith form.
pub fn bigint_profile(m: &IntMatrix, p: Prime) -> ElementaryDivisorProfile {
    let snf = smith_normal_form(m, false);
    ElementaryDivisorProfile::from_invariant_factors(p, m.rows().min(m.cols()), &snf.diagonal)
}

/// Elementary divisor multiplicities read off a filtration: `f_i = d_i − d_{i+1}`.
pub fn profile_from_filtration(p: Prime, size: usize, dims: &[usize]) -> ElementaryDivisorProfile {
    let vals = dims
        .windows(2)
        .enumerate()
        .flat_map(|(i, w)| std::iter::repeat_n(i as u32, w[0] - w[1]));
    ElementaryDivisorProfile::from_valuations(p, size, vals)
}

/// Product of the nonzero entries of an invariant-factor list.
pub fn diagonal_product(diagonal: &[BigInt]) -> BigInt {
    diagonal
        .iter()
        .filter(|d| !num_traits::Zero::is_zero(*d))
        .product()
}

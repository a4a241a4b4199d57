//! Exact elementary divisors of subspace incidence matrices over prime fields.
//!
//! The central object is the skew-lines matrix `A` of F_p^4: rows and
//! columns are the 2-subspaces, and an entry is 1 when the two subspaces meet
//! only in zero. The crate enumerates subspaces canonically, builds `A` and
//! the related point/hyperplane maps, computes elementary divisors with two
//! independent engines plus a lattice-filtration oracle, and checks the
//! results against closed-form multiplicities.

pub mod error;
pub mod geometry;
pub mod gfp;
pub mod incidence;
pub mod intmat;
pub mod mmio;
pub mod report;
pub mod snf;
pub mod theorem;

pub use error::{Error, Result};
pub use geometry::{
    enumerate_subspaces, gaussian_binomial, intersection_dim, is_incident, ResourceGuard, Subspace,
    SubspaceFamily,
};
pub use gfp::{mat_mul_mod_p, rref, FpMatrix, Prime};
pub use incidence::{build_eta, build_psi, IncidenceKind, IncidenceSpec};
pub use intmat::IntMatrix;
pub use snf::{ElementaryDivisorProfile, SnfResult};
pub use theorem::{
    closed_forms, multiplicity_polynomial_identities, verify_rank_structure, verify_theorem,
    ClosedForms, Engine, VerificationReport,
};

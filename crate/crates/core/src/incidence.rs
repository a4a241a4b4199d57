//! Integer incidence matrices between subspace families, and the exact
//! counting identities they satisfy.
//!
//! Rows index the domain family and columns the target family, both in
//! canonical order, so row `x` of a matrix is the image of `x` under the
//! map sending a subspace to the formal sum of the subspaces it meets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{enumerate_subspaces, intersection_dim_raw, ResourceGuard, SubspaceFamily};
use crate::gfp::{Prime, Reducer};
use crate::intmat::IntMatrix;
use crate::report::{Check, MismatchLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncidenceKind {
    /// `x` and `y` meet only in the zero vector.
    Skew,
    /// `y` is not contained in the hyperplane `x`.
    HyperplaneComplement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncidenceSpec {
    pub p: Prime,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub kind: IncidenceKind,
}

impl IncidenceSpec {
    pub fn skew(p: Prime, n: usize, r: usize, s: usize) -> Self {
        IncidenceSpec {
            p,
            n,
            r,
            s,
            kind: IncidenceKind::Skew,
        }
    }

    /// Hyperplanes of F_p^4 against lines.
    pub fn psi(p: Prime) -> Self {
        IncidenceSpec {
            p,
            n: 4,
            r: 3,
            s: 2,
            kind: IncidenceKind::HyperplaneComplement,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (n, r, s) = (self.n, self.r, self.s);
        if n < 2 || r < 1 || s < 1 || r > n - 1 || s > n - 1 {
            return Err(Error::InvalidSpec(format!(
                "need 1 <= r, s <= n - 1 (got n = {n}, r = {r}, s = {s})"
            )));
        }
        if self.kind == IncidenceKind::HyperplaneComplement && r != n - 1 {
            return Err(Error::InvalidSpec(format!(
                "hyperplane-complement incidence needs r = n - 1 (got r = {r}, n = {n})"
            )));
        }
        Ok(())
    }
}

/// Incidence matrix between two already-enumerated families.
pub fn incidence_between(
    rows: &SubspaceFamily,
    cols: &SubspaceFamily,
    kind: IncidenceKind,
) -> Result<IntMatrix> {
    let p = rows.prime();
    if cols.prime() != p || cols.ambient_dim() != rows.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "families live in different spaces".into(),
        ));
    }
    let n = rows.ambient_dim();
    let red = Reducer::new(p);
    let ncols = cols.len();
    let mut data = vec![0i64; rows.len() * ncols];
    data.par_chunks_mut(ncols.max(1))
        .enumerate()
        .for_each(|(i, out)| {
            let x = rows.get(i).key();
            let mut scratch = Vec::with_capacity(2 * n * n);
            for (j, y) in cols.iter().enumerate() {
                let d = intersection_dim_raw(red, p, n, x, y.key(), &mut scratch);
                let hit = match kind {
                    IncidenceKind::Skew => d == 0,
                    IncidenceKind::HyperplaneComplement => d != y.dim(),
                };
                out[j] = i64::from(hit);
            }
        });
    IntMatrix::from_i64(rows.len(), ncols, data)
}

/// Builds the incidence matrix described by `spec`.
pub fn build_incidence(spec: &IncidenceSpec, guard: &ResourceGuard) -> Result<IntMatrix> {
    spec.validate()?;
    let rows = enumerate_subspaces(spec.p, spec.n, spec.r, guard)?;
    let cols = if spec.s == spec.r {
        rows.clone()
    } else {
        enumerate_subspaces(spec.p, spec.n, spec.s, guard)?
    };
    incidence_between(&rows, &cols, spec.kind)
}

/// Skew incidence between `r`- and `s`-subspaces.
pub fn build_eta(spec: &IncidenceSpec, guard: &ResourceGuard) -> Result<IntMatrix> {
    if spec.kind != IncidenceKind::Skew {
        return Err(Error::InvalidSpec(
            "build_eta needs the skew relation".into(),
        ));
    }
    build_incidence(spec, guard)
}

/// The skew-lines matrix of F_p^4.
pub fn build_skew_lines(p: Prime, guard: &ResourceGuard) -> Result<IntMatrix> {
    build_eta(&IncidenceSpec::skew(p, 4, 2, 2), guard)
}

/// Points against lines of F_p^4 (skew relation).
pub fn build_phi(p: Prime, guard: &ResourceGuard) -> Result<IntMatrix> {
    build_eta(&IncidenceSpec::skew(p, 4, 1, 2), guard)
}

/// Hyperplanes against lines of F_p^4; entry 1 iff the line is not inside
/// the hyperplane.
pub fn build_psi(p: Prime, guard: &ResourceGuard) -> Result<IntMatrix> {
    build_incidence(&IncidenceSpec::psi(p), guard)
}

pub fn all_ones(rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| 1)
}

fn lines_count(p: Prime) -> u64 {
    let q = p.get();
    (q * q + 1) * (q * q + q + 1)
}

fn small<'a>(m: &'a IntMatrix, what: &str) -> Result<&'a [i64]> {
    m.as_i64()
        .ok_or_else(|| Error::Inconsistent(format!("{what} has entries beyond 64 bits")))
}

/// Checks `A² + (p²−p)A − p³I − (p⁴−p³)J = 0` exactly.
pub fn verify_matrix_identity(a: &IntMatrix, p: Prime) -> Result<bool> {
    let n = lines_count(p) as usize;
    if a.rows() != n || a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}x{n} matrix for p = {p}, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    matrix_identity_from_square(a, &a.mul(a)?, p)
}

/// [`verify_matrix_identity`] with `A²` supplied by the caller.
pub(crate) fn matrix_identity_from_square(a: &IntMatrix, a2: &IntMatrix, p: Prime) -> Result<bool> {
    let n = a.rows();
    let q = p.get() as i64;
    let lhs = a2.add(&a.scale(&BigInt::from(q * q - q)))?;
    let Some(v) = lhs.as_i64() else {
        return Ok(false);
    };
    let (p3, jcoef) = (q.pow(3), q.pow(4) - q.pow(3));
    Ok(v.iter().enumerate().all(|(k, &x)| {
        let diag = if k / n == k % n { p3 } else { 0 };
        x == diag + jcoef
    }))
}

/// Entrywise counting identities for the skew-lines matrix and its
/// composites with the point and hyperplane maps.
#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub p: Prime,
    pub checks: Vec<Check>,
}

impl CountingReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn fmt_set(s: &BTreeSet<i64>) -> String {
    let v: Vec<String> = s.iter().map(i64::to_string).collect();
    format!("{{{}}}", v.join(", "))
}

fn finish(name: &str, expected: String, computed: String, log: MismatchLog) -> Check {
    let mut c = Check::with_verdict(name, expected, computed, log.total == 0);
    if log.total > 0 {
        c.computed = format!("{} ({} failing entries)", c.computed, log.total);
    }
    c.mismatches = log.kept;
    c
}

/// Verifies the line-pair counts `a_{x,y}`, the point-line counts `b_{x,y}`,
/// the p²-divisibility of the hyperplane composite, the p³-divisibility of
/// `A·(A + (p²−p)I)`, and `A·1 = p⁴·1`.
pub fn verify_counting_lemmas(p: Prime, guard: &ResourceGuard) -> Result<CountingReport> {
    let l1 = enumerate_subspaces(p, 4, 1, guard)?;
    let l2 = enumerate_subspaces(p, 4, 2, guard)?;
    let l3 = enumerate_subspaces(p, 4, 3, guard)?;
    let a = incidence_between(&l2, &l2, IncidenceKind::Skew)?;
    let phi = incidence_between(&l1, &l2, IncidenceKind::Skew)?;
    let psi = incidence_between(&l3, &l2, IncidenceKind::HyperplaneComplement)?;
    counting_checks(p, &a, &a.mul(&a)?, &phi, &psi)
}

/// The checks of [`verify_counting_lemmas`] given `A`, `A²`, and the point
/// and hyperplane maps.
pub(crate) fn counting_checks(
    p: Prime,
    a: &IntMatrix,
    a2: &IntMatrix,
    phi: &IntMatrix,
    psi: &IntMatrix,
) -> Result<CountingReport> {
    let q = p.get() as i64;
    let (p2, p3, p4) = (q * q, q.pow(3), q.pow(4));
    let n = a.rows();
    let av = small(a, "A")?;
    let mut checks = Vec::new();

    // a_{x,y}
    let a2v = small(a2, "A^2")?;
    let expect_a = [p4, p4 - p3 - p2 + q, p4 - p3];
    let mut seen = [BTreeSet::new(), BTreeSet::new(), BTreeSet::new()];
    let mut log = MismatchLog::default();
    for x in 0..n {
        for y in 0..n {
            let case = if x == y {
                0
            } else if av[x * n + y] == 1 {
                1
            } else {
                2
            };
            let got = a2v[x * n + y];
            seen[case].insert(got);
            if got != expect_a[case] {
                log.push(x, y, expect_a[case], got);
            }
        }
    }
    checks.push(finish(
        "line pairs: a_{x,y} (equal / skew / meeting)",
        format!("{} / {} / {}", expect_a[0], expect_a[1], expect_a[2]),
        format!(
            "{} / {} / {}",
            fmt_set(&seen[0]),
            fmt_set(&seen[1]),
            fmt_set(&seen[2])
        ),
        log,
    ));

    // b_{x,y}: rows lines y, columns points x
    let b = a.mul(&phi.transpose())?;
    let bv = small(&b, "A·phi^T")?;
    let phiv = small(phi, "phi")?;
    let npts = phi.rows();
    let expect_b = [p4, p4 - p2];
    let mut seen = [BTreeSet::new(), BTreeSet::new()];
    let mut log = MismatchLog::default();
    for y in 0..n {
        for x in 0..npts {
            let case = usize::from(phiv[x * n + y] == 1);
            let got = bv[y * npts + x];
            seen[case].insert(got);
            if got != expect_b[case] {
                log.push(y, x, expect_b[case], got);
            }
        }
    }
    checks.push(finish(
        "point-line pairs: b_{x,y} (on / off)",
        format!("{} / {}", expect_b[0], expect_b[1]),
        format!("{} / {}", fmt_set(&seen[0]), fmt_set(&seen[1])),
        log,
    ));

    let divisibility = |name: &str, m: &IntMatrix, modulus: i64| -> Result<Check> {
        let v = small(m, name)?;
        let cols = m.cols();
        let mut seen = BTreeSet::new();
        let mut log = MismatchLog::default();
        for (k, &x) in v.iter().enumerate() {
            seen.insert(x);
            if x % modulus != 0 {
                log.push(k / cols, k % cols, format!("0 mod {modulus}"), x);
            }
        }
        Ok(finish(
            &format!("{name} entries divisible by {modulus}"),
            format!("all entries = 0 mod {modulus}"),
            format!("values {}", fmt_set(&seen)),
            log,
        ))
    };

    let c = a.mul(&psi.transpose())?;
    checks.push(divisibility("A·psi^T", &c, p2)?);

    let gamma = a2.add(&a.scale(&BigInt::from(p2 - q)))?;
    checks.push(divisibility("A·(A + (p^2-p)I)", &gamma, p3)?);

    let sums = a.row_sums();
    let bad = sums.iter().filter(|s| **s != BigInt::from(p4)).count();
    let distinct: BTreeSet<String> = sums.iter().map(BigInt::to_string).collect();
    checks.push(Check::with_verdict(
        "A·1 = p^4·1",
        format!("every row sum {p4}"),
        format!(
            "row sums {{{}}}",
            distinct.into_iter().collect::<Vec<_>>().join(", ")
        ),
        bad == 0,
    ));

    Ok(CountingReport { p, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{is_incident, Subspace};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn g() -> ResourceGuard {
        ResourceGuard::default()
    }

    #[test]
    fn skew_lines_p2_shape() {
        let a = build_skew_lines(p(2), &g()).unwrap();
        assert_eq!((a.rows(), a.cols()), (35, 35));
        assert!(a.is_symmetric());
        assert!((0..35).all(|i| a.get(i, i) == BigInt::from(0)));
        assert!(a.row_sums().iter().all(|s| *s == BigInt::from(16)));
        assert!(a.as_i64().unwrap().iter().all(|&x| x == 0 || x == 1));
    }

    #[test]
    fn points_vs_lines_row_sums() {
        // lines avoiding a point: all 35 minus the 7 through it
        let phi = build_phi(p(2), &g()).unwrap();
        assert_eq!((phi.rows(), phi.cols()), (15, 35));
        assert!(phi.row_sums().iter().all(|s| *s == BigInt::from(28)));
    }

    #[test]
    fn psi_row_sums_and_containment() {
        let l3 = enumerate_subspaces(p(2), 4, 3, &g()).unwrap();
        let l2 = enumerate_subspaces(p(2), 4, 2, &g()).unwrap();
        let psi = build_psi(p(2), &g()).unwrap();
        assert_eq!((psi.rows(), psi.cols()), (15, 35));
        for (i, h) in l3.iter().enumerate() {
            let inside = l2.iter().filter(|y| h.contains(y).unwrap()).count();
            assert_eq!(inside, 7);
            for (j, y) in l2.iter().enumerate() {
                let expect = i64::from(!h.contains(y).unwrap());
                assert_eq!(psi.get_i64(i, j), Some(expect));
            }
        }
        assert!(psi.row_sums().iter().all(|s| *s == BigInt::from(28)));

        let psi3 = build_psi(p(3), &g()).unwrap();
        assert_eq!((psi3.rows(), psi3.cols()), (40, 130));
        assert!(psi3.row_sums().iter().all(|s| *s == BigInt::from(117)));
    }

    #[test]
    fn transpose_relation() {
        let a12 = build_eta(&IncidenceSpec::skew(p(3), 4, 1, 2), &g()).unwrap();
        let a21 = build_eta(&IncidenceSpec::skew(p(3), 4, 2, 1), &g()).unwrap();
        assert_eq!(a12.transpose(), a21);
    }

    #[test]
    fn entries_follow_geometry() {
        let l2 = enumerate_subspaces(p(3), 4, 2, &g()).unwrap();
        let a = incidence_between(&l2, &l2, IncidenceKind::Skew).unwrap();
        for (i, x) in l2.iter().enumerate().step_by(7) {
            for (j, y) in l2.iter().enumerate() {
                assert_eq!(a.get_i64(i, j) == Some(1), is_incident(x, y).unwrap());
            }
        }
        let _: &Subspace = l2.get(0);
    }

    #[test]
    fn ones_matrix() {
        let j = all_ones(2, 2);
        assert_eq!(j, IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap());
        let j35 = all_ones(35, 35);
        assert_eq!(j35.mul(&j35).unwrap(), j35.scale(&BigInt::from(35)));
        let a = build_skew_lines(p(2), &g()).unwrap();
        assert_eq!(a.mul(&j35).unwrap(), j35.scale(&BigInt::from(16)));
    }

    #[test]
    fn matrix_identity() {
        for q in [2, 3] {
            let a = build_skew_lines(p(q), &g()).unwrap();
            assert!(verify_matrix_identity(&a, p(q)).unwrap());
        }
        assert!(!verify_matrix_identity(&all_ones(35, 35), p(2)).unwrap());
        assert!(verify_matrix_identity(&all_ones(3, 3), p(2)).is_err());
    }

    #[test]
    fn counting_lemmas_p2() {
        let rep = verify_counting_lemmas(p(2), &g()).unwrap();
        assert!(rep.passed(), "{:#?}", rep.checks);
        assert_eq!(rep.checks[0].computed, "{16} / {6} / {8}");
        assert_eq!(rep.checks[1].computed, "{16} / {12}");
    }

    #[test]
    fn spec_validation() {
        assert!(IncidenceSpec::skew(p(2), 4, 0, 2).validate().is_err());
        assert!(IncidenceSpec::skew(p(2), 4, 2, 4).validate().is_err());
        let bad = IncidenceSpec {
            p: p(2),
            n: 4,
            r: 2,
            s: 2,
            kind: IncidenceKind::HyperplaneComplement,
        };
        assert!(bad.validate().is_err());
        assert!(build_eta(&IncidenceSpec::psi(p(2)), &g()).is_err());
    }
}

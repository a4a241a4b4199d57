//! Closed-form predictions for the skew-lines matrix `A` of `F_p^4` and the
//! verification runs that compare them against computed values.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_subspaces, ResourceGuard};
use crate::gfp::{rank, Prime};
use crate::incidence::{
    counting_checks, incidence_between, matrix_identity_from_square, IncidenceKind,
};
use crate::intmat::IntMatrix;
use crate::report::Check;
use crate::snf::{
    determinant, determinant_modular, diagonal_product, filtration_dims, p_local_with,
    profile_from_filtration, smith_normal_form, spectrum_checks_from_square, valuation,
    ElementaryDivisorProfile, PLocalOptions,
};

/// Largest prime verified without an explicit override.
pub const DEFAULT_PRIME_LIMIT: u64 = 7;

/// Matrix sizes above which the slow exact routines are skipped unless
/// [`VerifyOptions::exhaustive`] is set.
pub const BIGINT_MAX_DIM: usize = 200;
pub const BAREISS_MAX_DIM: usize = 200;
pub const MODULAR_DET_MAX_DIM: usize = 1000;

fn exact_div(num: u128, den: u128) -> u128 {
    debug_assert_eq!(num % den, 0, "{num} / {den} is not exact");
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub value: i128,
    pub multiplicity: u128,
}

/// Predicted invariants of the skew-lines matrix for one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub p: Prime,
    /// Multiplicities of `p^0, ..., p^4` among the elementary divisors.
    pub e: [u128; 5],
    pub det_sign: i8,
    pub det_valuation: u128,
    /// `p⁴`, `p`, `−p²` with their multiplicities.
    pub eig: [Eigenvalue; 3],
    /// `dim S_1, dim S_2, dim S_3`.
    pub dims: [u128; 3],
    /// Numbers of points, lines and planes.
    pub counts: [u128; 3],
    pub kernel_dim: u128,
    pub phi_rank: u128,
    pub psi_rank: u128,
    pub phi_plus_psi_rank: u128,
}

pub fn closed_forms(p: Prime) -> ClosedForms {
    let q = u128::from(p.get());
    let (q2, q3, q4) = (q * q, q * q * q, q * q * q * q);
    let s2 = exact_div(q * (2 * q2 + 1), 3);
    let s1 = exact_div(q * (q + 1) * (q + 2), 6);
    let e = [
        s2,
        exact_div(q * (3 * q3 + 3 * q - 2 * q2 - 1), 3),
        exact_div(q * (q + 1) * (q + 2), 3),
        s2,
        1,
    ];
    let points = q3 + q2 + q + 1;
    let lines = (q2 + 1) * (q2 + q + 1);
    let cf = ClosedForms {
        p,
        e,
        det_sign: if q % 2 == 0 { 1 } else { -1 },
        det_valuation: q4 + 2 * q3 + 3 * q2 + 2 * q + 4,
        eig: [
            Eigenvalue {
                value: q4 as i128,
                multiplicity: 1,
            },
            Eigenvalue {
                value: q as i128,
                multiplicity: q4 + q2,
            },
            Eigenvalue {
                value: -(q2 as i128),
                multiplicity: q3 + q2 + q,
            },
        ],
        dims: [s1, s2, s1],
        counts: [points, lines, points],
        kernel_dim: exact_div(3 * q4 + q3 + 6 * q2 + 2 * q + 3, 3),
        phi_rank: s1 + s2,
        psi_rank: s2 + s1,
        phi_plus_psi_rank: s1 + s2 + s1,
    };
    debug_assert!(
        cf.consistency_violations().is_empty(),
        "{:?}",
        cf.consistency_violations()
    );
    cf
}

impl ClosedForms {
    /// Internal relations that must hold between the fields; returns a
    /// description of each one that fails.
    pub fn consistency_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut rel = |name: &str, lhs: u128, rhs: u128| {
            if lhs != rhs {
                out.push(format!("{name}: {lhs} != {rhs}"));
            }
        };
        let lines = self.counts[1];
        rel("sum e_i = |L_2|", self.e.iter().sum(), lines);
        let weighted: u128 = self.e.iter().enumerate().map(|(i, &x)| i as u128 * x).sum();
        rel("sum i e_i = det valuation", weighted, self.det_valuation);
        rel("e_0 = dim S_2", self.e[0], self.dims[1]);
        rel("e_2 = 2 dim S_1", self.e[2], 2 * self.dims[0]);
        rel("dim S_1 = dim S_3", self.dims[0], self.dims[2]);
        rel(
            "kernel dim = |L_2| - e_0",
            self.kernel_dim,
            lines - self.e[0],
        );
        rel(
            "eigenvalue multiplicities sum to |L_2|",
            self.eig.iter().map(|x| x.multiplicity).sum(),
            lines,
        );
        rel(
            "dim S_1 + dim S_2 + dim S_3 = |L_1| - 1",
            self.dims.iter().sum(),
            self.counts[0] - 1,
        );
        rel(
            "phi + psi rank",
            self.phi_plus_psi_rank,
            self.dims.iter().sum(),
        );
        let trace: i128 = self
            .eig
            .iter()
            .map(|x| x.value * x.multiplicity as i128)
            .sum();
        if trace != 0 {
            out.push(format!("eigenvalues sum to {trace}, not 0"));
        }
        let neg = self.eig[2].multiplicity;
        let sign = if neg % 2 == 0 { 1 } else { -1 };
        if sign != self.det_sign {
            out.push("determinant sign disagrees with the eigenvalue count".into());
        }
        out
    }

    pub fn lines(&self) -> usize {
        self.counts[1] as usize
    }
}

/// Which elementary-divisor engine(s) to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Bigint,
    PLocal,
    Both,
}

impl Engine {
    /// Both engines while the integer Smith form is cheap, p-local beyond.
    pub fn default_for(p: Prime) -> Engine {
        if closed_forms(p).lines() <= BIGINT_MAX_DIM {
            Engine::Both
        } else {
            Engine::PLocal
        }
    }

    fn runs_bigint(self) -> bool {
        matches!(self, Engine::Bigint | Engine::Both)
    }

    fn runs_p_local(self) -> bool {
        matches!(self, Engine::PLocal | Engine::Both)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub guard: ResourceGuard,
    /// Permit primes above [`DEFAULT_PRIME_LIMIT`] (p-local engine only).
    pub allow_large_prime: bool,
    /// Run every check regardless of matrix size.
    pub exhaustive: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            guard: ResourceGuard::default(),
            allow_large_prime: false,
            exhaustive: false,
        }
    }
}

/// One row of the elementary divisor table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorRow {
    pub exponent: u32,
    pub divisor: String,
    pub expected: u128,
    /// Multiplicity found by each method, keyed by method name.
    pub computed: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub p: Prime,
    pub matrix_size: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<DivisorRow>,
    pub checks: Vec<Check>,
    /// Checks that were not run, with the reason.
    pub skipped: Vec<String>,
    pub passed: bool,
    pub timing_ms: BTreeMap<String, u64>,
}

impl VerificationReport {
    fn new(p: Prime, matrix_size: usize) -> Self {
        VerificationReport {
            p,
            matrix_size,
            table: Vec::new(),
            checks: Vec::new(),
            skipped: Vec::new(),
            passed: true,
            timing_ms: BTreeMap::new(),
        }
    }

    fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    fn fail(&mut self, name: &str, err: &Error) {
        self.push(Check::with_verdict(
            name,
            "a result",
            format!("error: {err}"),
            false,
        ));
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timing_ms
            .insert(label.to_string(), t.elapsed().as_millis() as u64);
        out
    }

    /// Appends the checks, skips and timings of `other`.
    pub fn merge(&mut self, other: VerificationReport) {
        if self.table.is_empty() {
            self.table = other.table;
        }
        for c in other.checks {
            self.push(c);
        }
        self.skipped.extend(other.skipped);
        self.timing_ms.extend(other.timing_ms);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The JSON form without `timing_ms`, for comparing runs.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("timing_ms");
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// The divisor table followed by the check list.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s += &format!("p = {}, A is {n} x {n}\n\n", self.p, n = self.matrix_size);
        if !self.table.is_empty() {
            let methods: Vec<&String> = self.table[0].computed.keys().collect();
            s += &format!("{:>12}  {:>12}", "Elem. Div.", "Multiplicity");
            for m in &methods {
                s += &format!("  {:>10}", m);
            }
            s += "\n";
            for row in &self.table {
                s += &format!("{:>12}  {:>12}", row.divisor, row.expected);
                for m in &methods {
                    let c = row.computed[*m];
                    let mark = if c as u128 == row.expected { ' ' } else { '*' };
                    s += &format!("  {:>9}{mark}", c);
                }
                s += "\n";
            }
            s += "\n";
        }
        for c in &self.checks {
            s += &format!("{c}\n");
        }
        for k in &self.skipped {
            s += &format!("[skip] {k}\n");
        }
        s += &format!("\n{}\n", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Rejects primes above [`DEFAULT_PRIME_LIMIT`] unless `opts` allows them and
/// the engine is p-local.
pub fn check_prime(p: Prime, engine: Option<Engine>, opts: &VerifyOptions) -> Result<()> {
    if p.get() <= DEFAULT_PRIME_LIMIT {
        return Ok(());
    }
    if !opts.allow_large_prime {
        return Err(Error::PrimeTooLarge {
            p: p.get(),
            limit: DEFAULT_PRIME_LIMIT,
        });
    }
    if engine.is_some_and(|e| e != Engine::PLocal) {
        return Err(Error::InvalidSpec(format!(
            "p = {p} above {DEFAULT_PRIME_LIMIT} requires the p-local engine"
        )));
    }
    Ok(())
}

struct Geometry {
    a: IntMatrix,
    phi: IntMatrix,
    psi: IntMatrix,
}

fn build_geometry(p: Prime, guard: &ResourceGuard) -> Result<Geometry> {
    let l1 = enumerate_subspaces(p, 4, 1, guard)?;
    let l2 = enumerate_subspaces(p, 4, 2, guard)?;
    let l3 = enumerate_subspaces(p, 4, 3, guard)?;
    Ok(Geometry {
        a: incidence_between(&l2, &l2, IncidenceKind::Skew)?,
        phi: incidence_between(&l1, &l2, IncidenceKind::Skew)?,
        psi: incidence_between(&l3, &l2, IncidenceKind::HyperplaneComplement)?,
    })
}

fn profile_checks(
    report: &mut VerificationReport,
    cf: &ClosedForms,
    method: &str,
    prof: &ElementaryDivisorProfile,
) {
    let expected: Vec<String> = cf.e.iter().map(u128::to_string).collect();
    let got: Vec<String> = prof.counts(5).iter().map(usize::to_string).collect();
    report.push(Check::new(
        format!("f_0..f_4 ({method})"),
        format!("({})", expected.join(", ")),
        format!("({})", got.join(", ")),
    ));
    let beyond: usize = prof.multiplicities.range(5..).map(|(_, &f)| f).sum();
    report.push(Check::new(format!("f_i for i >= 5 ({method})"), 0, beyond));
    report.push(Check::new(
        format!("nonsingular ({method})"),
        0,
        prof.zero_factors(),
    ));
    for (i, row) in report.table.iter_mut().enumerate() {
        row.computed
            .insert(method.to_string(), prof.count(i as u32));
    }
}

/// Builds `A`, computes its elementary divisors with the selected engine(s)
/// and the filtration, and checks them against [`closed_forms`] together with
/// the determinant, the quadratic matrix identity, the counting identities
/// and the spectrum. Every failure is recorded; nothing aborts early.
pub fn verify_theorem(p: Prime, engine: Engine) -> Result<VerificationReport> {
    verify_theorem_with(p, engine, &VerifyOptions::default())
}

pub fn verify_theorem_with(
    p: Prime,
    engine: Engine,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_prime(p, Some(engine), opts)?;
    let cf = closed_forms(p);
    let n = cf.lines();
    let mut report = VerificationReport::new(p, n);
    let geo = report.timed("build", || build_geometry(p, &opts.guard))?;
    let a = &geo.a;
    let pb = BigInt::from(p.get());
    report.table = (0..5u32)
        .map(|i| DivisorRow {
            exponent: i,
            divisor: pb.pow(i).to_string(),
            expected: cf.e[i as usize],
            computed: BTreeMap::new(),
        })
        .collect();

    let mut snf_diagonal = None;
    let mut profiles = Vec::new();
    if engine.runs_bigint() {
        let snf = report.timed("bigint", || smith_normal_form(a, false));
        let prof = ElementaryDivisorProfile::from_invariant_factors(p, n, &snf.diagonal);
        profile_checks(&mut report, &cf, "bigint", &prof);
        profiles.push(("bigint", prof));
        snf_diagonal = Some(snf.diagonal);
    }
    if engine.runs_p_local() {
        let pl_opts = PLocalOptions {
            validate_max_dim: 0,
            ..PLocalOptions::default()
        };
        match report.timed("p_local", || p_local_with(a, p, &pl_opts)) {
            Ok(run) => {
                profile_checks(&mut report, &cf, "p_local", &run.profile);
                profiles.push(("p_local", run.profile));
            }
            Err(e) => report.fail("p-local elimination", &e),
        }
    }

    match report.timed("filtration", || filtration_dims(a, p, 5)) {
        Ok(dims) => {
            let prof = profile_from_filtration(p, n, &dims);
            let f: Vec<String> = prof.counts(5).iter().map(usize::to_string).collect();
            let e: Vec<String> = cf.e.iter().map(u128::to_string).collect();
            report.push(Check::new(
                "f_0..f_4 (filtration)",
                format!("({})", e.join(", ")),
                format!("({})", f.join(", ")),
            ));
            report.push(Check::new("dim of M_5 mod p (filtration)", 0, dims[5]));
            for (i, row) in report.table.iter_mut().enumerate() {
                row.computed
                    .insert("filtration".to_string(), prof.count(i as u32));
            }
            profiles.push(("filtration", prof));
        }
        Err(e) => report.fail("filtration", &e),
    }
    if let [(first, base), rest @ ..] = profiles.as_slice() {
        for (name, prof) in rest {
            report.push(Check::with_verdict(
                format!("{first} and {name} profiles agree"),
                format!("{:?}", base.multiplicities),
                format!("{:?}", prof.multiplicities),
                base.multiplicities == prof.multiplicities,
            ));
        }
        report.push(Check::new(
            "sum i f_i = det valuation",
            cf.det_valuation,
            base.weighted_sum(),
        ));
    }

    if n <= MODULAR_DET_MAX_DIM || opts.exhaustive {
        match report.timed("determinant", || determinant_modular(a)) {
            Ok(det) => {
                if n <= BAREISS_MAX_DIM {
                    match report.timed("bareiss", || determinant(a)) {
                        Ok(d) => report.push(Check::with_verdict(
                            "Bareiss and multi-modular determinants agree",
                            "equal",
                            if d == det { "equal" } else { "different" },
                            d == det,
                        )),
                        Err(e) => report.fail("Bareiss determinant", &e),
                    }
                }
                determinant_checks(&mut report, &cf, &det, snf_diagonal.as_deref());
            }
            Err(e) => report.fail("determinant", &e),
        }
    } else {
        report.skipped.push(format!(
            "exact determinant: {n} x {n} exceeds {MODULAR_DET_MAX_DIM}"
        ));
    }

    let a2 = match report.timed("square", || a.mul(a)) {
        Ok(m) => m,
        Err(e) => {
            report.fail("A^2", &e);
            return Ok(report);
        }
    };
    match report.timed("matrix_identity", || matrix_identity_from_square(a, &a2, p)) {
        Ok(ok) => report.push(Check::with_verdict(
            "A^2 + (p^2 - p)A - p^3 I - (p^4 - p^3)J",
            "0",
            if ok { "0" } else { "nonzero" },
            ok,
        )),
        Err(e) => report.fail("matrix identity", &e),
    }
    match report.timed("counting", || {
        counting_checks(p, a, &a2, &geo.phi, &geo.psi)
    }) {
        Ok(c) => c.checks.into_iter().for_each(|c| report.push(c)),
        Err(e) => report.fail("counting identities", &e),
    }
    let exact_ranks = n <= BAREISS_MAX_DIM || opts.exhaustive;
    match report.timed("spectrum", || {
        spectrum_checks_from_square(a, &a2, p, exact_ranks)
    }) {
        Ok(c) => c.into_iter().for_each(|c| report.push(c)),
        Err(e) => report.fail("spectrum", &e),
    }
    Ok(report)
}

fn determinant_checks(
    report: &mut VerificationReport,
    cf: &ClosedForms,
    det: &BigInt,
    diag: Option<&[BigInt]>,
) {
    if det.is_zero() {
        report.push(Check::with_verdict("det(A)", "nonzero", "0", false));
        return;
    }
    let sign = if det.is_negative() { -1 } else { 1 };
    report.push(Check::new("sign of det(A)", cf.det_sign, sign));
    let v = valuation(det, report.p);
    report.push(Check::new("v_p(det A)", cf.det_valuation, v));
    let pure = BigInt::from(report.p.get()).pow(v) == det.abs();
    report.push(Check::with_verdict(
        "|det A| is a power of p",
        "yes",
        if pure { "yes" } else { "no" },
        pure,
    ));
    if let Some(d) = diag {
        let prod = diagonal_product(d);
        let same = prod == det.abs();
        report.push(Check::with_verdict(
            "|det A| = product of Smith diagonal",
            "equal",
            if same { "equal" } else { "different" },
            same,
        ));
    }
}

/// Rank, containment and kernel consequences of the module structure of the
/// point, line and plane maps, all computed mod p.
pub fn verify_rank_structure(p: Prime) -> Result<VerificationReport> {
    verify_rank_structure_with(p, &VerifyOptions::default())
}

pub fn verify_rank_structure_with(p: Prime, opts: &VerifyOptions) -> Result<VerificationReport> {
    check_prime(p, None, opts)?;
    let cf = closed_forms(p);
    let n = cf.lines();
    let mut report = VerificationReport::new(p, n);
    let geo = report.timed("build", || build_geometry(p, &opts.guard))?;
    let t = Instant::now();
    let (a, phi, psi) = (
        geo.a.reduce_mod(p),
        geo.phi.reduce_mod(p),
        geo.psi.reduce_mod(p),
    );
    let (ra, (rphi, rpsi)) = rayon::join(|| rank(&a), || rayon::join(|| rank(&phi), || rank(&psi)));
    let stacked = |x: &crate::gfp::FpMatrix, y: &crate::gfp::FpMatrix| {
        rank(&x.vstack(y).expect("same width"))
    };
    let (r_both, (r_phi_a, r_psi_a)) = rayon::join(
        || stacked(&phi, &psi),
        || rayon::join(|| stacked(&phi, &a), || stacked(&psi, &a)),
    );
    report
        .timing_ms
        .insert("ranks".into(), t.elapsed().as_millis() as u64);

    report.push(Check::new("rank_p(A) = dim S_2", cf.dims[1], ra));
    report.push(Check::new(
        "rank_p(phi) = dim S_1 + dim S_2",
        cf.phi_rank,
        rphi,
    ));
    report.push(Check::new(
        "rank_p(psi) = dim S_2 + dim S_3",
        cf.psi_rank,
        rpsi,
    ));
    report.push(Check::new(
        "rank_p(phi over psi) = dim S_1 + dim S_2 + dim S_3",
        cf.phi_plus_psi_rank,
        r_both,
    ));
    report.push(Check::new(
        "row spaces of phi and psi meet in dim S_2",
        cf.dims[1],
        (rphi + rpsi) as i64 - r_both as i64,
    ));
    report.push(Check::new(
        "row space of A inside that of phi (rank of phi over A)",
        rphi,
        r_phi_a,
    ));
    report.push(Check::new(
        "row space of A inside that of psi (rank of psi over A)",
        rpsi,
        r_psi_a,
    ));
    report.push(Check::new("dim ker of A mod p", cf.kernel_dim, n - ra));
    for (name, m) in [("phi", &geo.phi), ("psi", &geo.psi)] {
        let q = BigInt::from(p.get());
        let bad = m.col_sums().iter().filter(|s| !(*s % &q).is_zero()).count();
        report.push(Check::new(
            format!("columns of {name} with sum not divisible by p"),
            0,
            bad,
        ));
    }
    Ok(report)
}

/// [`verify_theorem_with`] followed by [`verify_rank_structure_with`], merged.
pub fn verify_all(p: Prime, engine: Engine, opts: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = verify_theorem_with(p, engine, opts)?;
    let ranks = verify_rank_structure_with(p, opts)?;
    report.timing_ms.remove("build");
    report.merge(VerificationReport {
        timing_ms: BTreeMap::new(),
        ..ranks
    });
    Ok(report)
}

pub const IDENTITY_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// The polynomial identities between the closed forms, evaluated at each
/// prime in [`IDENTITY_PRIMES`].
pub fn polynomial_identity_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for q in IDENTITY_PRIMES {
        let p = Prime::new(q).expect("listed primes are prime");
        let cf = closed_forms(p);
        let q = u128::from(q);
        let lines = (q * q + 1) * (q * q + q + 1);
        let weighted: u128 = cf.e.iter().enumerate().map(|(i, &x)| i as u128 * x).sum();
        out.push(Check::new(
            format!("p={q}: sum e_i = (p^2+1)(p^2+p+1)"),
            lines,
            cf.e.iter().sum::<u128>(),
        ));
        out.push(Check::new(
            format!("p={q}: sum i e_i = p^4+2p^3+3p^2+2p+4"),
            q.pow(4) + 2 * q.pow(3) + 3 * q * q + 2 * q + 4,
            weighted,
        ));
        out.push(Check::new(format!("p={q}: e_0 = e_3"), cf.e[0], cf.e[3]));
        out.push(Check::new(
            format!("p={q}: dim S_1 = dim S_3"),
            cf.dims[0],
            cf.dims[2],
        ));
        out.push(Check::new(
            format!("p={q}: 1 + (p^4+p^2) + (p^3+p^2+p) = (p^2+1)(p^2+p+1)"),
            lines,
            1 + (q.pow(4) + q * q) + (q.pow(3) + q * q + q),
        ));
    }
    out
}

pub fn multiplicity_polynomial_identities() -> bool {
    polynomial_identity_checks().iter().all(|c| c.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let cf = closed_forms(prime(2));
        assert_eq!(cf.e, [6, 14, 8, 6, 1]);
        assert_eq!((cf.det_sign, cf.det_valuation), (1, 52));
        assert_eq!(cf.dims, [4, 6, 4]);
        assert_eq!(cf.kernel_dim, 29);
        assert_eq!(
            (cf.phi_rank, cf.psi_rank, cf.phi_plus_psi_rank),
            (10, 10, 14)
        );

        let cf = closed_forms(prime(3));
        assert_eq!(cf.e, [19, 71, 20, 19, 1]);
        assert_eq!((cf.det_sign, cf.det_valuation), (-1, 172));
        assert_eq!(cf.kernel_dim, 111);

        let cf = closed_forms(prime(5));
        assert_eq!(cf.e, [85, 565, 70, 85, 1]);
        assert_eq!(cf.e.iter().sum::<u128>(), 806);
        assert_eq!(cf.det_valuation, 964);

        let cf = closed_forms(prime(7));
        assert_eq!(cf.e, [231, 2219, 168, 231, 1]);
        assert_eq!(cf.counts[1], 2850);
    }

    #[test]
    fn closed_forms_consistent_below_100() {
        for q in (2..=100).filter(|&q| crate::gfp::is_prime(q)) {
            let cf = closed_forms(prime(q));
            assert!(
                cf.consistency_violations().is_empty(),
                "p = {q}: {:?}",
                cf.consistency_violations()
            );
        }
    }

    #[test]
    fn identities_hold() {
        assert!(multiplicity_polynomial_identities());
        assert_eq!(polynomial_identity_checks().len(), 30);
    }

    #[test]
    fn guard_on_primes() {
        assert!(matches!(
            verify_theorem(prime(11), Engine::PLocal),
            Err(Error::PrimeTooLarge { .. })
        ));
        let opts = VerifyOptions {
            allow_large_prime: true,
            ..VerifyOptions::default()
        };
        assert!(matches!(
            verify_theorem_with(prime(11), Engine::Both, &opts),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn theorem_at_two() {
        let r = verify_theorem(prime(2), Engine::Both).unwrap();
        assert!(r.passed, "{r}");
        let rows: Vec<(String, usize)> = r
            .table
            .iter()
            .map(|row| (row.divisor.clone(), row.computed["bigint"]))
            .collect();
        let want = [("1", 6), ("2", 14), ("4", 8), ("8", 6), ("16", 1)];
        assert_eq!(rows, want.map(|(d, f)| (d.to_string(), f)));
        assert!(r.skipped.is_empty());
    }

    #[test]
    fn rank_structure_at_two() {
        let r = verify_rank_structure(prime(2)).unwrap();
        assert!(r.passed, "{r}");
        let get = |prefix: &str| {
            r.checks
                .iter()
                .find(|c| c.name.starts_with(prefix))
                .unwrap()
                .computed
                .clone()
        };
        assert_eq!(get("rank_p(A)"), "6");
        assert_eq!(get("rank_p(phi) "), "10");
        assert_eq!(get("rank_p(psi)"), "10");
        assert_eq!(get("rank_p(phi over psi)"), "14");
        assert_eq!(get("dim ker"), "29");
    }

    #[test]
    fn report_json_drops_timing() {
        let r = verify_rank_structure(prime(2)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json_without_timing()).unwrap();
        assert!(v.get("timing_ms").is_none());
        assert_eq!(v["passed"], true);
    }
}

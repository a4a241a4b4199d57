use std::collections::BTreeSet;

use num_bigint::BigUint;
use skewlines::geometry::{enumerate_subspaces, gaussian_binomial, ResourceGuard};
use skewlines::gfp::rref;
use skewlines::incidence::{build_skew_lines, verify_counting_lemmas, verify_matrix_identity};
use skewlines::mmio::{
    ordering_comments, read_csv, read_matrix_market, write_csv, write_matrix_market,
};
use skewlines::{build_psi, is_incident, Error, FpMatrix, Prime};

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

/// `∏_{i<r} (q^(n-i) - 1) / (q^(i+1) - 1)`, evaluated in u128.
fn subspace_count(n: u32, r: u32, q: u128) -> u128 {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..r {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

#[test]
fn family_sizes_for_n_up_to_five() {
    let guard = ResourceGuard::default();
    for q in [2u64, 3, 5] {
        for n in 0..=5usize {
            for r in 0..=n {
                let fam = enumerate_subspaces(prime(q), n, r, &guard).unwrap();
                let want = subspace_count(n as u32, r as u32, u128::from(q));
                assert_eq!(fam.len() as u128, want, "p={q} n={n} r={r}");
                assert_eq!(
                    gaussian_binomial(n as i64, r as i64, q),
                    BigUint::from(want)
                );
                let keys: BTreeSet<&[u32]> = fam.iter().map(|s| s.key()).collect();
                assert_eq!(keys.len(), fam.len());
                assert!(fam.members().windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}

#[test]
fn members_are_in_reduced_echelon_form() {
    let fam = enumerate_subspaces(prime(3), 5, 2, &ResourceGuard::default()).unwrap();
    for s in &fam {
        assert_eq!(&rref(s.basis()).matrix, s.basis());
        assert_eq!(s.dim(), 2);
    }
}

#[test]
fn enumeration_is_exhaustive_for_small_space() {
    // every pair of vectors of F_2^4 spans a line or less; collect distinct spans
    let p = prime(2);
    let guard = ResourceGuard::default();
    let fam = enumerate_subspaces(p, 4, 2, &guard).unwrap();
    let vecs: Vec<Vec<i64>> = (1..16)
        .map(|x| (0..4).map(|b| (x >> (3 - b)) & 1).collect())
        .collect();
    let mut found = BTreeSet::new();
    for a in &vecs {
        for b in &vecs {
            let m = FpMatrix::from_rows(p, &[a.clone(), b.clone()]).unwrap();
            let r = rref(&m);
            if r.rank == 2 {
                found.insert(r.matrix.data().to_vec());
            }
        }
    }
    assert_eq!(found.len(), fam.len());
    for s in &fam {
        assert!(found.contains(s.key()));
    }
}

#[test]
fn skew_degree_is_p4() {
    for q in [2u64, 3] {
        let p = prime(q);
        let lines = enumerate_subspaces(p, 4, 2, &ResourceGuard::default()).unwrap();
        for x in &lines {
            let skew = lines.iter().filter(|y| is_incident(x, y).unwrap()).count();
            assert_eq!(skew as u64, q.pow(4));
        }
    }
}

#[test]
fn guard_and_env_cap() {
    let small = ResourceGuard {
        cap: 100,
        allow_override: false,
    };
    let err = enumerate_subspaces(prime(3), 4, 2, &small).unwrap_err();
    assert!(matches!(err, Error::ResourceCap { .. }));
    let over = ResourceGuard {
        cap: 100,
        allow_override: true,
    };
    assert_eq!(
        enumerate_subspaces(prime(3), 4, 2, &over).unwrap().len(),
        130
    );
}

#[test]
fn quadratic_identity_for_small_primes() {
    for q in [2u64, 3, 5] {
        let p = prime(q);
        let a = build_skew_lines(p, &ResourceGuard::default()).unwrap();
        assert!(verify_matrix_identity(&a, p).unwrap(), "p = {q}");
    }
    // a perturbed matrix must fail
    let p = prime(2);
    let mut a = build_skew_lines(p, &ResourceGuard::default()).unwrap();
    a.set(0, 1, 1 - a.get(0, 1));
    assert!(!verify_matrix_identity(&a, p).unwrap());
}

#[test]
fn counting_lemmas_for_two_and_three() {
    for q in [2u64, 3] {
        let r = verify_counting_lemmas(prime(q), &ResourceGuard::default()).unwrap();
        assert!(r.passed(), "{:#?}", r.checks);
        assert_eq!(r.checks.len(), 5);
    }
}

#[test]
fn incidence_files_round_trip() {
    let p = prime(3);
    let guard = ResourceGuard::default();
    let a = build_skew_lines(p, &guard).unwrap();
    let lines = enumerate_subspaces(p, 4, 2, &guard).unwrap();
    let comments = ordering_comments("row", &lines, true);
    assert_eq!(comments.len(), 131);
    assert_eq!(comments[1], "row 1: [0 0 1 0 | 0 0 0 1]");
    assert_eq!(comments[130], "row 130: [1 2 2 0 | 0 0 0 1]");

    let mut mm = Vec::new();
    write_matrix_market(&a, &comments, &mut mm).unwrap();
    assert_eq!(read_matrix_market(mm.as_slice()).unwrap(), a);
    let text = String::from_utf8(mm).unwrap();
    assert_eq!(
        text.lines().nth(132).unwrap(),
        format!("130 130 {}", 130 * 81)
    );

    let psi = build_psi(p, &guard).unwrap();
    let mut csv = Vec::new();
    write_csv(&psi, &comments, &mut csv).unwrap();
    assert_eq!(read_csv(csv.as_slice()).unwrap(), psi);
}

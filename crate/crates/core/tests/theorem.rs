use skewlines::theorem::{verify_all, VerifyOptions, BAREISS_MAX_DIM};
use skewlines::{closed_forms, verify_rank_structure, verify_theorem, Engine, Prime};

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

#[test]
fn theorem_at_three_with_both_engines() {
    let r = verify_theorem(prime(3), Engine::Both).unwrap();
    assert!(r.passed, "{r}");
    assert!(r.skipped.is_empty());
    let expected: Vec<u128> = r.table.iter().map(|row| row.expected).collect();
    assert_eq!(expected, [19, 71, 20, 19, 1]);
    for row in &r.table {
        assert_eq!(row.computed.len(), 3);
        assert!(row.computed.values().all(|&c| c as u128 == row.expected));
    }
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert!(names.contains(&"|det A| = product of Smith diagonal"));
    assert!(names.contains(&"sign of det(A)"));
    let sign = r
        .checks
        .iter()
        .find(|c| c.name == "sign of det(A)")
        .unwrap();
    assert_eq!(sign.computed, "-1");
}

#[test]
fn rank_structure_at_three() {
    let r = verify_rank_structure(prime(3)).unwrap();
    assert!(r.passed, "{r}");
    let get = |prefix: &str| {
        r.checks
            .iter()
            .find(|c| c.name.starts_with(prefix))
            .unwrap()
            .computed
            .clone()
    };
    assert_eq!(get("rank_p(A)"), "19");
    assert_eq!(get("rank_p(phi over psi)"), "39");
    assert_eq!(get("dim ker"), "111");
}

#[test]
fn merged_report_is_stable() {
    let opts = VerifyOptions::default();
    let a = verify_all(prime(3), Engine::PLocal, &opts).unwrap();
    let b = verify_all(prime(3), Engine::PLocal, &opts).unwrap();
    assert!(a.passed);
    assert_eq!(a.to_json_without_timing(), b.to_json_without_timing());
    let text = a.render();
    assert!(text.contains("Elem. Div."));
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn defaults_pick_engine_by_size() {
    assert_eq!(Engine::default_for(prime(3)), Engine::Both);
    assert_eq!(Engine::default_for(prime(5)), Engine::PLocal);
    assert!(closed_forms(prime(3)).lines() <= BAREISS_MAX_DIM);
}

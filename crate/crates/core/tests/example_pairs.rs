use motzkin_core::representation::{build_example_pair, validate_pair, ExampleFamily};
use motzkin_core::{Error, Lambda};

fn lam(n: i64, d: i64) -> Lambda {
    Lambda::from_ratio(n, d).unwrap()
}

// With n = 6, r = 1 the two free mirror pairs share 1 − 2λ, so each needs
// x + λ²/x = (1 − 2λ)/2, solvable only when (1 − 2λ)/2 ≥ 2λ, i.e. λ ≤ 1/6.
#[test]
fn six_one_is_infeasible_above_one_sixth() {
    let err = build_example_pair(ExampleFamily::III, 6, 1, &lam(1, 5)).unwrap_err();
    assert!(matches!(err, Error::Parameter(_)), "{err:?}");
    for l in [lam(1, 6), lam(1, 7), lam(1, 8)] {
        let p = build_example_pair(ExampleFamily::III, 6, 1, &l).unwrap();
        assert!(validate_pair(&p).all_pass());
    }
}

#[test]
fn pair_conditions_hold_across_families() {
    let cases = [
        (ExampleFamily::I, 3, 0, lam(1, 3)),
        (ExampleFamily::I, 5, 0, lam(1, 5)),
        (ExampleFamily::II, 4, 1, lam(1, 4)),
        (ExampleFamily::III, 4, 1, lam(1, 4)),
        (ExampleFamily::III, 4, 2, lam(1, 4)),
        (ExampleFamily::III, 5, 2, lam(1, 5)),
    ];
    for (f, n, r, l) in cases {
        let p = build_example_pair(f, n, r, &l).unwrap();
        let checks = validate_pair(&p);
        assert!(checks.all_pass(), "{f:?} n={n} r={r}: {:?}", checks.failures().collect::<Vec<_>>());
        let total: f64 = p.a().iter().map(|z| z.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn malformed_requests_are_rejected() {
    assert!(build_example_pair(ExampleFamily::I, 4, 0, &lam(1, 4)).is_err());
    assert!(build_example_pair(ExampleFamily::III, 4, 3, &lam(1, 4)).is_err());
    assert!(build_example_pair(ExampleFamily::III, 1, 1, &lam(1, 4)).is_err());
    assert!("iv".parse::<ExampleFamily>().is_err());
}

use motzkin_core::scalar::int;
use motzkin_core::{enumerate_basis, AlgebraElement, Lambda, Limits, MotzkinDiagram};
use proptest::prelude::*;

fn lam() -> Lambda {
    Lambda::from_ratio(1, 4).unwrap()
}

fn basis(k: usize) -> Vec<MotzkinDiagram> {
    enumerate_basis(k, &Limits::default()).unwrap()
}

/// Up to four basis diagrams with small integer coefficients.
fn element(k: usize) -> impl Strategy<Value = AlgebraElement> {
    let n = basis(k).len();
    prop::collection::vec((0..n, -3i64..=3), 1..=4).prop_map(move |terms| {
        let b = basis(k);
        AlgebraElement::from_terms(k, lam(), terms.into_iter().map(|(i, c)| (b[i].clone(), int(c)))).unwrap()
    })
}

fn tl_diagram(k: usize) -> impl Strategy<Value = MotzkinDiagram> {
    let tl: Vec<_> = basis(k).into_iter().filter(MotzkinDiagram::is_temperley_lieb).collect();
    prop::sample::select(tl)
}

fn diagram(k: usize) -> impl Strategy<Value = MotzkinDiagram> {
    let n = basis(k).len();
    (0..n).prop_map(move |i| basis(k)[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(x in element(3), y in element(3), z in element(3)) {
        let l = Limits::default();
        let left = x.multiply(&y, &l).unwrap().multiply(&z, &l).unwrap();
        let right = x.multiply(&y.multiply(&z, &l).unwrap(), &l).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn adjoint_reverses_products(x in element(3), y in element(3)) {
        let l = Limits::default();
        let lhs = x.multiply(&y, &l).unwrap().adjoint();
        let rhs = y.adjoint().multiply(&x.adjoint(), &l).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn expectation_is_a_bimodule_map(a in element(2), b in element(2), x in element(3)) {
        let l = Limits::default();
        let sandwiched = a.embed(1).multiply(&x, &l).unwrap().multiply(&b.embed(1), &l).unwrap();
        let lhs = sandwiched.conditional_expectation().unwrap();
        let rhs = a.multiply(&x.conditional_expectation().unwrap(), &l).unwrap().multiply(&b, &l).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn expectation_commutes_with_adjoint(x in element(3)) {
        prop_assert_eq!(x.adjoint().conditional_expectation().unwrap(), x.conditional_expectation().unwrap().adjoint());
    }

    #[test]
    fn temperley_lieb_diagrams_are_closed(d in tl_diagram(4), e in tl_diagram(4)) {
        let x = AlgebraElement::from_diagram(d, lam());
        let y = AlgebraElement::from_diagram(e, lam());
        let xy = x.multiply(&y, &Limits::default()).unwrap();
        prop_assert!(xy.terms().all(|(d, _)| d.is_temperley_lieb()));
        prop_assert_eq!(xy.len(), 1);
    }

    #[test]
    fn products_of_diagrams_are_planar(d in diagram(3), e in diagram(3)) {
        let x = AlgebraElement::from_diagram(d, lam());
        let y = AlgebraElement::from_diagram(e, lam());
        let xy = x.multiply(&y, &Limits::default()).unwrap();
        prop_assert_eq!(xy.len(), 1);
        prop_assert!(xy.terms().all(|(d, _)| d.is_planar()));
    }
}

#[test]
fn basis_is_sorted_and_distinct() {
    for k in 1..=4 {
        let b = basis(k);
        assert!(b.windows(2).all(|w| w[0] < w[1]), "k = {k}");
        assert!(b.iter().all(|d| d.is_planar() && d.width() == k));
    }
}

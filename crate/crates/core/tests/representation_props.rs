use motzkin_core::linalg::frobenius;
use motzkin_core::representation::{build_example_pair, evaluate_element, ExampleFamily, MotzkinPair, RepGenerators};
use motzkin_core::{AlgebraElement, Error, Generator, Lambda, Limits};
use proptest::prelude::*;

const K: usize = 3;

fn pair() -> MotzkinPair {
    build_example_pair(ExampleFamily::III, 4, 1, &Lambda::from_ratio(1, 4).unwrap()).unwrap()
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (1..K).prop_map(Generator::T),
        (1..K).prop_map(Generator::L),
        (1..K).prop_map(Generator::R),
        (1..=K).prop_map(Generator::P),
    ]
}

fn adjoint(g: Generator) -> Generator {
    match g {
        Generator::L(i) => Generator::R(i),
        Generator::R(i) => Generator::L(i),
        other => other,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // π(w)* = π(w*), with w* the reversed word of adjoint letters.
    #[test]
    fn words_respect_the_involution(word in prop::collection::vec(generator(), 1..6)) {
        let p = pair();
        let gens = RepGenerators::new(&p, K, &Limits::default()).unwrap();
        let star: Vec<Generator> = word.iter().rev().map(|&g| adjoint(g)).collect();
        let diff = gens.word(&word).unwrap().adjoint() - gens.word(&star).unwrap();
        prop_assert!(frobenius(&diff) < 1e-12);
    }

    // The product computed in the algebra and then represented agrees with
    // the product of the represented generators, whenever the resulting
    // diagrams can be evaluated directly.
    #[test]
    fn words_match_abstract_products(word in prop::collection::vec(generator(), 1..5)) {
        let p = pair();
        let l = Limits::default();
        let lam = p.lambda().clone();
        let mut x = AlgebraElement::identity(K, lam.clone());
        for &g in &word {
            x = x.multiply(&AlgebraElement::generator(K, g, lam.clone()).unwrap(), &l).unwrap();
        }
        match evaluate_element(&p, &x, &l) {
            Ok(m) => {
                let gens = RepGenerators::new(&p, K, &l).unwrap();
                prop_assert!(frobenius(&(m - gens.word(&word).unwrap())) < 1e-10);
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

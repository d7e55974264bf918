use std::process::{Command, Output};

use motzkin::expr::{parse_expression, AbstractEvaluator, RepEvaluator};
use motzkin::suite::{example_pairs, CORPUS};
use motzkin_core::linalg::frobenius;
use motzkin_core::representation::evaluate_element;
use motzkin_core::{Error, Limits};

fn motzkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motzkin")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    motzkin(args).status.code().expect("exit code")
}

#[test]
fn dims_prints_one_csv_line() {
    let out = motzkin(&["dims", "--n", "4", "--kmax", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1,3,8,21,55,144\n");
    let out = motzkin(&["dims", "--n", "3", "--kmax", "4"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1,2,3,4,5\n");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["presentation", "--k", "3", "--lambda", "1/3"]), 0);
    assert_eq!(
        code(&["fock", "toeplitz", "--n", "4", "--r", "1", "--lambda", "1/4", "--levels", "5", "--tol", "1e-9"]),
        0
    );
    assert_eq!(code(&["eval", "t1*t1 - t1", "--k", "2"]), 0);
    assert_eq!(code(&["eval", "t1*t1 - t1", "--k", "2", "--assert-zero"]), 0);
    // checks that fail
    assert_eq!(code(&["eval", "t1", "--k", "2", "--assert-zero"]), 1);
    assert_eq!(code(&["fock", "toeplitz", "--n", "4", "--r", "1", "--levels", "4", "--tol", "1e-30"]), 1);
    // usage, parse and parameter errors
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["eval", "t1 +", "--k", "2"]), 2);
    assert_eq!(code(&["eval", "t5", "--k", "2"]), 2);
    assert_eq!(code(&["presentation", "--k", "3", "--lambda", "0"]), 2);
    assert_eq!(code(&["pair", "make", "--n", "6", "--r", "1", "--lambda", "1/5"]), 2);
    assert_eq!(code(&["rep", "check", "--k", "2"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["fock", "reverse", "--n", "4", "--r", "1", "--levels", "4"];
    let a = motzkin(&args);
    let b = motzkin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], true);
    assert!(text.contains("e-"), "floats use exponent form");
}

#[test]
fn pair_files_round_trip_through_the_cli() {
    let dir = std::env::temp_dir().join(format!("motzkin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pair.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["pair", "make", "--n", "4", "--r", "1", "--lambda", "1/4", "--out", p]), 0);
    assert_eq!(code(&["pair", "validate", "--pair", p]), 0);
    assert_eq!(code(&["rep", "check", "--pair", p, "--k", "3"]), 0);
    assert_eq!(code(&["rep", "faithful", "--pair", p, "--k", "2"]), 0);
    std::fs::write(&path, r#"{"n": 2, "lambda": "1/4", "a": [[1, 0], [0, 0]], "b": [[1, 0], [0, 0]]}"#).unwrap();
    assert_ne!(code(&["pair", "validate", "--pair", p]), 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

// Every corpus expression, evaluated exactly and then represented, agrees
// with its direct numeric evaluation.
#[test]
fn abstract_and_representation_modes_agree() {
    let limits = Limits::default();
    let mut compared = 0;
    for pair in example_pairs().unwrap() {
        for line in CORPUS.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            let (k, src) = line.split_once('|').unwrap();
            let k: usize = k.trim().parse().unwrap();
            let e = parse_expression(src.trim(), k).unwrap();
            let x = AbstractEvaluator::new(k, pair.lambda().clone(), limits).eval(&e).unwrap();
            let (w, m) = RepEvaluator::new(k, &pair, limits).eval(&e).unwrap();
            assert_eq!(w, x.width(), "{src}");
            match evaluate_element(&pair, &x, &limits) {
                Ok(img) => {
                    let r = frobenius(&(img - &m));
                    assert!(r < 1e-10, "n={} {src}: {r:e}", pair.n());
                    compared += 1;
                }
                Err(Error::Unsupported(_)) => {}
                Err(e) => panic!("{src}: {e}"),
            }
            if x.is_zero() {
                assert!(frobenius(&m) < 1e-10, "{src}");
            }
        }
    }
    assert!(compared >= 60, "only {compared} comparisons");
}

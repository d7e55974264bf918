//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use motzkin::suite::{self, Criterion};
use motzkin_core::Limits;

/// Wall-clock budgets stated alongside the criteria.
fn budget(id: u8) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(10)),
        2 => Some(Duration::from_secs(30)),
        _ => None,
    }
}

fn binary(args: &[&str]) -> (Option<i32>, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_motzkin")).args(args).output().expect("binary runs");
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned(), start.elapsed())
}

fn main() -> ExitCode {
    let limits = Limits::default();
    let mut all = true;
    for id in 1..=12 {
        let mut c: Criterion = suite::run(id, &limits);
        if let Some(b) = budget(id) {
            if c.seconds > b.as_secs_f64() {
                c.pass = false;
                c.detail.push_str(&format!("; over the {}s budget", b.as_secs()));
            }
        }
        if id == 12 {
            let (code, out, _) = binary(&["eval", "t1*t1 - t1", "--k", "2"]);
            let zero = out.contains("\"zero\": true");
            let (again, out2, _) = binary(&["eval", "t1*t1 - t1", "--k", "2"]);
            let (all_code, _, took) = binary(&["check-all", "--format", "csv"]);
            let ok = code == Some(0)
                && again == Some(0)
                && zero
                && out == out2
                && all_code == Some(0)
                && took < Duration::from_secs(300);
            c.pass &= ok;
            c.detail.push_str(&format!(
                "; eval exit {code:?}, byte-identical reruns {}; check-all exit {all_code:?} in {:.1}s",
                out == out2,
                took.as_secs_f64()
            ));
        }
        println!("{}", c.line());
        all &= c.pass;
    }
    println!("acceptance: {}", if all { "all criteria pass" } else { "FAILURES" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! The end-to-end acceptance checks, shared by `check-all` and the
//! `acceptance` test target. Each criterion carries its own oracle.

use std::time::Instant;

use motzkin_core::fock::{
    creation_operators, cuntz_pimsner_residual, ideal_generator, matrix_unit_dimension, reverse_identity,
    toeplitz_residuals, SubproductData, MIN_GAP,
};
use motzkin_core::jones_wenzl::{expectation_coefficient, jw_report, JwCache};
use motzkin_core::presentation::check_presentation;
use motzkin_core::qpoly::{phi, phi_infinity, phi_p_ratio, phi_q_ratio, q_parameter};
use motzkin_core::representation::{
    build_example_pair, relation_residuals, span_dimension, ExampleFamily, MotzkinPair, SpanStatus,
};
use motzkin_core::scalar::{int, ratio, to_f64};
use motzkin_core::{enumerate_basis, motzkin_number, Lambda, Limits, Result, Scalar};
use num_traits::One;

use crate::expr::{parse_expression, AbstractEvaluator};
use crate::format::{OutputFormat, Report};

/// Fifty expressions exercising every production of the grammar.
pub const CORPUS: &str = include_str!("../corpus/expressions.txt");

#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

fn lam(num: i64, den: i64) -> Lambda {
    Lambda::from_ratio(num, den).expect("valid λ")
}

/// The two pairs used throughout: `(n=3, λ=1/3)` centred and
/// `(n=4, λ=1/4)` with `r = 1`.
pub fn example_pairs() -> Result<[MotzkinPair; 2]> {
    Ok([
        build_example_pair(ExampleFamily::I, 3, 0, &lam(1, 3))?,
        build_example_pair(ExampleFamily::III, 4, 1, &lam(1, 4))?,
    ])
}

fn motzkin_oracle(m: usize) -> u64 {
    let mut v: Vec<u64> = vec![1, 1];
    for j in 2..=m {
        let s: u64 = (0..=j - 2).map(|i| v[i] * v[j - 2 - i]).sum();
        v.push(v[j - 1] + s);
    }
    v[m]
}

fn c1_basis(limits: &Limits) -> Result<(bool, String)> {
    let mut counts = Vec::new();
    for k in 1..=5 {
        counts.push(enumerate_basis(k, limits)?.len() as u64);
    }
    let oracle: Vec<u64> = (1..=5).map(|k| motzkin_oracle(2 * k)).collect();
    let library: Vec<u64> = (1..=5).map(|k| motzkin_number(2 * k).try_into().unwrap_or(0)).collect();
    let ok = counts == oracle && library == oracle && counts == [2, 9, 51, 323, 2188];
    Ok((ok, format!("counts {counts:?}, recurrence {oracle:?}")))
}

fn c2_presentation() -> Result<(bool, String)> {
    let mut ok = true;
    let mut total = 0;
    for l in [lam(1, 3), lam(1, 4)] {
        for k in 2..=4 {
            let r = check_presentation(k, &l)?;
            total += r.checks.len();
            ok &= r.all_pass();
        }
    }
    Ok((ok, format!("{total} relation instances, exact")))
}

fn p_oracle(m: usize, x: &Scalar) -> Scalar {
    let (mut prev, mut cur) = (Scalar::one(), Scalar::one());
    for _ in 1..m {
        let next = &cur - x * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn c3_jw() -> Result<(bool, String)> {
    let l = lam(1, 4);
    let mut cache = JwCache::new(l.clone());
    let mut ok = true;
    let mut terms = Vec::new();
    let delta = l.delta();
    let y = &delta - Scalar::one();
    let x = (&y * &y).recip();
    for k in 1..=5 {
        let r = jw_report(&mut cache, k)?;
        ok &= r.all_pass();
        terms.push(r.terms);
        let oracle = &y * p_oracle(k, &x) / (&delta * p_oracle(k - 1, &x));
        ok &= expectation_coefficient(k, &l)? == oracle;
        let g = cache.get(k)?.clone();
        let e = g.conditional_expectation()?;
        ok &= e == cache.get(k - 1)?.scale(&oracle);
    }
    Ok((ok, format!("terms per g_k {terms:?}")))
}

fn c4_dims(limits: &Limits) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for (p, expect) in example_pairs()?.iter().zip([[1, 2, 3, 4, 5], [1, 3, 8, 21, 55]]) {
        let data = SubproductData::build(p, 4, limits)?;
        let ranks: Vec<usize> = data.levels().iter().map(|l| l.rank).collect();
        let gap = data.levels()[1..].iter().map(|l| l.gap).fold(f64::INFINITY, f64::min);
        ok &= ranks == expect && data.dims() == expect && gap >= MIN_GAP;
        detail.push(format!("n={}: ranks {ranks:?}, min gap {gap:.1e}", p.n()));
    }
    Ok((ok, detail.join("; ")))
}

fn c5_relations(limits: &Limits) -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in example_pairs()? {
        let r = relation_residuals(&p, 3, 1e-10, limits)?;
        ok &= r.all_pass();
        count += r.items.len();
        worst = worst.max(r.max_residual());
    }
    Ok((ok, format!("{count} instances, max Frobenius residual {worst:.3e}")))
}

fn c6_faithful(limits: &Limits) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in example_pairs()? {
        for (k, want) in [(2, 9), (3, 51)] {
            let r = span_dimension(&p, k, 8, limits)?;
            ok &= r.dimension == want && r.status == SpanStatus::Converged && r.rounds <= 8;
            detail.push(format!("n={} k={k}: {} in {} rounds", p.n(), r.dimension, r.rounds));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn c7_toeplitz(limits: &Limits) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in example_pairs()? {
        let ops = creation_operators(SubproductData::build(&p, 5, limits)?)?;
        let r = toeplitz_residuals(&ops, 1e-9);
        let ideal = ideal_generator(&ops)?;
        let row_sums = r.items.iter().filter(|c| c.name.starts_with("row sum")).count();
        ok &= r.all_pass() && row_sums == 5 && ideal.orthogonality < 1e-10;
        detail.push(format!(
            "n={}: {} checks, max {:.3e}, generator ⟂ H_2 {:.1e}",
            p.n(),
            r.items.iter().filter(|c| c.asserted).count(),
            r.max_residual(),
            ideal.orthogonality
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn c8_matrix_units(limits: &Limits) -> Result<(bool, String)> {
    let p = &example_pairs()?[1];
    let ops = creation_operators(SubproductData::build(p, 4, limits)?)?;
    let dims: Vec<usize> = (0..=3).map(|k| matrix_unit_dimension(&ops, k, limits)).collect::<Result<_>>()?;
    let expect: Vec<usize> = ops.data().dims()[..4].iter().map(|d| d * d).collect();
    Ok((dims == expect && dims == [1, 9, 64, 441], format!("{dims:?}")))
}

fn c9_phi() -> Result<(bool, String)> {
    let third = lam(1, 3);
    let mut ok = (0..=30).all(|m| phi(m, &third).ok() == Some(ratio(3 * m as i64, m as i64 + 1)));
    let quarter = lam(1, 4);
    let q = q_parameter(&quarter);
    let inf = phi_infinity(&quarter);
    let p30 = to_f64(&phi(30, &quarter)?);
    ok &= (p30 - inf).abs() < 1e-3;
    ok &= (inf - 4.0 * q).abs() < 1e-12 && (0.25 * inf - q).abs() < 1e-12;
    ok &= (q + 1.0 / q - 3.0).abs() < 1e-12;
    for l in [third, quarter] {
        for m in 1..=20 {
            ok &= phi_p_ratio(m, &l)? == phi_q_ratio(m, &l)?;
        }
    }
    Ok((ok, format!("|φ(30) − φ_∞| = {:.3e}, φ_∞ = {inf:.12}, 4q = {:.12}", (p30 - inf).abs(), 4.0 * q)))
}

fn c10_reverse(limits: &Limits) -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for p in example_pairs()? {
        let ops = creation_operators(SubproductData::build(&p, 5, limits)?)?;
        for k in 2..=4 {
            let r = reverse_identity(&ops, k)?;
            ok &= r.residual < 1e-10 && r.closed_form_residual < 1e-10;
            worst = worst.max(r.residual).max(r.closed_form_residual);
            if p.n() == 3 && k == 2 {
                ok &= r.coefficient == ratio(1, 2);
            }
            // 1 − λ − λ²φ(k−1) from the λ = 1/3 closed form (k+1)/(3k)
            if p.n() == 3 {
                ok &= r.coefficient == ratio(k as i64 + 1, 3 * k as i64);
            }
        }
    }
    Ok((ok, format!("max residual {worst:.3e}")))
}

fn c11_cuntz_pimsner(limits: &Limits) -> Result<(bool, String)> {
    let [centred, r1] = example_pairs()?;
    let ops = creation_operators(SubproductData::build(&r1, 6, limits)?)?;
    let rows: Vec<_> = (1..=4).map(|m| cuntz_pimsner_residual(&ops, m)).collect::<Result<_>>()?;
    let mut ok = rows.windows(2).all(|w| w[1].residual < w[0].residual);
    let ops3 = creation_operators(SubproductData::build(&centred, 6, limits)?)?;
    let mut factors = Vec::new();
    for m in 1..=4 {
        let row = cuntz_pimsner_residual(&ops3, m)?;
        let exact = int(3) - phi(m, centred.lambda())?;
        ok &= exact == ratio(3, m as i64 + 1) && (row.defect - 3.0 / (m as f64 + 1.0)).abs() < 1e-12;
        ok &= row.factor.is_finite();
        factors.push(format!("{:.3}", row.factor));
    }
    let res: Vec<String> = rows.iter().map(|r| format!("{:.3e}", r.residual)).collect();
    Ok((ok, format!("λ=1/4 residuals {res:?}; λ=1/3 factors {factors:?}")))
}

fn c12_parser() -> Result<(bool, String)> {
    let mut ok = true;
    let mut n = 0;
    for line in CORPUS.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, src) = line.split_once('|').expect("corpus lines are `k | expr`");
        let k: usize = k.trim().parse().expect("corpus width");
        let e = parse_expression(src.trim(), k)?;
        let printed = e.to_string();
        ok &= parse_expression(&printed, k)? == e && parse_expression(&printed, k)?.to_string() == printed;
        n += 1;
    }
    ok &= n == 50;
    let mut ev = AbstractEvaluator::new(2, lam(1, 4), Limits::default());
    let zero = ev.eval(&parse_expression("t1*t1 - t1", 2)?)?;
    ok &= zero.is_zero();
    let mut r = Report::new("determinism");
    r.set("x", crate::format::num(1.0 / 3.0));
    ok &= r.render(OutputFormat::Json)? == r.clone().render(OutputFormat::Json)?;
    Ok((ok, format!("{n} corpus expressions round-trip; t1*t1 - t1 = 0 exactly")))
}

pub const TITLES: [&str; 12] = [
    "basis counts",
    "presentation relations",
    "Jones-Wenzl properties",
    "subproduct dimensions",
    "representation relations",
    "faithfulness",
    "Toeplitz relations",
    "matrix units",
    "phi identities",
    "reverse identity",
    "Cuntz-Pimsner asymptotics",
    "parser and determinism",
];

/// Runs one criterion; errors count as failures with the error as detail.
pub fn run(id: u8, limits: &Limits) -> Criterion {
    let start = Instant::now();
    let out = match id {
        1 => c1_basis(limits),
        2 => c2_presentation(),
        3 => c3_jw(),
        4 => c4_dims(limits),
        5 => c5_relations(limits),
        6 => c6_faithful(limits),
        7 => c7_toeplitz(limits),
        8 => c8_matrix_units(limits),
        9 => c9_phi(),
        10 => c10_reverse(limits),
        11 => c11_cuntz_pimsner(limits),
        12 => c12_parser(),
        _ => panic!("criteria are numbered 1 to 12"),
    };
    let (pass, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
    Criterion { id, title: TITLES[id as usize - 1], pass, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(limits: &Limits) -> Vec<Criterion> {
    (1..=12).map(|id| run(id, limits)).collect()
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}  ({:.2}s) {}",
            self.id,
            self.title,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

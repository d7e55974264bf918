//! Command-line driver.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for usage, parse, parameter and resource errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use motzkin_core::check::Checks;
use motzkin_core::fock::{
    creation_operators, cuntz_pimsner_residual, ideal_generator, matrix_unit_dimension, reverse_identity,
    toeplitz_residuals, SubproductData,
};
use motzkin_core::jones_wenzl::{jw_report, qk_element, uniqueness_probe, JwCache};
use motzkin_core::linalg::{frobenius, operator_norm};
use motzkin_core::presentation::check_presentation;
use motzkin_core::qpoly::dim_subproduct;
use motzkin_core::representation::{
    build_example_pair, intertwining_residuals, relation_residuals, span_dimension, validate_pair, ExampleFamily,
    MotzkinPair, SpanStatus,
};
use motzkin_core::scalar::format_scalar;
use motzkin_core::{enumerate_basis, motzkin_number, Error, Lambda, Limits};
use serde_json::{Map, Value};

use crate::expr::{is_exact_zero, parse_expression, AbstractEvaluator, RepEvaluator};
use crate::format::{complex, num, OutputFormat, PairSpec, Report, Table};
use crate::suite;

#[derive(Debug, Parser)]
#[command(name = "motzkin", version, about = "Motzkin algebras, their representations and subproduct systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Loop parameter λ as `p/q`.
    #[arg(long, global = true, default_value = "1/4")]
    pub lambda: String,
    /// Dimension of the single-particle space.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Support parameter of the example pair.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Example family: i, ii or iii.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Pair-spec JSON file; overrides --n/--r/--family/--lambda.
    #[arg(long, global = true)]
    pub pair: Option<PathBuf>,
    /// Width, or number of Fock levels.
    #[arg(long, alias = "levels", global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// dim H_k for k = 0..=kmax.
    Dims {
        #[arg(long, default_value_t = 5)]
        kmax: usize,
    },
    /// Enumerate the diagram basis of M_k.
    Basis,
    /// Check the defining relations exactly.
    Presentation,
    /// Compute and verify the Jones–Wenzl projections up to width k.
    Jw,
    #[command(subcommand)]
    Pair(PairCommand),
    #[command(subcommand)]
    Rep(RepCommand),
    #[command(subcommand)]
    Fock(FockCommand),
    /// Evaluate an expression at width k.
    Eval {
        expr: String,
        #[arg(long, value_enum, default_value_t = Mode::Abstract)]
        mode: Mode,
        /// Fail unless the value is zero.
        #[arg(long)]
        assert_zero: bool,
    },
    /// Run the full acceptance suite.
    CheckAll,
}

#[derive(Debug, Subcommand)]
pub enum PairCommand {
    Validate,
    Make,
}

#[derive(Debug, Subcommand)]
pub enum RepCommand {
    /// Relation and intertwining residuals at width k.
    Check,
    /// Dimension of the image of M_k.
    Faithful {
        #[arg(long, default_value_t = 8)]
        rounds: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum FockCommand {
    Build,
    Toeplitz,
    MatrixUnits,
    Reverse,
    Ideal,
    CpAsymptotics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Abstract,
    Rep,
    /// Both modes, checking that abstract zeros map to numeric zeros.
    Both,
}

fn limits() -> Limits {
    let mut l = Limits::default();
    if let Some(v) = std::env::var("MOTZKIN_MAX_DIM").ok().and_then(|s| s.parse().ok()) {
        l.max_dim = v;
    }
    l
}

impl Common {
    fn lambda(&self) -> Result<Lambda, Error> {
        self.lambda.parse()
    }

    fn k(&self, what: &str) -> Result<usize, Error> {
        self.k.ok_or_else(|| Error::Parameter(format!("--k is required for {what}")))
    }

    fn pair(&self) -> Result<MotzkinPair, Error> {
        if let Some(path) = &self.pair {
            return PairSpec::read(path)?.to_pair();
        }
        let n = self.n.ok_or_else(|| Error::Parameter("--n or --pair is required".into()))?;
        let lambda = self.lambda()?;
        let family = match &self.family {
            Some(f) => f.parse()?,
            None if self.r.unwrap_or(0) > 0 => ExampleFamily::III,
            None if n % 2 == 1 => ExampleFamily::I,
            None => ExampleFamily::II,
        };
        build_example_pair(family, n, self.r.unwrap_or(1), &lambda)
    }
}

fn pair_fields(r: &mut Report, p: &MotzkinPair) {
    r.set("n", p.n() as u64);
    r.set("lambda", p.lambda().to_string());
}

fn checks_from(items: impl IntoIterator<Item = (String, Option<usize>, bool)>) -> Checks {
    let mut c = Checks::new();
    for (name, level, ok) in items {
        c.flag(name, level, ok);
    }
    c
}

fn row(cells: impl IntoIterator<Item = String>) -> Vec<String> {
    cells.into_iter().collect()
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn dims(c: &Common, kmax: usize) -> Result<Report, Error> {
    let n = c.n.ok_or_else(|| Error::Parameter("--n is required".into()))?;
    let mut r = Report::new("dims");
    let d: Vec<u64> = (0..=kmax).map(|k| dim_subproduct(n, k)).collect::<Result<_, _>>()?;
    r.set("n", n as u64);
    r.set("dims", d.clone());
    r.table = Some(Table { header: vec![], rows: vec![d.iter().map(u64::to_string).collect()] });
    Ok(r)
}

fn basis(c: &Common, l: &Limits) -> Result<Report, Error> {
    let k = c.k("basis")?;
    let b = enumerate_basis(k, l)?;
    let mut r = Report::new("basis");
    r.set("k", k as u64);
    r.set("count", b.len() as u64);
    let expected = motzkin_number(2 * k);
    r.set("motzkin_number", expected.to_string());
    r.add_checks(checks_from([("count = M_2k".to_string(), Some(k), expected == b.len().into())]));
    r.table = Some(Table {
        header: header(&["index", "pairing", "through_strands", "temperley_lieb"]),
        rows: b
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let p: Vec<String> = d.pairing().iter().map(i32::to_string).collect();
                row([i.to_string(), p.join(" "), d.through_strands().to_string(), d.is_temperley_lieb().to_string()])
            })
            .collect(),
    });
    Ok(r)
}

fn presentation(c: &Common) -> Result<Report, Error> {
    let k = c.k("presentation")?;
    let rep = check_presentation(k, &c.lambda()?)?;
    let mut r = Report::new("presentation");
    r.set("k", k as u64);
    r.set("lambda", rep.lambda.to_string());
    r.set("vacuous", rep.vacuous().iter().map(|&x| x as u64).collect::<Vec<_>>());
    r.add_checks(checks_from(rep.checks.iter().map(|ch| {
        let idx: Vec<String> = ch.indices.iter().map(usize::to_string).collect();
        (format!("relation {} [{}]", ch.relation, idx.join(",")), Some(k), ch.pass)
    })));
    r.table = Some(Table {
        header: header(&["relation", "indices", "pass", "difference_terms"]),
        rows: rep
            .checks
            .iter()
            .map(|ch| {
                let idx: Vec<String> = ch.indices.iter().map(usize::to_string).collect();
                row([ch.relation.to_string(), idx.join(" "), ch.pass.to_string(), ch.difference_terms.to_string()])
            })
            .collect(),
    });
    Ok(r)
}

fn jw(c: &Common, l: &Limits) -> Result<Report, Error> {
    let k = c.k("jw")?;
    let mut cache = JwCache::with_limits(c.lambda()?, *l);
    let mut r = Report::new("jw");
    r.set("k", k as u64);
    let mut terms = Vec::new();
    let mut checks = Checks::new();
    for j in 1..=k {
        let rep = jw_report(&mut cache, j)?;
        terms.push(rep.terms as u64);
        for ch in &rep.checks {
            if ch.asserted {
                checks.flag(ch.name.clone(), Some(j), ch.pass);
            } else {
                checks.info(ch.name.clone(), Some(j), if ch.pass { 0.0 } else { 1.0 });
            }
        }
        if j < k {
            for (name, ok) in qk_element(&mut cache, j)?.checks(l)? {
                checks.flag(format!("q_k: {name}"), Some(j), ok);
            }
        }
        if j <= 3 {
            checks.flag("uniqueness", Some(j), uniqueness_probe(&mut cache, j)?.unique());
        }
    }
    r.set("terms", terms);
    r.add_checks(checks);
    Ok(r)
}

fn pair_cmd(c: &Common, cmd: &PairCommand) -> Result<(Report, Option<String>), Error> {
    let p = c.pair()?;
    let mut r = Report::new(match cmd {
        PairCommand::Validate => "pair validate",
        PairCommand::Make => "pair make",
    });
    pair_fields(&mut r, &p);
    r.set("a", p.a().iter().copied().map(complex).collect::<Vec<_>>());
    r.set("b", p.b().iter().copied().map(complex).collect::<Vec<_>>());
    r.add_checks(validate_pair(&p));
    let spec = matches!(cmd, PairCommand::Make).then(|| PairSpec::from_pair(&p).to_json());
    Ok((r, spec))
}

fn rep(c: &Common, cmd: &RepCommand, l: &Limits) -> Result<Report, Error> {
    let p = c.pair()?;
    let k = c.k("rep")?;
    match cmd {
        RepCommand::Check => {
            let tol = c.tol.unwrap_or(1e-10);
            let mut r = Report::new("rep check");
            pair_fields(&mut r, &p);
            r.set("k", k as u64);
            r.add_checks(validate_pair(&p));
            r.add_checks(relation_residuals(&p, k, tol, l)?);
            let (inter, skipped) = intertwining_residuals(&p, k, tol, l)?;
            r.set("intertwining_skipped", skipped as u64);
            r.add_checks(inter);
            Ok(r)
        }
        RepCommand::Faithful { rounds } => {
            let s = span_dimension(&p, k, *rounds, l)?;
            let expected = motzkin_number(2 * k);
            let mut r = Report::new("rep faithful");
            pair_fields(&mut r, &p);
            r.set("k", k as u64);
            r.set("dimension", s.dimension as u64);
            r.set("rounds", s.rounds as u64);
            r.set("converged", s.status == SpanStatus::Converged);
            r.set("motzkin_number", expected.to_string());
            r.add_checks(checks_from([
                ("span = M_2k".to_string(), Some(k), expected == s.dimension.into()),
                ("converged".to_string(), Some(k), s.status == SpanStatus::Converged),
            ]));
            Ok(r)
        }
    }
}

fn fock(c: &Common, cmd: &FockCommand, l: &Limits) -> Result<Report, Error> {
    let p = c.pair()?;
    let levels = c.k.unwrap_or(5);
    let data = SubproductData::build(&p, levels, l)?;
    let mut r = Report::new(format!("fock {}", cmd_name(cmd)));
    pair_fields(&mut r, &p);
    r.set("levels", levels as u64);
    r.set("dims", data.dims().iter().map(|&d| d as u64).collect::<Vec<_>>());
    match cmd {
        FockCommand::Build => {
            r.add_checks(data.checks(l)?);
            r.table = Some(Table {
                header: header(&["k", "dim", "expected", "rank", "gap", "rounding", "max_eigen_offset"]),
                rows: data
                    .levels()
                    .iter()
                    .map(|lv| {
                        row([
                            lv.k.to_string(),
                            lv.dim.to_string(),
                            lv.expected.to_string(),
                            lv.rank.to_string(),
                            format!("{:.12e}", lv.gap),
                            format!("{:.12e}", lv.rounding),
                            format!("{:.12e}", lv.max_eigen_offset),
                        ])
                    })
                    .collect(),
            });
        }
        FockCommand::Toeplitz => {
            let ops = creation_operators(data)?;
            r.set("labels", ops.labeling().labels.len() as u64);
            r.add_checks(toeplitz_residuals(&ops, c.tol.unwrap_or(1e-9)));
        }
        FockCommand::MatrixUnits => {
            let ops = creation_operators(data)?;
            let mut checks = Checks::new();
            let mut found = Vec::new();
            for k in 0..levels.saturating_sub(1) {
                let d = matrix_unit_dimension(&ops, k, l)?;
                let want = ops.data().dims()[k].pow(2);
                found.push(d as u64);
                checks.flag("dim = (dim H_k)^2", Some(k), d == want);
            }
            r.set("matrix_unit_dimensions", found);
            r.add_checks(checks);
        }
        FockCommand::Reverse => {
            let ops = creation_operators(data)?;
            let tol = c.tol.unwrap_or(1e-10);
            let mut checks = Checks::new();
            let mut rows = Vec::new();
            for k in 2..levels {
                let rv = reverse_identity(&ops, k)?;
                checks.residual("reverse identity", Some(k), rv.residual, tol);
                checks.residual("closed form", Some(k), rv.closed_form_residual, tol);
                rows.push(row([k.to_string(), format_scalar(&rv.coefficient), format!("{:.12e}", rv.closed_form)]));
            }
            r.add_checks(checks);
            r.table = Some(Table { header: header(&["k", "coefficient", "closed_form"]), rows });
        }
        FockCommand::Ideal => {
            let ops = creation_operators(data)?;
            let tol = c.tol.unwrap_or(1e-10);
            let g = ideal_generator(&ops)?;
            let mut checks = Checks::new();
            checks.residual("orthogonal to H_2", Some(2), g.orthogonality, tol);
            checks.residual("parallel to (I-P)^2 v_A", Some(2), g.parallel_residual, tol);
            checks.residual("complement of H_2", Some(2), g.complement_residual, tol);
            r.set("scale", complex(g.scale));
            r.set("complement_dim", g.complement_dim as u64);
            r.set(
                "coefficients",
                g.coefficients
                    .iter()
                    .map(|&(x, y, z)| Value::Array(vec![Value::from(x as u64), Value::from(y as u64), complex(z)]))
                    .collect::<Vec<_>>(),
            );
            r.add_checks(checks);
        }
        FockCommand::CpAsymptotics => {
            let ops = creation_operators(data)?;
            let rows: Vec<_> =
                (1..levels.saturating_sub(1)).map(|m| cuntz_pimsner_residual(&ops, m)).collect::<Result<_, _>>()?;
            let mut checks = Checks::new();
            for w in rows.windows(2) {
                checks.flag("residual decreases", Some(w[1].m), w[1].residual < w[0].residual);
            }
            r.add_checks(checks);
            r.set("phi_infinity", num(ops.data().phi().limit()));
            r.table = Some(Table {
                header: header(&["m", "residual", "phi_m", "defect", "constant", "factor"]),
                rows: rows
                    .iter()
                    .map(|x| {
                        row([
                            x.m.to_string(),
                            format!("{:.12e}", x.residual),
                            format!("{:.12e}", x.phi_m),
                            format!("{:.12e}", x.defect),
                            format!("{:.12e}", x.constant),
                            format!("{:.12e}", x.factor),
                        ])
                    })
                    .collect(),
            });
        }
    }
    Ok(r)
}

fn cmd_name(cmd: &FockCommand) -> &'static str {
    match cmd {
        FockCommand::Build => "build",
        FockCommand::Toeplitz => "toeplitz",
        FockCommand::MatrixUnits => "matrix-units",
        FockCommand::Reverse => "reverse",
        FockCommand::Ideal => "ideal",
        FockCommand::CpAsymptotics => "cp-asymptotics",
    }
}

fn eval(c: &Common, src: &str, mode: Mode, assert_zero: bool, l: &Limits) -> Result<Report, Error> {
    let k = c.k("eval")?;
    let e = parse_expression(src, k)?;
    let tol = c.tol.unwrap_or(1e-10);
    let mut r = Report::new("eval");
    r.set("k", k as u64);
    r.set("expression", e.to_string());
    let mut checks = Checks::new();
    let mut abstract_zero = None;
    if matches!(mode, Mode::Abstract | Mode::Both) {
        let x = AbstractEvaluator::new(k, c.lambda()?, *l).eval(&e)?;
        let zero = is_exact_zero(&x);
        abstract_zero = Some(zero);
        r.set("lambda", x.lambda().to_string());
        r.set("width", x.width() as u64);
        r.set("zero", zero);
        let terms: Vec<Value> = x
            .terms()
            .map(|(d, s)| {
                let mut m = Map::new();
                m.insert("pairing".into(), Value::from(d.pairing().iter().map(|&v| v as i64).collect::<Vec<_>>()));
                m.insert("coefficient".into(), Value::String(format_scalar(s)));
                Value::Object(m)
            })
            .collect();
        r.set("terms", terms);
        r.table = Some(Table {
            header: header(&["pairing", "coefficient"]),
            rows: x
                .terms()
                .map(|(d, s)| {
                    let p: Vec<String> = d.pairing().iter().map(i32::to_string).collect();
                    row([p.join(" "), format_scalar(s)])
                })
                .collect(),
        });
        if assert_zero {
            checks.flag("exact zero", Some(x.width()), zero);
        }
    }
    if matches!(mode, Mode::Rep | Mode::Both) {
        let p = c.pair()?;
        let (w, m) = RepEvaluator::new(k, &p, *l).eval(&e)?;
        let f = frobenius(&m);
        pair_fields(&mut r, &p);
        r.set("rep_width", w as u64);
        r.set("frobenius", num(f));
        r.set("operator_norm", num(operator_norm(&m)));
        if (assert_zero && mode == Mode::Rep) || abstract_zero == Some(true) {
            checks.residual("representation residual", Some(w), f, tol);
        }
    }
    r.add_checks(checks);
    Ok(r)
}

fn check_all(l: &Limits) -> Report {
    let results = suite::run_all(l);
    let mut r = Report::new("check-all");
    for c in &results {
        eprintln!("{}", c.line());
    }
    r.add_checks(checks_from(results.iter().map(|c| (format!("criterion {}: {}", c.id, c.title), None, c.pass))));
    r.table = Some(Table {
        header: header(&["criterion", "title", "pass", "seconds", "detail"]),
        rows: results
            .iter()
            .map(|c| {
                row([
                    c.id.to_string(),
                    c.title.to_string(),
                    c.pass.to_string(),
                    format!("{:.3}", c.seconds),
                    c.detail.clone(),
                ])
            })
            .collect(),
    });
    r
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Consistency(_) | Error::Structural(_) => 1,
        _ => 2,
    }
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    let l = limits();
    let c = &cli.common;
    let mut format = c.format.unwrap_or(OutputFormat::Json);
    let report = match &cli.command {
        Command::Dims { kmax } => {
            format = c.format.unwrap_or(OutputFormat::Csv);
            dims(c, *kmax)?
        }
        Command::Basis => basis(c, &l)?,
        Command::Presentation => presentation(c)?,
        Command::Jw => jw(c, &l)?,
        Command::Pair(cmd) => {
            let (r, spec) = pair_cmd(c, cmd)?;
            if let Some(spec) = spec {
                // `pair make` writes the spec itself; the report goes to stderr.
                match &c.out {
                    Some(path) => {
                        std::fs::write(path, spec).map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))?
                    }
                    None => print!("{spec}"),
                }
                eprint!("{}", r.render(format)?);
                return Ok(if r.pass { 0 } else { 1 });
            }
            r
        }
        Command::Rep(cmd) => rep(c, cmd, &l)?,
        Command::Fock(cmd) => fock(c, cmd, &l)?,
        Command::Eval { expr, mode, assert_zero } => eval(c, expr, *mode, *assert_zero, &l)?,
        Command::CheckAll => check_all(&l),
    };
    report.emit(format, c.out.as_deref())?;
    if !report.pass {
        for f in report.checks.failures() {
            eprintln!("FAIL {} (level {:?}): residual {:.3e}, tol {:.1e}", f.name, f.level, f.residual, f.tol);
        }
    }
    Ok(if report.pass { 0 } else { 1 })
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

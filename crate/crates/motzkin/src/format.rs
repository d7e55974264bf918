//! Report emission and the pair-spec file format.
//!
//! JSON output is deterministic: object keys are sorted and every float is
//! written as `{:.12e}`.

use std::io::Write;
use std::path::Path;

use motzkin_core::check::Checks;
use motzkin_core::linalg::C64;
use motzkin_core::representation::MotzkinPair;
use motzkin_core::{Error, Lambda};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

/// A float as a JSON number with twelve fractional digits in the mantissa;
/// non-finite values become strings.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    let text = format!("{x:.12e}");
    Value::Number(serde_json::from_str::<Number>(&text).expect("formatted float is valid JSON"))
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn checks_json(checks: &Checks) -> Value {
    Value::Array(
        checks
            .items
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(c.name.clone()));
                m.insert("level".into(), c.level.map_or(Value::Null, |l| Value::from(l as u64)));
                m.insert("residual".into(), num(c.residual));
                m.insert("tol".into(), num(c.tol));
                m.insert("pass".into(), Value::Bool(c.pass));
                m.insert("asserted".into(), Value::Bool(c.asserted));
                Value::Object(m)
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    /// Empty for a bare value line.
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Outcome of one command.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub fields: Map<String, Value>,
    pub checks: Checks,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), pass: true, ..Default::default() }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.into(), value.into());
    }

    pub fn add_checks(&mut self, checks: Checks) {
        self.pass &= checks.all_pass();
        self.checks.extend(checks);
    }

    pub fn fail_unless(&mut self, ok: bool) {
        self.pass &= ok;
    }

    pub fn to_json(&self) -> Value {
        let mut m = self.fields.clone();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("pass".into(), Value::Bool(self.pass));
        if !self.checks.items.is_empty() {
            m.insert("checks".into(), checks_json(&self.checks));
            m.insert("max_residual".into(), num(self.checks.max_residual()));
        }
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    if t.header.is_empty() {
                        Value::Array(r.iter().cloned().map(Value::String).collect())
                    } else {
                        Value::Object(t.header.iter().cloned().zip(r.iter().cloned().map(Value::String)).collect())
                    }
                })
                .collect();
            m.insert("table".into(), Value::Array(rows));
        }
        Value::Object(m)
    }

    /// The table when present, otherwise one row per check.
    pub fn to_csv(&self) -> Result<String, Error> {
        let table = match &self.table {
            Some(t) => t.clone(),
            None => Table {
                header: ["name", "level", "residual", "tol", "pass", "asserted"].map(String::from).to_vec(),
                rows: self
                    .checks
                    .items
                    .iter()
                    .map(|c| {
                        vec![
                            c.name.clone(),
                            c.level.map(|l| l.to_string()).unwrap_or_default(),
                            format!("{:.12e}", c.residual),
                            format!("{:.12e}", c.tol),
                            c.pass.to_string(),
                            c.asserted.to_string(),
                        ]
                    })
                    .collect(),
            },
        };
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Structural(format!("csv: {e}"));
        if !table.header.is_empty() {
            w.write_record(&table.header).map_err(io)?;
        }
        for r in &table.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Structural(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, Error> {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serialises");
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes to `out`, or to stdout when `out` is `None`.
    pub fn emit(&self, format: OutputFormat, out: Option<&Path>) -> Result<(), Error> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Structural(format!("{}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).map_err(|e| Error::Structural(format!("stdout: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// `{"n": 4, "lambda": "1/4", "a": [[re, im], …], "b": [[re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub n: usize,
    pub lambda: String,
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
}

impl PairSpec {
    pub fn from_pair(p: &MotzkinPair) -> Self {
        let parts = |v: &[C64]| v.iter().map(|z| [z.re, z.im]).collect();
        PairSpec { n: p.n(), lambda: p.lambda().to_string(), a: parts(p.a()), b: parts(p.b()) }
    }

    pub fn to_pair(&self) -> Result<MotzkinPair, Error> {
        let lambda: Lambda = self.lambda.parse()?;
        let parts = |v: &[[f64; 2]]| v.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        MotzkinPair::new(self.n, lambda, parts(&self.a), parts(&self.b))
    }

    pub fn read(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Pair spec as JSON; floats keep full precision here so the pair can be
    /// read back exactly.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("pair spec serialises");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use motzkin_core::representation::{build_example_pair, ExampleFamily};

    #[test]
    fn floats_are_fixed_format() {
        assert_eq!(num(0.25).to_string(), "2.500000000000e-1");
        assert_eq!(num(1e-13).to_string(), "1.000000000000e-13");
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
    }

    #[test]
    fn pair_spec_round_trip() {
        let p = build_example_pair(ExampleFamily::III, 4, 1, &"1/4".parse().unwrap()).unwrap();
        let spec = PairSpec::from_pair(&p);
        let back: PairSpec = serde_json::from_str(&spec.to_json()).unwrap();
        assert_eq!(back.to_pair().unwrap(), p);
        assert!(serde_json::from_str::<PairSpec>(r#"{"n":2,"lambda":"1/4","a":[],"b":[],"x":1}"#).is_err());
    }

    #[test]
    fn report_is_sorted() {
        let mut r = Report::new("demo");
        r.set("zeta", 1);
        r.set("alpha", num(0.5));
        let s = r.render(OutputFormat::Json).unwrap();
        let a = s.find("alpha").unwrap();
        let z = s.find("zeta").unwrap();
        let c = s.find("command").unwrap();
        assert!(a < c && c < z);
    }
}

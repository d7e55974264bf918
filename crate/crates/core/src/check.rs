//! Residual bookkeeping shared by the numeric layers.

use alloc::string::String;
use alloc::vec::Vec;

/// One measured identity. Reports always carry the achieved residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Level or width the check refers to, when meaningful.
    pub level: Option<usize>,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// Informational checks never fail a report.
    pub asserted: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Checks {
    pub items: Vec<Check>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `residual < tol` as an asserted check.
    pub fn residual(&mut self, name: impl Into<String>, level: Option<usize>, residual: f64, tol: f64) {
        self.items.push(Check {
            name: name.into(),
            level,
            residual,
            tol,
            pass: residual.is_finite() && residual < tol,
            asserted: true,
        });
    }

    /// Records a value without asserting anything about it.
    pub fn info(&mut self, name: impl Into<String>, level: Option<usize>, value: f64) {
        self.items.push(Check {
            name: name.into(),
            level,
            residual: value,
            tol: f64::INFINITY,
            pass: true,
            asserted: false,
        });
    }

    /// Records a boolean outcome; the residual is 0 or 1.
    pub fn flag(&mut self, name: impl Into<String>, level: Option<usize>, ok: bool) {
        self.items.push(Check {
            name: name.into(),
            level,
            residual: if ok { 0.0 } else { 1.0 },
            tol: 0.5,
            pass: ok,
            asserted: true,
        });
    }

    pub fn extend(&mut self, other: Checks) {
        self.items.extend(other.items);
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|c| c.pass || !c.asserted)
    }

    /// Largest residual among asserted checks.
    pub fn max_residual(&self) -> f64 {
        self.items.iter().filter(|c| c.asserted).map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.items.iter().filter(|c| c.asserted && !c.pass)
    }
}

use std::collections::BTreeMap;

use serde::Serialize;

/// Statistical threshold multiplier used by every check.
pub const SIGMA: f64 = 3.0;

/// Column-oriented numeric table, one row per grid point.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Comparison of the two sides of an identity.
///
/// `tolerance = max(3·combined_error, analytic_tolerance)` where the
/// combined error is `sqrt(left_error² + right_error²)`; the check passes
/// iff `discrepancy ≤ tolerance` and it was not skipped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub left: f64,
    pub left_error: f64,
    pub right: f64,
    pub right_error: f64,
    pub discrepancy: f64,
    pub relative_discrepancy: f64,
    pub combined_error: f64,
    pub analytic_tolerance: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub skipped: bool,
    pub notes: Vec<String>,
    pub parameters: BTreeMap<String, f64>,
    pub table: Table,
}

impl IdentityReport {
    pub fn new(name: &str, left: (f64, f64), right: (f64, f64), analytic_tolerance: f64) -> Self {
        let mut r = Self {
            name: name.to_string(),
            left: left.0,
            left_error: left.1.abs(),
            right: right.0,
            right_error: right.1.abs(),
            discrepancy: 0.0,
            relative_discrepancy: 0.0,
            combined_error: 0.0,
            analytic_tolerance,
            tolerance: 0.0,
            pass: false,
            skipped: false,
            notes: Vec::new(),
            parameters: BTreeMap::new(),
            table: Table::default(),
        };
        r.evaluate();
        r
    }

    /// Overrides the discrepancy (for checks that aggregate over many
    /// points) and re-evaluates the verdict.
    pub fn with_discrepancy(mut self, discrepancy: f64, relative: f64) -> Self {
        self.evaluate();
        self.discrepancy = discrepancy;
        self.relative_discrepancy = relative;
        self.pass = !self.skipped && discrepancy <= self.tolerance;
        self
    }

    fn evaluate(&mut self) {
        self.discrepancy = (self.left - self.right).abs();
        let scale = self.left.abs().max(self.right.abs());
        self.relative_discrepancy = if scale > 0.0 { self.discrepancy / scale } else { 0.0 };
        self.combined_error = self.left_error.hypot(self.right_error);
        self.tolerance = (SIGMA * self.combined_error).max(self.analytic_tolerance);
        self.pass = !self.skipped && self.discrepancy <= self.tolerance;
    }

    pub fn skip(mut self, reason: &str) -> Self {
        self.skipped = true;
        self.pass = false;
        self.notes.push(reason.to_string());
        self
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

/// Monotonicity of a sampled functional.
///
/// `max_violation = max_j (F_j − F_{j+1})₊` for non-decreasing claims and
/// `max_j (F_{j+1} − F_j)₊` for non-increasing ones; passes iff
/// `max_violation ≤ tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub name: String,
    pub direction: Direction,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub max_violation: f64,
    pub violations: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: Vec<String>,
    pub parameters: BTreeMap<String, f64>,
}

impl MonotonicityReport {
    pub fn new(
        name: &str,
        direction: Direction,
        grid: Vec<f64>,
        values: Vec<f64>,
        errors: Vec<f64>,
        tolerance: f64,
    ) -> Self {
        let steps: Vec<f64> = values
            .windows(2)
            .map(|w| match direction {
                Direction::NonDecreasing => (w[0] - w[1]).max(0.0),
                Direction::NonIncreasing => (w[1] - w[0]).max(0.0),
            })
            .collect();
        let max_violation = steps.iter().cloned().fold(0.0, f64::max);
        let violations = steps.iter().filter(|&&s| s > tolerance).count();
        Self {
            name: name.to_string(),
            direction,
            grid,
            values,
            errors,
            max_violation,
            violations,
            tolerance,
            pass: max_violation <= tolerance,
            notes: Vec::new(),
            parameters: BTreeMap::new(),
        }
    }

    /// Tolerance of three times the largest per-point error.
    pub fn with_error_tolerance(
        name: &str,
        direction: Direction,
        grid: Vec<f64>,
        values: Vec<f64>,
        errors: Vec<f64>,
    ) -> Self {
        let tol = SIGMA * errors.iter().cloned().fold(0.0, f64::max);
        Self::new(name, direction, grid, values, errors, tol)
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["grid", "value", "error"]);
        for ((g, v), e) in self.grid.iter().zip(&self.values).zip(&self.errors) {
            t.push(vec![*g, *v, *e]);
        }
        t
    }
}

//! Verdict records shared by every check.

use alloc::string::String;
use alloc::vec::Vec;

/// Outcome of a monotonicity test of `rho -> m(B_rho) / rho^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub exponent_used: f64,
    pub grid: Vec<f64>,
    pub ratio_values: Vec<f64>,
    pub min_forward_increment: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Consecutive grid pair where the smallest forward increment occurs.
    pub witness: (f64, f64),
}

impl MonotonicityReport {
    pub(crate) fn from_ratios(exponent_used: f64, grid: Vec<f64>, ratio_values: Vec<f64>, tol: f64) -> Self {
        let scale = ratio_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut min_inc = f64::INFINITY;
        let mut witness = (grid[0], grid[0]);
        for i in 1..grid.len() {
            let inc = ratio_values[i] - ratio_values[i - 1];
            if inc < min_inc {
                min_inc = inc;
                witness = (grid[i - 1], grid[i]);
            }
        }
        if grid.len() == 1 {
            min_inc = 0.0;
        }
        let tolerance = tol * scale;
        Self {
            exponent_used,
            pass: min_inc >= -tolerance,
            grid,
            ratio_values,
            min_forward_increment: min_inc,
            tolerance,
            witness,
        }
    }
}

/// Uniform verdict for a single claim.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    /// Signed slack of the claim; negative means violated.
    pub margin: f64,
    /// Headline statistic of the check (empirical constant, slope, ...).
    pub value: f64,
    pub tolerance: f64,
    /// Coordinates of the worst case found.
    pub witness: Vec<f64>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, margin: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: margin >= -tolerance,
            margin,
            value: margin,
            tolerance,
            witness: Vec::new(),
        }
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = value;
        self
    }

    pub fn with_witness(mut self, witness: Vec<f64>) -> Self {
        self.witness = witness;
        self
    }
}

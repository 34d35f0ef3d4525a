//! Mixed-binary instance model.
//!
//! Instances are held in minimize form; maximize inputs are negated on load
//! and the flip is remembered so reported objective values can be restored.

use crate::config::Tolerances;
use crate::lp::{LpSolution, LpStatus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Constraint sense of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// One sparse constraint row `a·x (sense) rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    /// Sorted by column index, no duplicates, finite coefficients.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Immutable mixed-binary instance: minimize `objective·x` subject to `rows`,
/// bounds, and integrality of the variables in `integers`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MipInstance {
    pub name: String,
    pub var_names: Vec<String>,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Ordered set of integer variable indices; each must be binary.
    pub integers: Vec<usize>,
    /// The original objective was a maximization and has been negated.
    pub maximize_flipped: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MipError {
    #[error("malformed MPS at line {line}: {msg}")]
    MalformedMps { line: usize, msg: String },
    #[error("integer variable {name} has bounds [{lo}, {up}]; only binary integers are supported")]
    NotMixedBinary { name: String, lo: f64, up: f64 },
    #[error("instance has no variables")]
    EmptyInstance,
    #[error("root LP solution is not optimal (status {status:?})")]
    RootNotOptimal { status: LpStatus },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

impl MipInstance {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_cons(&self) -> usize {
        self.rows.len()
    }

    /// Validates the structural invariants; called by constructors and the
    /// MPS reader.
    pub fn validate(&self) -> Result<(), MipError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(MipError::EmptyInstance);
        }
        if self.var_names.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(MipError::Invalid("field lengths disagree".into()));
        }
        for row in &self.rows {
            let mut prev: Option<usize> = None;
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(MipError::Invalid(format!(
                        "row {} references column {j} out of range",
                        row.name
                    )));
                }
                if !a.is_finite() {
                    return Err(MipError::Invalid(format!(
                        "row {} has non-finite coefficient",
                        row.name
                    )));
                }
                if prev.is_some_and(|p| p >= j) {
                    return Err(MipError::Invalid(format!(
                        "row {} has unsorted or duplicate columns",
                        row.name
                    )));
                }
                prev = Some(j);
            }
            if !row.rhs.is_finite() {
                return Err(MipError::Invalid(format!("row {} has non-finite rhs", row.name)));
            }
        }
        let mut seen = vec![false; n];
        for &j in &self.integers {
            if j >= n {
                return Err(MipError::Invalid(format!("integer index {j} out of range")));
            }
            if seen[j] {
                return Err(MipError::Invalid(format!("integer index {j} repeated")));
            }
            seen[j] = true;
            if self.lower[j] != 0.0 || self.upper[j] != 1.0 {
                return Err(MipError::NotMixedBinary {
                    name: self.var_names[j].clone(),
                    lo: self.lower[j],
                    up: self.upper[j],
                });
            }
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(MipError::Invalid(format!(
                    "variable {} has lower bound above upper bound",
                    self.var_names[j]
                )));
            }
        }
        Ok(())
    }

    /// Objective value as the caller stated it: un-flips negated maximize
    /// objectives.
    pub fn reported_objective(&self, internal: f64) -> f64 {
        if self.maximize_flipped {
            -internal
        } else {
            internal
        }
    }

    /// True when `x` is integral on every integer variable.
    pub fn is_integral(&self, x: &[f64], tol: &Tolerances) -> bool {
        self.integers.iter().all(|&j| tol.is_integral(x[j]))
    }

    /// Integer variables with fractional value in `x`.
    pub fn fractional_integers(&self, x: &[f64], tol: &Tolerances) -> Vec<usize> {
        self.integers
            .iter()
            .copied()
            .filter(|&j| !tol.is_integral(x[j]))
            .collect()
    }
}

/// The LP relaxation, represented as the same instance with the integer set
/// cleared. The input is untouched.
pub fn lp_relaxation(inst: &MipInstance) -> MipInstance {
    let mut relaxed = inst.clone();
    relaxed.integers.clear();
    relaxed
}

/// Reduced action space: the integer variables fractional in the root LP.
#[derive(Clone, Debug)]
pub struct ActionSpace {
    /// Ascending variable indices with fractional root value.
    pub frac_vars: Vec<usize>,
    /// The cached root LP solution the set was derived from.
    pub root: LpSolution,
}

impl ActionSpace {
    /// Root value of variable `j`.
    pub fn root_value(&self, j: usize) -> f64 {
        self.root.x[j]
    }
}

/// Computes `I_frac`, the integer variables whose root-LP value has
/// fractional part strictly outside `tol` on both sides.
pub fn fractional_set(
    inst: &MipInstance,
    root: &LpSolution,
    tol: f64,
) -> Result<ActionSpace, MipError> {
    if root.status != LpStatus::Optimal {
        return Err(MipError::RootNotOptimal {
            status: root.status,
        });
    }
    let mut frac_vars: Vec<usize> = inst
        .integers
        .iter()
        .copied()
        .filter(|&j| Tolerances::int_distance(root.x[j]) > tol)
        .collect();
    frac_vars.sort_unstable();
    Ok(ActionSpace {
        frac_vars,
        root: root.clone(),
    })
}

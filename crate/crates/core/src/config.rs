//! Numeric tolerances and evaluation limits shared across the toolkit.

use serde::{Deserialize, Serialize};
use std::time::Duration;

/// All floating-point tolerances live here so every component agrees on what
/// "feasible" and "integral" mean.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Constraint and bound satisfaction tolerance.
    pub feasibility: f64,
    /// Reduced-cost threshold for simplex pricing.
    pub reduced_cost: f64,
    /// A value is integral when its fractional part is within this of 0 or 1.
    pub integrality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-7,
            reduced_cost: 1e-7,
            integrality: 1e-6,
        }
    }
}

impl Tolerances {
    /// Fractional part distance of `v` from the nearest integer.
    pub fn int_distance(v: f64) -> f64 {
        let f = v - v.floor();
        f.min(1.0 - f)
    }

    /// True when `v` is integral within the integrality tolerance.
    pub fn is_integral(&self, v: f64) -> bool {
        Self::int_distance(v) <= self.integrality
    }
}

/// Per-candidate evaluation budget for restricted branch-and-bound.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EvalLimits {
    /// Maximum number of processed tree nodes.
    pub max_nodes: u64,
    /// Wall-clock cap per evaluation; `None` disables the clock entirely,
    /// which also makes truncation deterministic.
    pub time_limit: Option<Duration>,
}

impl Default for EvalLimits {
    fn default() -> Self {
        Self {
            max_nodes: 50_000,
            time_limit: Some(Duration::from_secs(60)),
        }
    }
}

impl EvalLimits {
    pub fn with_nodes(max_nodes: u64) -> Self {
        Self {
            max_nodes,
            time_limit: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrality_distance() {
        assert!(Tolerances::int_distance(2.0) == 0.0);
        assert!((Tolerances::int_distance(0.75) - 0.25).abs() < 1e-15);
        let tol = Tolerances::default();
        assert!(tol.is_integral(1.0 - 1e-9));
        assert!(!tol.is_integral(0.5));
    }
}

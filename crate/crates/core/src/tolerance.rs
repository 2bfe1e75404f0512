use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every solver in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSet {
    /// Row-wise feasibility slack, scaled by `1 + ‖b‖∞`.
    pub feasibility: f64,
    /// Smallest pivot magnitude accepted by the simplex and Lemke tableaus.
    pub pivot: f64,
    /// Relative slack for a row to count as touching the feasible set.
    pub activity: f64,
    /// Absolute tolerance on the invariant residuals of equilibrium membership.
    pub equilibrium: f64,
    /// KKT stationarity tolerance, scaled by `1 + ‖q‖∞`.
    pub kkt: f64,
    /// Smallest-eigenvalue threshold for monotonicity verdicts.
    pub monotone: f64,
    /// Dantzig pivots without objective progress before switching to Bland's rule.
    pub stall_threshold: usize,
    pub max_iterations: usize,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        ToleranceSet {
            feasibility: 1e-8,
            pivot: 1e-10,
            activity: 1e-7,
            equilibrium: 1e-6,
            kkt: 1e-8,
            monotone: 1e-9,
            stall_threshold: 50,
            max_iterations: 50_000,
        }
    }
}

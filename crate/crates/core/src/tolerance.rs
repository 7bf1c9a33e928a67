use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every operation in the crate.
///
/// The built-in group families have exact `0`/`±1` matrix entries, so these
/// only need to absorb floating-point composition error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `‖UᵀU − I‖_∞` bound for group matrices, and for orthonormal bases.
    pub orth: f64,
    /// Orbit point deduplication, relative to `max(1, ‖x‖)`.
    pub dedup: f64,
    /// Stabilizer membership, relative to `‖z‖` (absolute at `z = 0`).
    pub stab: f64,
    /// Norm preservation `|‖U_g x‖ − ‖x‖|`, relative to `max(1, ‖x‖)`.
    pub norm: f64,
    /// Level-set ties, relative to `‖w_i‖·‖x‖`.
    pub tie: f64,
    /// Near-optimal aligners reported alongside the quotient distance.
    pub align: f64,
    /// Pairs closer than this in the quotient metric are skipped by ratio estimates.
    pub sep_floor: f64,
    /// Relative slack on the upper Lipschitz bound.
    pub ratio: f64,
    /// Relative rank cutoff for singular values.
    pub svd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orth: 1e-10,
            dedup: 1e-9,
            stab: 1e-9,
            norm: 1e-10,
            tie: 1e-9,
            align: 1e-9,
            sep_floor: 1e-6,
            ratio: 1e-8,
            svd: 1e-9,
        }
    }
}

//! Numerical tolerances and sampling schedules shared by every routine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances, grids and the seed. Every sampled quantity in the crate is a
/// deterministic function of a `ToleranceConfig` and its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Membership / deduplication length.
    pub tol_mem: f64,
    /// Angular tolerance in radians.
    pub tol_dir: f64,
    /// Candidate step sizes for the feasibility clause, strictly decreasing.
    pub p_grid: Vec<f64>,
    /// Radii of the sampled outer limit, strictly decreasing.
    pub radius_schedule: Vec<f64>,
    /// Brute-force lattice points per unit length in one dimension.
    pub grid_res_1d: usize,
    /// Brute-force lattice points per unit length per axis in two dimensions.
    pub grid_res_2d: usize,
    /// Relative threshold under which a block of a unit ray counts as zero.
    pub eps_zero: f64,
    pub seed: u64,
}

pub const DEFAULT_R0: f64 = 0.5;

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_mem: 1e-9,
            tol_dir: 0.035,
            p_grid: (0..=24).map(|k| 2f64.powi(-k)).collect(),
            radius_schedule: (4..=16).map(|k| DEFAULT_R0 * 2f64.powi(-k)).collect(),
            grid_res_1d: 400,
            grid_res_2d: 200,
            eps_zero: 1e-3,
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.tol_mem, self.tol_dir, self.eps_zero];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Input("tolerances must be strictly positive".into()));
        }
        if self.grid_res_1d == 0 || self.grid_res_2d == 0 {
            return Err(Error::Input("grid resolutions must be positive".into()));
        }
        for (name, grid) in [("p_grid", &self.p_grid), ("radius_schedule", &self.radius_schedule)] {
            if grid.is_empty() || grid.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Input(format!("{name} must be non-empty and positive")));
            }
            if grid.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::Input(format!("{name} must be strictly decreasing")));
            }
        }
        Ok(())
    }

    /// Smallest step of the feasibility grid. Feasibility and the proximal
    /// inequality are both downward closed in the step, so this value decides.
    pub fn p_min(&self) -> f64 {
        *self.p_grid.last().expect("validated p_grid")
    }

    /// Largest radius used for local sampling around a base point.
    pub fn r0(&self) -> f64 {
        self.radius_schedule[0] * 16.0
    }

    /// The `count` smallest radii of the schedule, largest first.
    pub fn smallest_radii(&self, count: usize) -> &[f64] {
        let n = self.radius_schedule.len();
        &self.radius_schedule[n.saturating_sub(count)..]
    }
}

//! Numerical tolerances and sampling densities shared by every module.
//!
//! All knobs live in one record so that a run can be reproduced from its
//! serialized configuration alone.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Reciprocal condition number below which a linear map is rejected.
    pub singular_rcond: f64,
    /// Maximum bisection steps in the ray/boundary root finder.
    pub bisection_steps: usize,
    /// Residual on the defining margin that ends bisection early.
    pub bisection_residual: f64,
    /// Uniform samples of the phase circle in `delta_dir`.
    pub theta_grid: usize,
    /// Final bracket width of the golden-section phase search.
    pub golden_width: f64,
    /// Default sampling bound for unbounded domains.
    pub clip_radius: f64,
    /// Distance to the boundary accepted as "on the boundary".
    pub boundary_tol: f64,
    /// Real directions sampled when searching for a closest boundary point.
    pub delta_directions: usize,
    /// Smallest angular step of the closest-point refinement.
    pub refine_min_step: f64,
    /// Relative gap under which two isolated closest points tie.
    pub degeneracy_gap: f64,
    /// Margin slack accepted by K_d membership reports.
    pub kd_margin: f64,
    /// Boundary samples per unit disk in K_d membership.
    pub kd_disk_samples: usize,
    /// Stopping tolerance of the plane-exclusion maximisation.
    pub kd_plane_tol: f64,
    /// Directions sampled per body for local Hausdorff distances.
    pub hausdorff_directions: usize,
    /// Boundary samples used to classify a complex-line slice.
    pub slice_samples: usize,
    /// Relative residual under which a slice is treated as a disk or half-plane.
    pub slice_fit_tol: f64,
    /// Absolute improvement that ends chain refinement.
    pub chain_improvement: f64,
    /// Maximum number of chain pieces.
    pub chain_max_pieces: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            singular_rcond: 1e-12,
            bisection_steps: 200,
            bisection_residual: 1e-12,
            theta_grid: 256,
            golden_width: 1e-10,
            clip_radius: 1e6,
            boundary_tol: 1e-8,
            delta_directions: 2048,
            refine_min_step: 1e-10,
            degeneracy_gap: 1e-9,
            kd_margin: 1e-6,
            kd_disk_samples: 64,
            kd_plane_tol: 1e-8,
            hausdorff_directions: 4096,
            slice_samples: 64,
            slice_fit_tol: 1e-9,
            chain_improvement: 1e-6,
            chain_max_pieces: 1 << 16,
        }
    }
}

/// Settings of the strong-pseudoconvexity verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerdictConfig {
    pub target: f64,
    /// Width of the acceptance band in units of the fit half-width.
    pub band_sigmas: f64,
    /// Fits wider than this are inconclusive.
    pub max_half_width: f64,
    /// Absolute floor of the acceptance band around the target.
    pub exponent_floor: f64,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        Self { target: 0.5, band_sigmas: 3.0, max_half_width: 0.05, exponent_floor: 0.02 }
    }
}

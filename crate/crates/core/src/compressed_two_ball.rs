//! Compressed two-ball energy 𝓔(a, σ) in the plane with R = 1, its flatness at a = 1,
//! the compression threshold and the disk buckling value.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PlateError, Result};
use crate::radial_solver::{RadialProblem, RadialSolution};
use crate::specfun::bessel_j1_first_zero;

/// Step of the one-sided difference used by [`energy_slope_at_one`].
pub const SLOPE_STEP: f64 = 1e-3;
/// Step of the central second differences used by [`convexity_profile`].
pub const CURVATURE_STEP: f64 = 5e-3;
/// Tolerance when deciding that the minimum over the a-grid sits at a = 1.
pub const ARGMIN_SLACK: f64 = 1e-10;
/// Number of sample points returned by [`convexity_profile`].
pub const CONVEXITY_POINTS: usize = 32;
pub const DEFAULT_A_GRID: usize = 256;
pub const DEFAULT_SIGMA_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressedEnergyPoint {
    pub a: f64,
    pub sigma: f64,
    pub energy: f64,
    pub epsilon: f64,
    pub delta: f64,
}

/// Ingredients of the ε-eliminated energy formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressedTerms {
    pub b: f64,
    pub integral_v: f64,
    pub integral_h: f64,
    pub boundary_term_a: f64,
    /// (a/b)²·∫_{∂B_b} Δh_b, absent at a = 1.
    pub boundary_term_b: Option<f64>,
}

impl CompressedTerms {
    pub fn denominator(&self) -> Option<f64> {
        self.boundary_term_b.map(|t| self.boundary_term_a + t)
    }
}

fn check_args(a: f64, sigma: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(PlateError::Domain(format!("a = {a} not in (0, 1]")));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(PlateError::Domain(format!(
            "sigma = {sigma} must be nonnegative"
        )));
    }
    Ok(())
}

/// Radial solves entering 𝓔(a, σ): v_a, h_a and h_b.
pub fn compressed_terms(a: f64, sigma: f64) -> Result<CompressedTerms> {
    check_args(a, sigma)?;
    let b = (1.0 - a * a).max(0.0).sqrt();
    let v_a = RadialSolution::solve(&RadialProblem::clamped(2, a, sigma)?)?;
    let h_a = RadialSolution::solve(&RadialProblem::unit_slope(2, a, sigma)?)?;
    let boundary_term_a = 2.0 * PI * a * h_a.boundary_laplacian();
    let boundary_term_b = if b > 0.0 {
        let h_b = RadialSolution::solve(&RadialProblem::unit_slope(2, b, sigma)?)?;
        Some((a / b).powi(2) * 2.0 * PI * b * h_b.boundary_laplacian())
    } else {
        None
    };
    Ok(CompressedTerms {
        b,
        integral_v: v_a.integral(),
        integral_h: h_a.integral(),
        boundary_term_a,
        boundary_term_b,
    })
}

/// 𝓔(a, σ) for N = 2, R = 1.
pub fn compressed_energy(a: f64, sigma: f64) -> Result<CompressedEnergyPoint> {
    let t = compressed_terms(a, sigma)?;
    let Some(denominator) = t.denominator() else {
        return Ok(CompressedEnergyPoint {
            a,
            sigma,
            energy: -0.5 * t.integral_v,
            epsilon: 0.0,
            delta: 0.0,
        });
    };
    if !(denominator > 0.0) {
        return Err(PlateError::Unbounded {
            a,
            sigma,
            denominator,
        });
    }
    let epsilon = -t.integral_h / denominator;
    let energy = 0.5 * (-t.integral_h * t.integral_h / denominator - t.integral_v);
    Ok(CompressedEnergyPoint {
        a,
        sigma,
        energy,
        epsilon,
        delta: a * epsilon / t.b,
    })
}

/// Second-order one-sided difference of 𝓔(·, σ) at a = 1.
pub fn energy_slope_at_one(sigma: f64) -> Result<f64> {
    let h = SLOPE_STEP;
    let e0 = compressed_energy(1.0, sigma)?.energy;
    let e1 = compressed_energy(1.0 - h, sigma)?.energy;
    let e2 = compressed_energy(1.0 - 2.0 * h, sigma)?.energy;
    Ok((3.0 * e0 - 4.0 * e1 + e2) / (2.0 * h))
}

/// The clamped-disk buckling value j₁,₁.
pub fn disk_buckling_sigma() -> f64 {
    bessel_j1_first_zero()
}

/// Outcome of the σ-scan behind [`estimate_sigma_threshold`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub a_grid: usize,
    pub sigma_grid: usize,
    pub sigma_step: f64,
    /// Largest grid σ up to which every scanned σ has its a-grid minimum at a = 1.
    pub threshold: f64,
    /// First grid σ whose minimum moved away from a = 1, if any.
    pub first_failure: Option<f64>,
    /// Minimizing a at the first failure (None when the energy became unbounded).
    pub failure_argmin: Option<f64>,
}

fn argmin_at_one(sigma: f64, a_grid: usize) -> Option<f64> {
    let energies: Vec<Option<f64>> = (1..=a_grid)
        .into_par_iter()
        .map(|i| {
            compressed_energy(i as f64 / a_grid as f64, sigma)
                .ok()
                .map(|p| p.energy)
        })
        .collect();
    let mut best = (f64::INFINITY, 0usize);
    for (i, e) in energies.iter().enumerate() {
        match e {
            Some(e) if *e < best.0 => best = (*e, i + 1),
            Some(_) => {}
            None => return None,
        }
    }
    let at_one = energies[a_grid - 1]?;
    if at_one <= best.0 + ARGMIN_SLACK {
        Some(1.0)
    } else {
        Some(best.1 as f64 / a_grid as f64)
    }
}

/// Scans σ = j·j₁,₁/sigma_grid upward and stops at the first σ whose
/// minimum over a = i/a_grid is not attained at a = 1.
pub fn sigma_threshold_scan(a_grid: usize, sigma_grid: usize) -> Result<ThresholdScan> {
    if a_grid < 64 || sigma_grid < 64 {
        return Err(PlateError::Domain(format!(
            "grids must have at least 64 points (got {a_grid}, {sigma_grid})"
        )));
    }
    let step = disk_buckling_sigma() / sigma_grid as f64;
    let mut threshold = 0.0;
    for j in 0..sigma_grid {
        let sigma = j as f64 * step;
        match argmin_at_one(sigma, a_grid) {
            Some(1.0) => threshold = sigma,
            other => {
                return Ok(ThresholdScan {
                    a_grid,
                    sigma_grid,
                    sigma_step: step,
                    threshold,
                    first_failure: Some(sigma),
                    failure_argmin: other,
                })
            }
        }
    }
    Ok(ThresholdScan {
        a_grid,
        sigma_grid,
        sigma_step: step,
        threshold,
        first_failure: None,
        failure_argmin: None,
    })
}

/// Largest grid σ for which 𝓔(·, σ) is minimized at a = 1.
pub fn estimate_sigma_threshold(a_grid: usize, sigma_grid: usize) -> Result<f64> {
    Ok(sigma_threshold_scan(a_grid, sigma_grid)?.threshold)
}

/// Central second differences of 𝓔(·, σ) on [√(6/7), 1 − h].
pub fn convexity_profile(sigma: f64) -> Result<Vec<(f64, f64)>> {
    let h = CURVATURE_STEP;
    let lo = (6.0f64 / 7.0).sqrt();
    let hi = 1.0 - h;
    (0..CONVEXITY_POINTS)
        .map(|k| {
            let a = lo + (hi - lo) * k as f64 / (CONVEXITY_POINTS - 1) as f64;
            let em = compressed_energy(a - h, sigma)?.energy;
            let e0 = compressed_energy(a, sigma)?.energy;
            let ep = compressed_energy(a + h, sigma)?.energy;
            Ok((a, (ep - 2.0 * e0 + em) / (h * h)))
        })
        .collect()
}

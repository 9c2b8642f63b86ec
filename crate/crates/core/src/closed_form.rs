//! Explicit ball deflections, maximal mean deflections and two-ball energies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PlateError, Result};
use crate::geometry::{complement_radius, unit_sphere_area, Space};
use crate::specfun::dilog_diff;

/// Radii of the two-ball auxiliary problem; `b` is always the complement of `a` inside `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBallConfig {
    pub space: Space,
    pub big_r: f64,
    pub a: f64,
    pub b: f64,
}

impl TwoBallConfig {
    pub fn new(space: Space, big_r: f64, a: f64) -> Result<Self> {
        if !(big_r > 0.0) || (space.curvature() == 1 && big_r >= PI) {
            return Err(PlateError::Domain(format!(
                "outer radius {big_r} out of range"
            )));
        }
        if !(0.0..=big_r).contains(&a) {
            return Err(PlateError::Domain(format!("a = {a} not in [0, {big_r}]")));
        }
        let b = complement_radius(space, big_r, a)?;
        Ok(Self { space, big_r, a, b })
    }
}

/// Minimizing constants, energy and its derivative in `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBallSolution {
    pub c: f64,
    pub d: f64,
    pub energy: f64,
    pub energy_derivative: f64,
}

fn curved_n2(space: Space) -> Result<()> {
    if !space.is_flat() && space.dimension() != 2 {
        return Err(PlateError::UnsupportedGeometry {
            curvature: space.curvature(),
            dimension: space.dimension(),
        });
    }
    Ok(())
}

fn check_ball(space: Space, big_r: f64) -> Result<()> {
    curved_n2(space)?;
    if !(big_r > 0.0) || !big_r.is_finite() || (space.curvature() == 1 && big_r >= PI) {
        return Err(PlateError::Domain(format!(
            "ball radius {big_r} out of range"
        )));
    }
    Ok(())
}

/// sinh y − y without cancellation.
fn sinh_minus_id(y: f64) -> f64 {
    if y.abs() < 0.5 {
        let y2 = y * y;
        let mut term = y * y2 / 6.0;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= y2 / ((k + 1.0) * (k + 2.0));
            sum += term;
            k += 2.0;
        }
        sum
    } else {
        y.sinh() - y
    }
}

/// q(x) = −½ ln(1 − x) − x/2 = Σ_{k≥2} xᵏ/(2k).
fn q_fn(x: f64) -> f64 {
    if x.abs() < 0.25 {
        let mut power = x * x;
        let mut sum = 0.0;
        for k in 2..200 {
            let term = power / (2.0 * k as f64);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            power *= x;
        }
        sum
    } else {
        -0.5 * (-x).ln_1p() - 0.5 * x
    }
}

/// T(x) = 2[(1 − x) ln(1 − x) + x] − x² = Σ_{k≥3} 2xᵏ/(k(k − 1)).
fn t_fn(x: f64) -> f64 {
    if x.abs() < 0.25 {
        let mut power = x * x * x;
        let mut sum = 0.0;
        for k in 3..200 {
            let kf = k as f64;
            let term = 2.0 * power / (kf * (kf - 1.0));
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            power *= x;
        }
        sum
    } else {
        2.0 * ((1.0 - x) * (-x).ln_1p() + x) - x * x
    }
}

/// sn²(r/2) for the curved spaces.
fn half_sn_sq(space: Space, r: f64) -> f64 {
    if space.curvature() == 1 {
        (0.5 * r).sin().powi(2)
    } else {
        (0.5 * r).sinh().powi(2)
    }
}

/// Clamped ball deflection u(r) under unit load and no compression.
pub fn ball_deflection(space: Space, big_r: f64, r: f64) -> Result<f64> {
    check_ball(space, big_r)?;
    if !(0.0..=big_r).contains(&r) {
        return Err(PlateError::Domain(format!("r = {r} not in [0, {big_r}]")));
    }
    let n = space.dimension() as f64;
    match space.curvature() {
        0 => {
            let t = 1.0 - (r / big_r).powi(2);
            Ok(big_r.powi(4) / (8.0 * n * (n + 2.0)) * t * t)
        }
        1 => {
            let (lr, lbig) = ((0.5 * r).cos().ln(), (0.5 * big_r).cos().ln());
            let ratio = ((0.5 * r).cos() / (0.5 * big_r).cos()).ln();
            let c = 4.0 * lbig / (0.5 * big_r).tan().powi(2);
            let li = dilog_diff(-(0.5 * r).tan().powi(2), -(0.5 * big_r).tan().powi(2))?;
            Ok(2.0 * ratio * (lr + lbig) + li + c * ratio)
        }
        _ => {
            let (lr, lbig) = ((0.5 * r).cosh().ln(), (0.5 * big_r).cosh().ln());
            let ratio = ((0.5 * r).cosh() / (0.5 * big_r).cosh()).ln();
            let c = -4.0 * lbig / (0.5 * big_r).tanh().powi(2);
            let li = dilog_diff((0.5 * r).tanh().powi(2), (0.5 * big_r).tanh().powi(2))?;
            Ok(2.0 * ratio * (lr + lbig) + li + c * ratio)
        }
    }
}

/// ∫ u dV over the ball of radius R (the maximal mean deflection).
pub fn ball_mean_deflection(space: Space, big_r: f64) -> Result<f64> {
    check_ball(space, big_r)?;
    let n = space.dimension();
    if space.is_flat() {
        let nf = n as f64;
        return Ok(unit_sphere_area(n) * big_r.powi(n as i32 + 4)
            / (nf * nf * (nf + 2.0).powi(2) * (nf + 4.0)));
    }
    // 4π(sn² − 4 cn²/sn² · log² cn) with x = R/2, refactored as a product of
    // nonnegative terms: (sn² − 2 cn y) = 2 cn (sinh y − y) where y = |log cn|.
    let x = 0.5 * big_r;
    let (s, c, y) = if space.curvature() == 1 {
        let half = (0.5 * x).sin();
        (x.sin(), x.cos(), -(-2.0 * half * half).ln_1p())
    } else {
        let half = (0.5 * x).sinh();
        (x.sinh(), x.cosh(), (2.0 * half * half).ln_1p())
    };
    let s2 = s * s;
    Ok(4.0 * PI * 2.0 * c * sinh_minus_id(y) * (s2 + 2.0 * c * y) / s2)
}

/// Minimal one-ball energy, −½ ∫u dV.
pub fn ball_energy(space: Space, big_r: f64) -> Result<f64> {
    Ok(-0.5 * ball_mean_deflection(space, big_r)?)
}

/// Two-ball problem with constant load: c, d, 𝓔(a) and 𝓔′(a).
pub fn twoball_constant_load(config: &TwoBallConfig) -> Result<TwoBallSolution> {
    curved_n2(config.space)?;
    let TwoBallConfig { space, big_r, a, b } = *config;
    if space.is_flat() {
        let n = space.dimension();
        let nf = n as f64;
        let omega = unit_sphere_area(n);
        let rn = big_r.powi(n as i32);
        let an = a.powi(n as i32);
        let c = a * a * (nf * rn + 2.0 * (rn - an)) / (2.0 * nf * (nf + 2.0) * rn);
        let d = if a == 0.0 || a == big_r {
            0.0
        } else {
            (2.0 * (nf + 2.0) * an * c - a.powi(n as i32 + 2))
                / (2.0 * (nf + 2.0) * b.powi(n as i32))
        };
        let energy = if a == 0.0 {
            0.0
        } else {
            -0.5 * omega * a.powi(n as i32 + 4) * (2.0 * (nf + 2.0) * rn - (nf + 4.0) * an)
                / (nf.powi(3) * (nf + 2.0).powi(2) * (nf + 4.0) * rn)
        };
        let energy_derivative =
            -omega * (rn - an) * a.powi(n as i32 + 3) / (nf.powi(3) * (nf + 2.0) * rn);
        return Ok(TwoBallSolution {
            c,
            d,
            energy,
            energy_derivative,
        });
    }
    let kappa = space.curvature() as f64;
    let big_s = half_sn_sq(space, big_r);
    let sigma = half_sn_sq(space, a);
    let log_term = (-kappa * sigma).ln_1p();
    let c = (2.0 * sigma - 2.0 * big_s + 2.0 * kappa * (1.0 - kappa * big_s) * log_term) / big_s;
    let d = if a == big_r || big_s - sigma <= 0.0 {
        0.0
    } else {
        (sigma * c - 2.0 * kappa * (1.0 - kappa * sigma) * log_term) / (big_s - sigma)
    };
    let q = q_fn(kappa * sigma);
    let energy = if a == 0.0 {
        0.0
    } else {
        let p = 8.0 * kappa * big_s * t_fn(kappa * sigma) - 32.0 * (1.0 - kappa * big_s) * q * q;
        -PI / (4.0 * big_s) * p
    };
    let tan_half = if kappa > 0.0 {
        (0.5 * a).tan()
    } else {
        (0.5 * a).tanh()
    };
    let energy_derivative = -8.0 * PI * (big_s - sigma) * q * tan_half / big_s;
    Ok(TwoBallSolution {
        c,
        d,
        energy,
        energy_derivative,
    })
}

/// Two-ball problem with a load of unknown sign (Euclidean only).
pub fn twoball_abs_load(n: usize, big_r: f64, a: f64) -> Result<TwoBallSolution> {
    if n == 0 {
        return Err(PlateError::Domain("dimension must be at least 1".into()));
    }
    let space = Space::flat(n)?;
    let cfg = TwoBallConfig::new(space, big_r, a)?;
    let b = cfg.b;
    let nf = n as f64;
    let ni = n as i32;
    let rn = big_r.powi(ni);
    let (an, bn) = (a.powi(ni), b.powi(ni));
    let denom_cd = 2.0 * nf * (nf + 2.0) * rn;
    let c = (nf * a.powi(ni + 2) + (nf + 2.0) * a * a * bn + 2.0 * b.powi(ni + 2)) / denom_cd;
    let d = (2.0 * a.powi(ni + 2) + (nf + 2.0) * an * b * b + nf * b.powi(ni + 2)) / denom_cd;

    let x = (nf + 2.0) * (a.powi(4) + b.powi(4)) + (nf + 4.0) * a * a * b * b;
    let num = nf * a.powi(2 * ni + 4) + 2.0 * an * bn * x + nf * b.powi(2 * ni + 4);
    let scale = -unit_sphere_area(n) / (2.0 * nf.powi(3) * (nf + 2.0).powi(2) * (nf + 4.0) * rn);
    let energy = scale * num;

    let dx_da = 4.0 * (nf + 2.0) * a.powi(3) + 2.0 * (nf + 4.0) * a * b * b;
    let dx_db = 4.0 * (nf + 2.0) * b.powi(3) + 2.0 * (nf + 4.0) * a * a * b;
    let dnum_da = nf * (2.0 * nf + 4.0) * a.powi(2 * ni + 3)
        + 2.0 * bn * (nf * a.powi(ni - 1) * x + an * dx_da);
    // ∂num/∂b = b^{N−1}·g_b, and db/da = −(a/b)^{N−1}.
    let g_b = 2.0 * an * (nf * x + b * dx_db) + nf * (2.0 * nf + 4.0) * b.powi(ni + 4);
    let energy_derivative = scale * (dnum_da - a.powi(ni - 1) * g_b);
    Ok(TwoBallSolution {
        c,
        d,
        energy,
        energy_derivative,
    })
}

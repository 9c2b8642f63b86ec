//! Radial clamped-type problem Δ²ψ + σ²Δψ = α on a Euclidean ball with ψ(a) = 0
//! and ψ′(a) = prescribed slope.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PlateError, Result};
use crate::geometry::unit_sphere_area;
use crate::specfun::bessel_j1_first_zero;

/// Default number of Chebyshev nodes in a [`RadialProfile`].
pub const DEFAULT_NODES: usize = 1025;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub n: usize,
    pub a: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub slope_bc: f64,
}

impl RadialProblem {
    pub fn new(n: usize, a: f64, sigma: f64, alpha: f64, slope_bc: f64) -> Result<Self> {
        let p = Self {
            n,
            a,
            sigma,
            alpha,
            slope_bc,
        };
        p.validate()?;
        Ok(p)
    }

    /// Clamped problem with unit load.
    pub fn clamped(n: usize, a: f64, sigma: f64) -> Result<Self> {
        Self::new(n, a, sigma, 1.0, 0.0)
    }

    /// Unloaded problem with unit outward slope.
    pub fn unit_slope(n: usize, a: f64, sigma: f64) -> Result<Self> {
        Self::new(n, a, sigma, 0.0, 1.0)
    }

    /// Largest admissible σ for this radius, j₁,₁ / a.
    pub fn sigma_limit(&self) -> f64 {
        bessel_j1_first_zero() / self.a
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(PlateError::Domain("dimension must be at least 1".into()));
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(PlateError::Domain(format!(
                "ball radius {} must be positive",
                self.a
            )));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(PlateError::Domain(format!(
                "sigma {} must be nonnegative",
                self.sigma
            )));
        }
        if self.alpha != 0.0 && self.alpha != 1.0 {
            return Err(PlateError::Domain(format!(
                "alpha {} not in {{0, 1}}",
                self.alpha
            )));
        }
        if !self.slope_bc.is_finite() {
            return Err(PlateError::Domain("slope must be finite".into()));
        }
        if self.sigma > 0.0 && self.n != 2 {
            return Err(PlateError::UnsupportedGeometry {
                curvature: 0,
                dimension: self.n,
            });
        }
        if self.sigma > 0.0 && self.sigma >= self.sigma_limit() {
            return Err(PlateError::IllPosed {
                sigma: self.sigma,
                threshold: self.sigma_limit(),
            });
        }
        Ok(())
    }
}

const SERIES_TERMS: usize = 40;

/// Coefficients cₖ of J₀(x) = Σ cₖ x^{2k}.
fn j0_coefficients() -> [f64; SERIES_TERMS] {
    let mut c = [0.0; SERIES_TERMS];
    c[0] = 1.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        c[k] = -c[k - 1] / (4.0 * kf * kf);
    }
    c
}

/// Evaluates Σ_{k≥k0} weight(k)·cₖ·x^{2(k−k0)}.
fn shifted_series(x: f64, k0: usize, weight: impl Fn(usize) -> f64) -> f64 {
    let c = j0_coefficients();
    let x2 = x * x;
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in k0..SERIES_TERMS {
        let term = weight(k) * c[k] * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        power *= x2;
    }
    sum
}

/// (J₀(x) − 1 + x²/4)/x⁴
fn kern_k(x: f64) -> f64 {
    shifted_series(x, 2, |_| 1.0)
}

/// (1 − J₀(x))/x²
fn kern_l(x: f64) -> f64 {
    -shifted_series(x, 1, |_| 1.0)
}

/// (x/2 − J₁(x))/x³
fn kern_g(x: f64) -> f64 {
    shifted_series(x, 2, |k| 2.0 * k as f64)
}

/// (x J₁(x) − x²/2 + x⁴/16)/x⁶
fn kern_i(x: f64) -> f64 {
    -shifted_series(x, 3, |k| 2.0 * k as f64)
}

/// J₁(x)/x
fn kern_h(x: f64) -> f64 {
    -shifted_series(x, 1, |k| 2.0 * k as f64)
}

/// Exact solution of a [`RadialProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialSolution {
    /// ψ = A + B r² + E r⁴ (σ = 0, any N).
    Polynomial {
        n: usize,
        a: f64,
        c0: f64,
        c2: f64,
        c4: f64,
    },
    /// ψ = P + Q r² + M (J₀(σr) − 1 + σ²r²/4)/σ⁴ (N = 2).
    Bessel {
        a: f64,
        sigma: f64,
        p: f64,
        q: f64,
        m: f64,
    },
}

impl RadialSolution {
    pub fn solve(problem: &RadialProblem) -> Result<Self> {
        problem.validate()?;
        let RadialProblem {
            n,
            a,
            sigma,
            alpha,
            slope_bc: s,
        } = *problem;
        if alpha == 0.0 && s == 0.0 {
            return Ok(RadialSolution::Polynomial {
                n,
                a,
                c0: 0.0,
                c2: 0.0,
                c4: 0.0,
            });
        }
        if sigma == 0.0 {
            let nf = n as f64;
            let c4 = alpha / (8.0 * nf * (nf + 2.0));
            let c2 = (s - 4.0 * c4 * a.powi(3)) / (2.0 * a);
            let c0 = -c2 * a * a - c4 * a.powi(4);
            return Ok(RadialSolution::Polynomial { n, a, c0, c2, c4 });
        }
        let x = sigma * a;
        let det = 4.0 * sigma * sigma * a.powi(3) * kern_g(x) - 2.0 * a;
        let q = (alpha * a.powi(3) * kern_g(x) - s) / det;
        let m = (4.0 * sigma * sigma * s - 2.0 * a * alpha) / det;
        let p = -q * a * a - m * a.powi(4) * kern_k(x);
        Ok(RadialSolution::Bessel { a, sigma, p, q, m })
    }

    pub fn dimension(&self) -> usize {
        match *self {
            RadialSolution::Polynomial { n, .. } => n,
            RadialSolution::Bessel { .. } => 2,
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            RadialSolution::Polynomial { a, .. } | RadialSolution::Bessel { a, .. } => a,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialSolution::Polynomial { c0, c2, c4, .. } => c0 + r * r * (c2 + c4 * r * r),
            RadialSolution::Bessel { sigma, p, q, m, .. } => {
                p + q * r * r + m * r.powi(4) * kern_k(sigma * r)
            }
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            RadialSolution::Polynomial { c2, c4, .. } => 2.0 * c2 * r + 4.0 * c4 * r.powi(3),
            RadialSolution::Bessel { sigma, q, m, .. } => {
                2.0 * q * r + m * r.powi(3) * kern_g(sigma * r)
            }
        }
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        match *self {
            RadialSolution::Polynomial { n, c2, c4, .. } => {
                let nf = n as f64;
                2.0 * nf * c2 + 4.0 * (nf + 2.0) * c4 * r * r
            }
            RadialSolution::Bessel { sigma, q, m, .. } => 4.0 * q + m * r * r * kern_l(sigma * r),
        }
    }

    /// Radial derivative of Δψ.
    pub fn laplacian_derivative(&self, r: f64) -> f64 {
        match *self {
            RadialSolution::Polynomial { n, c4, .. } => 8.0 * (n as f64 + 2.0) * c4 * r,
            RadialSolution::Bessel { sigma, m, .. } => m * r * kern_h(sigma * r),
        }
    }

    pub fn boundary_laplacian(&self) -> f64 {
        self.laplacian(self.radius())
    }

    /// ∫ψ dV over the ball.
    pub fn integral(&self) -> f64 {
        match *self {
            RadialSolution::Polynomial { n, a, c0, c2, c4 } => {
                let nf = n as f64;
                unit_sphere_area(n)
                    * a.powi(n as i32)
                    * (c0 / nf + c2 * a * a / (nf + 2.0) + c4 * a.powi(4) / (nf + 4.0))
            }
            RadialSolution::Bessel { a, sigma, p, q, m } => {
                2.0 * PI
                    * (0.5 * p * a * a + 0.25 * q * a.powi(4) + m * a.powi(6) * kern_i(sigma * a))
            }
        }
    }
}

/// Radial function sampled on Chebyshev-clustered nodes of [0, a].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub problem: RadialProblem,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub laplacians: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileFunctionals {
    pub integral_psi: f64,
    pub dirichlet2: f64,
    pub dirichlet1: f64,
    pub boundary_laplacian: f64,
}

/// Clenshaw–Curtis weights on [−1, 1] for the points cos(jπ/n), j = 0..=n.
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    assert!(n >= 2, "Clenshaw-Curtis needs at least 3 points");
    let cos_table: Vec<f64> = (0..2 * n)
        .map(|m| (PI * m as f64 / n as f64).cos())
        .collect();
    let half = n / 2;
    (0..=n)
        .map(|j| {
            let mut s = 0.0;
            for k in 1..=half {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                let kf = k as f64;
                s += b / (4.0 * kf * kf - 1.0) * cos_table[(2 * k * j) % (2 * n)];
            }
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            c / n as f64 * (1.0 - s)
        })
        .collect()
}

/// Solves the radial problem and samples it on the default node set.
pub fn solve_radial(problem: &RadialProblem) -> Result<RadialProfile> {
    RadialProfile::sample(problem, DEFAULT_NODES)
}

impl RadialProfile {
    pub fn sample(problem: &RadialProblem, count: usize) -> Result<Self> {
        if count < 3 {
            return Err(PlateError::Domain(format!(
                "need at least 3 nodes, got {count}"
            )));
        }
        let sol = RadialSolution::solve(problem)?;
        let n = count - 1;
        let a = problem.a;
        let cc = clenshaw_curtis_weights(n);
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for j in 0..=n {
            let t = (PI * j as f64 / n as f64).cos();
            nodes.push(0.5 * a * (1.0 - t));
            weights.push(0.5 * a * cc[j]);
        }
        nodes[0] = 0.0;
        nodes[n] = a;
        let values = nodes.iter().map(|&r| sol.value(r)).collect();
        let derivatives = nodes.iter().map(|&r| sol.derivative(r)).collect();
        let laplacians = nodes.iter().map(|&r| sol.laplacian(r)).collect();
        Ok(Self {
            problem: *problem,
            nodes,
            values,
            derivatives,
            laplacians,
            weights,
        })
    }

    /// ∫ g dV for a radial integrand sampled at the nodes.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        let n = self.problem.n;
        let omega = unit_sphere_area(n);
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(samples)
            .map(|((&r, &w), &g)| w * omega * r.powi(n as i32 - 1) * g)
            .sum()
    }
}

/// Volume integrals of ψ, |Δψ|², |∇ψ|² and the boundary value of Δψ.
pub fn profile_functionals(profile: &RadialProfile) -> ProfileFunctionals {
    let sq = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
    ProfileFunctionals {
        integral_psi: profile.integrate(&profile.values),
        dirichlet2: profile.integrate(&sq(&profile.laplacians)),
        dirichlet1: profile.integrate(&sq(&profile.derivatives)),
        boundary_laplacian: *profile.laplacians.last().unwrap_or(&0.0),
    }
}

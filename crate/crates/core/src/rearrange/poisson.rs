//! Radial Poisson problem Δf = F on a disk with f(R) = 0, for piecewise-constant radial F.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::specfun::gauss_legendre;

use super::symmetrize::RadialProfile;

/// Quadrature nodes per annulus for integrals of the solution.
pub const ANNULUS_QUADRATURE: usize = 4;

/// Exact solution of Δf = F in two dimensions for a source constant on each annulus of a
/// [`RadialProfile`] partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPoisson {
    /// Source value on each annulus.
    pub source: Vec<f64>,
    pub cell_measure: f64,
    /// f at the outer radius of each annulus, with the centre value first.
    pub nodes: Vec<f64>,
    /// ∫₀^{r_i} F s ds at the outer radius of each annulus, with 0 at the centre first.
    pub moments: Vec<f64>,
}

impl RadialPoisson {
    /// Integrates Δf = F from the centre outwards and fixes f(R) = 0.
    pub fn solve(source: &RadialProfile) -> Self {
        let m = source.cell_measure;
        let n = source.values.len();
        let mut moments = vec![0.0; n + 1];
        for i in 0..n {
            moments[i + 1] = moments[i] + source.values[i] * m / (2.0 * PI);
        }
        let mut nodes = vec![0.0; n + 1];
        let r = |i: usize| (i as f64 * m / PI).sqrt();
        for i in (1..=n).rev() {
            let (r0, r1) = (r(i - 1), r(i));
            let drop = annulus_drop(moments[i - 1], source.values[i - 1], r0, r1, r0);
            nodes[i - 1] = nodes[i] + drop;
        }
        Self {
            source: source.values.clone(),
            cell_measure: m,
            nodes,
            moments,
        }
    }

    fn radius(&self, i: usize) -> f64 {
        (i as f64 * self.cell_measure / PI).sqrt()
    }

    /// Radius of the disk.
    pub fn outer_radius(&self) -> f64 {
        self.radius(self.source.len())
    }

    fn annulus_of(&self, r: f64) -> Option<usize> {
        let n = self.source.len();
        if n == 0 || r < 0.0 || r > self.outer_radius() {
            return None;
        }
        Some(((PI * r * r / self.cell_measure).floor() as usize).min(n - 1))
    }

    /// f(r); zero outside the disk.
    pub fn value(&self, r: f64) -> f64 {
        let Some(i) = self.annulus_of(r) else {
            return 0.0;
        };
        let (r0, r1) = (self.radius(i), self.radius(i + 1));
        self.nodes[i + 1] + annulus_drop(self.moments[i], self.source[i], r0, r1, r)
    }

    /// f′(r); zero outside the disk.
    pub fn derivative(&self, r: f64) -> f64 {
        let Some(i) = self.annulus_of(r) else {
            return 0.0;
        };
        if r == 0.0 {
            return 0.0;
        }
        let r0 = self.radius(i);
        (self.moments[i] + self.source[i] * (r * r - r0 * r0) / 2.0) / r
    }

    /// 2πR f′(R), which equals ∫ Δf over the disk.
    pub fn boundary_flux(&self) -> f64 {
        2.0 * PI * self.moments[self.source.len()]
    }

    /// ∫_B g(f, f′) dV by Gauss–Legendre quadrature in the area variable on every annulus.
    pub fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let (x, w) = gauss_legendre(ANNULUS_QUADRATURE);
        let m = self.cell_measure;
        let mut total = 0.0;
        for i in 0..self.source.len() {
            let (r0, r1) = (self.radius(i), self.radius(i + 1));
            let s0 = i as f64 * m;
            let mut part = 0.0;
            for (xk, wk) in x.iter().zip(&w) {
                let r = ((s0 + 0.5 * m * (1.0 + xk)) / PI).sqrt();
                let f =
                    self.nodes[i + 1] + annulus_drop(self.moments[i], self.source[i], r0, r1, r);
                let df = (self.moments[i] + self.source[i] * (r * r - r0 * r0) / 2.0) / r;
                part += wk * g(f, df);
            }
            total += 0.5 * m * part;
        }
        total
    }
}

/// f(r) − f(r1) on the annulus [r0, r1] carrying source F with inner moment M.
fn annulus_drop(moment: f64, source: f64, r0: f64, r1: f64, r: f64) -> f64 {
    let a = moment - source * r0 * r0 / 2.0;
    let log_part = if a == 0.0 { 0.0 } else { a * (r1 / r).ln() };
    -(log_part + source * (r1 * r1 - r * r) / 4.0)
}

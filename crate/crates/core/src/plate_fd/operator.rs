//! Assembly of the discrete clamped-plate operator and its conjugate-gradient solve.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{BoundaryTreatment, GridDomain, GridField, NEIGHBOURS};
use crate::error::{PlateError, Result};
use crate::specfun::bessel_j1_first_zero;

/// Relative residual at which conjugate gradients stop.
pub const CG_TOLERANCE: f64 = 1e-9;
/// Iteration cap per unit of nx + ny.
pub const CG_CAP_FACTOR: usize = 50;
const CHUNK: usize = 4096;

/// Scalar outputs of a plate solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub compliance: f64,
    pub mean_deflection: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    /// Sums duplicate entries in insertion order.
    fn from_triplets(n: usize, mut t: Vec<(u32, u32, f64)>) -> Self {
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(t.len() / 4);
        let mut vals: Vec<f64> = Vec::with_capacity(t.len() / 4);
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            for (o, yi) in chunk.iter_mut().enumerate() {
                let i = c * CHUNK + o;
                let mut s = 0.0;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    s += self.vals[p] * x[self.cols[p] as usize];
                }
                *yi = s;
            }
        });
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&(j as u32)) {
            Ok(p) => self.vals[self.row_ptr[i] + p],
            Err(_) => 0.0,
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[p] as usize;
                worst = worst.max((self.vals[p] - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn nnz(&self) -> usize {
        self.vals.len()
    }
}

/// Deterministic parallel dot product with a fixed reduction tree.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

/// Linear combination of unknown values.
type Stencil = Vec<(usize, f64)>;

fn add_scaled(acc: &mut BTreeMap<usize, f64>, terms: &[(usize, f64)], scale: f64) {
    for &(k, w) in terms {
        *acc.entry(k).or_insert(0.0) += scale * w;
    }
}

/// Ghost value at an exterior node as a combination of interior values: along the
/// grid line(s) with the nearest interior node, the cubic with a double root at the
/// boundary crossing through one or two interior nodes.
fn ghost_stencil(dom: &GridDomain, gi: i64, gj: i64) -> Stencil {
    let mut candidates = Vec::new();
    for (di, dj) in NEIGHBOURS {
        let Some(k0) = (1..=3).find(|&k| dom.is_interior(gi + k * di, gj + k * dj)) else {
            continue;
        };
        let mut count = 0;
        while count < 3 && dom.is_interior(gi + (k0 + count) * di, gj + (k0 + count) * dj) {
            count += 1;
        }
        candidates.push((k0, count, di, dj));
    }
    let Some(&(best_k, best_count, _, _)) = candidates
        .iter()
        .min_by_key(|&&(k0, count, _, _)| (k0, -count))
    else {
        return Vec::new();
    };
    let chosen: Vec<_> = candidates
        .into_iter()
        .filter(|&(k0, c, _, _)| k0 == best_k && c == best_count)
        .collect();
    let share = 1.0 / chosen.len() as f64;
    let mut acc = BTreeMap::new();
    for (k0, count, di, dj) in chosen {
        let (px, py) = dom.node_xy(gi + k0 * di, gj + k0 * dj);
        let (qx, qy) = dom.node_xy(gi + (k0 - 1) * di, gj + (k0 - 1) * dj);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if dom
                .shape()
                .contains(px + mid * (qx - px), py + mid * (qy - py))
            {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = k0 as f64 - 0.5 * (lo + hi);
        let nodes: Vec<i64> = if count >= 3 && (k0 as f64 - b) < 0.5 {
            vec![k0 + 1, k0 + 2]
        } else if count >= 2 {
            vec![k0, k0 + 1]
        } else {
            vec![k0]
        };
        let weights: Vec<f64> = if nodes.len() == 1 {
            vec![(b / (nodes[0] as f64 - b)).powi(2)]
        } else {
            let (e1, e2) = (nodes[0] as f64 - b, nodes[1] as f64 - b);
            let (m11, m12, m21, m22) = (e1 * e1, e2 * e2, e1 * e1 * e1, e2 * e2 * e2);
            let det = m11 * m22 - m12 * m21;
            let (r1, r2) = (b * b, -b * b * b);
            vec![(r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det]
        };
        for (s, w) in nodes.iter().zip(weights) {
            let k = dom
                .unknown(gi + s * di, gj + s * dj)
                .expect("extrapolation node is interior");
            *acc.entry(k).or_insert(0.0) += share * w;
        }
    }
    acc.into_iter().collect()
}

/// The assembled operator A = DᵀWD − σ²G/h² for a domain, where D is the 5-point
/// Laplacian on interior and first-ring nodes, W the row weights and G the graph
/// Laplacian of the mask.
#[derive(Debug, Clone)]
pub struct PlateOperator {
    domain: Arc<GridDomain>,
    sigma: f64,
    matrix: Csr,
    load_weights: Vec<f64>,
}

/// Largest σ accepted on a domain of the given area.
pub fn sigma_guard(area: f64) -> f64 {
    bessel_j1_first_zero() * (std::f64::consts::PI / area).sqrt()
}

impl PlateOperator {
    pub fn new(domain: Arc<GridDomain>, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(PlateError::Domain(format!(
                "sigma {sigma} must be nonnegative"
            )));
        }
        let limit = sigma_guard(domain.area());
        if sigma >= limit {
            return Err(PlateError::IllPosed {
                sigma,
                threshold: limit,
            });
        }
        let dom = &*domain;
        let n = dom.cell_count();
        let h = dom.h();
        let cut = dom.boundary() == BoundaryTreatment::CutCell;

        let mut ring1 = Vec::new();
        let mut ring_set = std::collections::BTreeSet::new();
        for k in 0..n {
            let (i, j) = dom.cell_ij(k);
            for (di, dj) in NEIGHBOURS {
                let p = (i + di, j + dj);
                if !dom.is_interior(p.0, p.1) && ring_set.insert(p) {
                    ring1.push(p);
                }
            }
        }
        let mut ghosts: BTreeMap<(i64, i64), Stencil> = BTreeMap::new();
        if cut {
            let mut exterior: Vec<(i64, i64)> = ring1.clone();
            for &(i, j) in &ring1 {
                for (di, dj) in NEIGHBOURS {
                    let p = (i + di, j + dj);
                    if !dom.is_interior(p.0, p.1) && !ring_set.contains(&p) {
                        exterior.push(p);
                    }
                }
            }
            exterior.sort_unstable();
            exterior.dedup();
            let stencils: Vec<Stencil> = exterior
                .par_iter()
                .map(|&(i, j)| ghost_stencil(dom, i, j))
                .collect();
            ghosts = exterior.into_iter().zip(stencils).collect();
        }
        let value_of = |i: i64, j: i64| -> Stencil {
            match dom.unknown(i, j) {
                Some(k) => vec![(k, 1.0)],
                None => ghosts.get(&(i, j)).cloned().unwrap_or_default(),
            }
        };

        let mut row_nodes: Vec<(i64, i64)> = (0..n).map(|k| dom.cell_ij(k)).collect();
        row_nodes.extend(ring1.iter().copied());
        let row_weights: Vec<f64> = if cut {
            row_nodes
                .par_iter()
                .map(|&(i, j)| dom.cell_fraction(i, j))
                .collect()
        } else {
            vec![1.0; row_nodes.len()]
        };
        let inv_h4 = 1.0 / (h * h * h * h);
        let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
        for (&(i, j), &w) in row_nodes.iter().zip(&row_weights) {
            if w == 0.0 {
                continue;
            }
            let mut row = BTreeMap::new();
            add_scaled(&mut row, &value_of(i, j), -4.0);
            for (di, dj) in NEIGHBOURS {
                add_scaled(&mut row, &value_of(i + di, j + dj), 1.0);
            }
            let entries: Vec<(usize, f64)> = row.into_iter().filter(|e| e.1 != 0.0).collect();
            for (a, &(ka, va)) in entries.iter().enumerate() {
                triplets.push((ka as u32, ka as u32, w * va * va * inv_h4));
                for &(kb, vb) in &entries[a + 1..] {
                    let t = w * va * vb * inv_h4;
                    triplets.push((ka as u32, kb as u32, t));
                    triplets.push((kb as u32, ka as u32, t));
                }
            }
        }
        if sigma > 0.0 {
            let s = sigma * sigma / (h * h);
            for k in 0..n {
                let (i, j) = dom.cell_ij(k);
                triplets.push((k as u32, k as u32, -4.0 * s));
                for (di, dj) in [(1, 0), (0, 1)] {
                    if let Some(m) = dom.unknown(i + di, j + dj) {
                        triplets.push((k as u32, m as u32, s));
                        triplets.push((m as u32, k as u32, s));
                    }
                }
            }
        }
        let matrix = Csr::from_triplets(n, triplets);
        let load_weights = if cut {
            row_weights[..n].to_vec()
        } else {
            vec![1.0; n]
        };
        Ok(Self {
            domain,
            sigma,
            matrix,
            load_weights,
        })
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Quadrature weights of the interior cells (covered fractions or ones).
    pub fn load_weights(&self) -> &[f64] {
        &self.load_weights
    }

    pub fn nonzeros(&self) -> usize {
        self.matrix.nnz()
    }

    /// Largest |A_ij − A_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        self.matrix.max_asymmetry()
    }

    /// Matrix entry A_ij.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.matrix.matvec(x, &mut y);
        y
    }

    fn check_load(&self, load: &GridField) -> Result<()> {
        if !Arc::ptr_eq(load.domain(), &self.domain) && **load.domain() != *self.domain {
            return Err(PlateError::DomainMismatch);
        }
        if load.values().iter().any(|v| v.abs() > 1.0) {
            return Err(PlateError::Precondition(
                "load values must lie in [-1, 1]".into(),
            ));
        }
        Ok(())
    }

    fn rhs(&self, load: &GridField) -> Vec<f64> {
        load.values()
            .iter()
            .zip(&self.load_weights)
            .map(|(r, w)| r * w)
            .collect()
    }

    /// Solves A u = Wρ by Jacobi-preconditioned conjugate gradients.
    pub fn solve(&self, load: &GridField) -> Result<(GridField, SolveReport)> {
        self.check_load(load)?;
        let b = self.rhs(load);
        let n = b.len();
        let b_norm = dot(&b, &b).sqrt();
        let mut x = vec![0.0; n];
        let mut iterations = 0;
        let mut residual = 0.0;
        if b_norm > 0.0 {
            let cap = CG_CAP_FACTOR * (self.domain.nx() + self.domain.ny());
            let inv_diag: Vec<f64> = self.matrix.diagonal().iter().map(|d| 1.0 / d).collect();
            let mut r = b.clone();
            let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
            let mut p = z.clone();
            let mut q = vec![0.0; n];
            let mut rz = dot(&r, &z);
            residual = 1.0;
            while residual > CG_TOLERANCE {
                if iterations >= cap {
                    return Err(PlateError::NotConverged {
                        iterations,
                        residual,
                    });
                }
                self.matrix.matvec(&p, &mut q);
                let pq = dot(&p, &q);
                if !(pq > 0.0) {
                    return Err(PlateError::NotConverged {
                        iterations,
                        residual,
                    });
                }
                let alpha = rz / pq;
                x.par_iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
                r.par_iter_mut().zip(&q).for_each(|(r, q)| *r -= alpha * q);
                z.par_iter_mut()
                    .zip(&r)
                    .zip(&inv_diag)
                    .for_each(|((z, r), d)| *z = r * d);
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                p.par_iter_mut()
                    .zip(&z)
                    .for_each(|(p, z)| *p = z + beta * *p);
                iterations += 1;
                residual = dot(&r, &r).sqrt() / b_norm;
            }
        }
        let u = GridField::new(self.domain.clone(), x)?;
        let mut report = self.evaluate(&u, load)?;
        report.iterations = iterations;
        report.residual = residual;
        Ok((u, report))
    }

    /// Compliance, mean deflection and discrete energy of u under load ρ.
    pub fn evaluate(&self, u: &GridField, load: &GridField) -> Result<SolveReport> {
        self.check_load(load)?;
        if !u.same_domain(load) {
            return Err(PlateError::DomainMismatch);
        }
        let h2 = self.domain.h() * self.domain.h();
        let b = self.rhs(load);
        let au = self.apply(u.values());
        let uau = dot(u.values(), &au);
        let work = dot(u.values(), &b);
        let mean = dot(u.values(), &self.load_weights);
        let b_norm = dot(&b, &b).sqrt();
        let residual = if b_norm > 0.0 {
            let r: Vec<f64> = au.iter().zip(&b).map(|(a, b)| a - b).collect();
            dot(&r, &r).sqrt() / b_norm
        } else {
            dot(&au, &au).sqrt()
        };
        Ok(SolveReport {
            compliance: h2 * work,
            mean_deflection: h2 * mean,
            energy: h2 * (0.5 * uau - work),
            residual,
            iterations: 0,
        })
    }
}

/// Solves the clamped plate on a domain under a load with values in [−1, 1].
pub fn solve_plate(
    domain: &Arc<GridDomain>,
    load: &GridField,
    sigma: f64,
) -> Result<(GridField, SolveReport)> {
    PlateOperator::new(domain.clone(), sigma)?.solve(load)
}

/// Functionals of a deflection field under a load.
pub fn evaluate(field: &GridField, load: &GridField, sigma: f64) -> Result<SolveReport> {
    if !field.same_domain(load) {
        return Err(PlateError::DomainMismatch);
    }
    PlateOperator::new(field.domain().clone(), sigma)?.evaluate(field, load)
}

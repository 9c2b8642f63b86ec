//! Rasterized planar domains and fields that vanish outside them.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shape::{Shape, ShapeSpec};
use crate::error::{PlateError, Result};

/// Minimum number of interior cells accepted by [`rasterize`].
pub const MIN_CELLS: usize = 100;
/// Empty grid lines kept around the shape on every side.
pub const GRID_MARGIN: i64 = 4;
/// Sub-samples per direction when estimating the covered fraction of a cell.
pub const FRACTION_SAMPLES: usize = 16;

/// How the clamped condition is imposed at the edge of the mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTreatment {
    /// Nodes outside the mask carry the value 0 and every cell has full weight.
    #[default]
    ZeroExtension,
    /// Exterior nodes next to the mask carry a cubic extrapolation with a double
    /// root on the true boundary, and cells are weighted by their covered fraction.
    CutCell,
}

/// A rasterized open set: grid nodes at integer multiples of h, each the centre of an h × h cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    h: f64,
    nx: usize,
    ny: usize,
    offset: (i64, i64),
    mask: Vec<bool>,
    numbering: Vec<usize>,
    cells: Vec<usize>,
    shape: Shape,
    boundary: BoundaryTreatment,
}

impl GridDomain {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn boundary(&self) -> BoundaryTreatment {
        self.boundary
    }

    /// Interior mask in row-major order (index j·nx + i).
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of interior cells (unknowns).
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Discrete area, cell count × h².
    pub fn area(&self) -> f64 {
        self.cells.len() as f64 * self.h * self.h
    }

    /// Grid coordinates (i, j) of the k-th interior cell.
    pub fn cell_ij(&self, k: usize) -> (i64, i64) {
        let g = self.cells[k];
        ((g % self.nx) as i64, (g / self.nx) as i64)
    }

    /// Physical position of grid node (i, j).
    pub fn node_xy(&self, i: i64, j: i64) -> (f64, f64) {
        (
            (self.offset.0 + i) as f64 * self.h,
            (self.offset.1 + j) as f64 * self.h,
        )
    }

    /// Physical position of the k-th interior cell centre.
    pub fn cell_xy(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.cell_ij(k);
        self.node_xy(i, j)
    }

    /// Unknown index of node (i, j) if it is interior.
    pub fn unknown(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
            return None;
        }
        let k = self.numbering[j as usize * self.nx + i as usize];
        (k != usize::MAX).then_some(k)
    }

    pub fn is_interior(&self, i: i64, j: i64) -> bool {
        self.unknown(i, j).is_some()
    }

    /// Fraction of the cell around node (i, j) covered by the shape.
    pub fn cell_fraction(&self, i: i64, j: i64) -> f64 {
        let (x, y) = self.node_xy(i, j);
        let m = FRACTION_SAMPLES;
        let mut count = 0usize;
        for a in 0..m {
            for b in 0..m {
                let sx = x + ((a as f64 + 0.5) / m as f64 - 0.5) * self.h;
                let sy = y + ((b as f64 + 0.5) / m as f64 - 0.5) * self.h;
                if self.shape.contains(sx, sy) {
                    count += 1;
                }
            }
        }
        count as f64 / (m * m) as f64
    }

    /// Covered fractions of all interior cells, in unknown order.
    pub fn cell_fractions(&self) -> Vec<f64> {
        (0..self.cell_count())
            .into_par_iter()
            .map(|k| {
                let (i, j) = self.cell_ij(k);
                self.cell_fraction(i, j)
            })
            .collect()
    }

    /// Number of 4-connected components of the mask.
    pub fn component_count(&self) -> usize {
        let mut label = vec![false; self.cell_count()];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..self.cell_count() {
            if label[start] {
                continue;
            }
            components += 1;
            label[start] = true;
            stack.push(start);
            while let Some(k) = stack.pop() {
                let (i, j) = self.cell_ij(k);
                for (di, dj) in NEIGHBOURS {
                    if let Some(m) = self.unknown(i + di, j + dj) {
                        if !label[m] {
                            label[m] = true;
                            stack.push(m);
                        }
                    }
                }
            }
        }
        components
    }

    /// Staircase length of the mask boundary: h times the number of interior–exterior edges.
    pub fn boundary_length(&self) -> f64 {
        let edges: usize = (0..self.cell_count())
            .map(|k| {
                let (i, j) = self.cell_ij(k);
                NEIGHBOURS
                    .iter()
                    .filter(|(di, dj)| !self.is_interior(i + di, j + dj))
                    .count()
            })
            .sum();
        edges as f64 * self.h
    }

    /// Same raster with a different boundary treatment.
    pub fn with_boundary(&self, boundary: BoundaryTreatment) -> Self {
        Self {
            boundary,
            ..self.clone()
        }
    }
}

pub(crate) const NEIGHBOURS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Rasterizes a shape record with the default boundary treatment.
pub fn rasterize(spec: &ShapeSpec, h: f64) -> Result<GridDomain> {
    rasterize_shape(spec.build()?, h, BoundaryTreatment::default())
}

/// Rasterizes a built shape: cells whose centre lies strictly inside are interior.
pub fn rasterize_shape(shape: Shape, h: f64, boundary: BoundaryTreatment) -> Result<GridDomain> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(PlateError::Config(format!(
            "grid spacing {h} must be positive"
        )));
    }
    let bb = shape.bounding_box();
    let estimate = shape.area() / (h * h);
    if estimate < MIN_CELLS as f64 / 4.0 {
        return Err(PlateError::Resolution {
            cells: estimate as usize,
            required: MIN_CELLS,
        });
    }
    if estimate > 5e7 {
        return Err(PlateError::Config(format!(
            "grid spacing {h} gives too many cells"
        )));
    }
    let i0 = (bb[0] / h).floor() as i64 - GRID_MARGIN;
    let i1 = (bb[1] / h).ceil() as i64 + GRID_MARGIN;
    let j0 = (bb[2] / h).floor() as i64 - GRID_MARGIN;
    let j1 = (bb[3] / h).ceil() as i64 + GRID_MARGIN;
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;
    let mask: Vec<bool> = (0..nx * ny)
        .into_par_iter()
        .map(|g| {
            let x = (i0 + (g % nx) as i64) as f64 * h;
            let y = (j0 + (g / nx) as i64) as f64 * h;
            shape.contains(x, y)
        })
        .collect();
    let mut numbering = vec![usize::MAX; nx * ny];
    let mut cells = Vec::new();
    for (g, &inside) in mask.iter().enumerate() {
        if inside {
            numbering[g] = cells.len();
            cells.push(g);
        }
    }
    if cells.len() < MIN_CELLS {
        return Err(PlateError::Resolution {
            cells: cells.len(),
            required: MIN_CELLS,
        });
    }
    Ok(GridDomain {
        h,
        nx,
        ny,
        offset: (i0, j0),
        mask,
        numbering,
        cells,
        shape,
        boundary,
    })
}

/// A scalar field on the interior cells of a domain, implicitly zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(domain: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cell_count() {
            return Err(PlateError::DomainMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PlateError::Precondition(
                "field values must be finite".into(),
            ));
        }
        Ok(Self { domain, values })
    }

    pub fn constant(domain: Arc<GridDomain>, c: f64) -> Self {
        let n = domain.cell_count();
        Self {
            domain,
            values: vec![c; n],
        }
    }

    pub fn zeros(domain: Arc<GridDomain>) -> Self {
        Self::constant(domain, 0.0)
    }

    /// Samples f at the cell centres.
    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..domain.cell_count())
            .map(|k| {
                let (x, y) = domain.cell_xy(k);
                f(x, y)
            })
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at grid node (i, j), zero outside the mask.
    pub fn at(&self, i: i64, j: i64) -> f64 {
        self.domain.unknown(i, j).map_or(0.0, |k| self.values[k])
    }

    /// h² Σ values.
    pub fn integral(&self) -> f64 {
        let h2 = self.domain.h() * self.domain.h();
        h2 * self.values.iter().sum::<f64>()
    }

    pub fn same_domain(&self, other: &GridField) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) || self.domain == other.domain
    }

    /// Applies f cellwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.domain.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }
}

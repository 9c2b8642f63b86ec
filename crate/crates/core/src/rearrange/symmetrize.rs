//! Distribution functions and rearrangements of grid fields.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::plate_fd::GridField;

/// Volumes of the superlevel sets {u > a}, exact in the discrete measure h² · count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    /// Distinct values in decreasing order.
    pub thresholds: Vec<f64>,
    /// Number of cells strictly above each threshold.
    pub counts: Vec<usize>,
    /// Measure of one cell.
    pub cell_measure: f64,
    /// Total number of cells.
    pub total: usize,
}

impl DistributionFunction {
    fn from_sorted(values: &[f64], cell_measure: f64) -> Self {
        let mut thresholds = Vec::new();
        let mut counts = Vec::new();
        for (k, &v) in values.iter().enumerate() {
            if thresholds.last() != Some(&v) {
                thresholds.push(v);
                counts.push(k);
            }
        }
        Self {
            thresholds,
            counts,
            cell_measure,
            total: values.len(),
        }
    }

    /// Measures μ at each threshold, nondecreasing.
    pub fn measures(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 * self.cell_measure)
            .collect()
    }

    /// Total measure of the domain.
    pub fn total_measure(&self) -> f64 {
        self.total as f64 * self.cell_measure
    }

    /// μ(a) = measure of {u > a}.
    pub fn measure(&self, a: f64) -> f64 {
        let above = self.thresholds.partition_point(|&t| t > a);
        let count = if above == self.thresholds.len() {
            self.total
        } else {
            self.counts[above]
        };
        count as f64 * self.cell_measure
    }
}

/// Cell values sorted in decreasing order, ties broken by cell index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecreasingRearrangement {
    /// Rearranged values u⋆ on consecutive intervals of length `cell_measure`.
    pub values: Vec<f64>,
    /// Cell index that supplied each value.
    pub order: Vec<usize>,
    pub cell_measure: f64,
}

impl DecreasingRearrangement {
    /// u⋆(z) for z in [0, V(Ω)); zero beyond the end.
    pub fn value_at(&self, z: f64) -> f64 {
        if z < 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let k = (z / self.cell_measure).floor() as usize;
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// Length of the interval carrying the profile.
    pub fn total_measure(&self) -> f64 {
        self.values.len() as f64 * self.cell_measure
    }

    /// Measure of the set where the input is positive.
    pub fn positive_measure(&self) -> f64 {
        self.values.partition_point(|&v| v > 0.0) as f64 * self.cell_measure
    }

    pub fn integral(&self) -> f64 {
        self.cell_measure * self.values.iter().sum::<f64>()
    }

    pub fn distribution(&self) -> DistributionFunction {
        DistributionFunction::from_sorted(&self.values, self.cell_measure)
    }
}

/// Piecewise-constant radial profile on the disk with the same area as the domain.
/// The i-th largest value occupies the annulus between radii √((i−1)·m/π) and √(i·m/π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub values: Vec<f64>,
    pub cell_measure: f64,
}

impl RadialProfile {
    /// Outer radius of the i-th annulus (i = 0 gives the centre).
    pub fn radius(&self, i: usize) -> f64 {
        (i as f64 * self.cell_measure / PI).sqrt()
    }

    /// Outer radii of all annuli.
    pub fn radii(&self) -> Vec<f64> {
        (1..=self.values.len()).map(|i| self.radius(i)).collect()
    }

    /// Radius of the equal-area disk.
    pub fn outer_radius(&self) -> f64 {
        self.radius(self.values.len())
    }

    /// Radius splitting the i-th annulus (0-based) into halves of equal area.
    pub fn mid_radius(&self, i: usize) -> f64 {
        ((i as f64 + 0.5) * self.cell_measure / PI).sqrt()
    }

    /// Profile value at radius r; zero outside the disk.
    pub fn value_at(&self, r: f64) -> f64 {
        let k = (PI * r * r / self.cell_measure).floor() as usize;
        self.values.get(k).copied().unwrap_or(0.0)
    }

    pub fn integral(&self) -> f64 {
        self.cell_measure * self.values.iter().sum::<f64>()
    }

    pub fn distribution(&self) -> DistributionFunction {
        DistributionFunction::from_sorted(&self.values, self.cell_measure)
    }
}

fn cell_measure(field: &GridField) -> f64 {
    let h = field.domain().h();
    h * h
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

/// Distribution function μ(a) = h² · #{cells with u > a}.
pub fn distribution(field: &GridField) -> DistributionFunction {
    let mut values = field.values().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    DistributionFunction::from_sorted(&values, cell_measure(field))
}

/// One-dimensional decreasing rearrangement on [0, V(Ω)].
pub fn decreasing_rearrangement_1d(field: &GridField) -> DecreasingRearrangement {
    let order = sorted_order(field.values());
    let values = order.iter().map(|&k| field.values()[k]).collect();
    DecreasingRearrangement {
        values,
        order,
        cell_measure: cell_measure(field),
    }
}

/// Schwarz symmetrization onto the disk of equal discrete area.
pub fn schwarz_symmetrize(field: &GridField) -> RadialProfile {
    let r = decreasing_rearrangement_1d(field);
    RadialProfile {
        values: r.values,
        cell_measure: r.cell_measure,
    }
}

//! Alternating bang-bang load iteration ρ ← sign(u).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{GridDomain, GridField};
use super::operator::PlateOperator;
use crate::error::{PlateError, Result};

/// Why [`optimize_load`] stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    LoadUnchanged,
    SmallGain,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LoadOptimization {
    /// Final bang-bang load.
    pub load: GridField,
    /// Deflection under the final load.
    pub deflection: GridField,
    /// Compliance after each solve.
    pub trace: Vec<f64>,
    /// Number of solves performed.
    pub iterations: usize,
    pub stop: StopReason,
}

/// Runs the iteration from the constant load ρ ≡ 1.
pub fn optimize_load(
    domain: &Arc<GridDomain>,
    sigma: f64,
    max_iters: usize,
    tol: f64,
) -> Result<LoadOptimization> {
    optimize_load_from(
        &GridField::constant(domain.clone(), 1.0),
        sigma,
        max_iters,
        tol,
    )
}

/// Runs the iteration from a given load; sign(0) keeps the previous load value.
pub fn optimize_load_from(
    initial: &GridField,
    sigma: f64,
    max_iters: usize,
    tol: f64,
) -> Result<LoadOptimization> {
    if max_iters == 0 {
        return Err(PlateError::Config("max_iters must be at least 1".into()));
    }
    if !(tol >= 0.0) {
        return Err(PlateError::Config(format!(
            "tolerance {tol} must be nonnegative"
        )));
    }
    let op = PlateOperator::new(initial.domain().clone(), sigma)?;
    let mut load = initial.clone();
    let mut trace = Vec::new();
    loop {
        let (u, report) = op.solve(&load)?;
        let gain = trace.last().map(|&last| report.compliance - last);
        trace.push(report.compliance);
        let next: Vec<f64> = u
            .values()
            .iter()
            .zip(load.values())
            .map(|(&v, &prev)| {
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    prev
                }
            })
            .collect();
        let unchanged = next.as_slice() == load.values();
        let stop = if unchanged {
            Some(StopReason::LoadUnchanged)
        } else if gain.is_some_and(|g| g < tol) {
            Some(StopReason::SmallGain)
        } else if trace.len() >= max_iters {
            Some(StopReason::IterationLimit)
        } else {
            None
        };
        if let Some(stop) = stop {
            let iterations = trace.len();
            return Ok(LoadOptimization {
                load,
                deflection: u,
                trace,
                iterations,
                stop,
            });
        }
        load = GridField::new(load.domain().clone(), next)?;
    }
}

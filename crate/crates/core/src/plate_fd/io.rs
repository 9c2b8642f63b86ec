//! Shape corpora, solve records and plot output.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::GridField;
use super::operator::SolveReport;
use super::shape::{ShapeKind, ShapeParams, ShapeSpec};
use crate::error::{PlateError, Result};

/// One JSON output line per solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub shape: String,
    pub h: f64,
    pub sigma: f64,
    pub compliance: f64,
    pub mean_deflection: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl SolveRecord {
    pub fn new(spec: &ShapeSpec, h: f64, sigma: f64, report: &SolveReport) -> Self {
        Self {
            shape: spec.kind.name().to_string(),
            h,
            sigma,
            compliance: report.compliance,
            mean_deflection: report.mean_deflection,
            energy: report.energy,
            residual: report.residual,
            iterations: report.iterations,
        }
    }
}

/// Parses a JSON array of shape records.
pub fn parse_corpus(text: &str) -> Result<Vec<ShapeSpec>> {
    let specs: Vec<ShapeSpec> =
        serde_json::from_str(text).map_err(|e| PlateError::Config(format!("corpus: {e}")))?;
    for s in &specs {
        s.build()?;
        if let Some(h) = s.h {
            if !(h > 0.0) || !h.is_finite() {
                return Err(PlateError::Config(format!(
                    "grid spacing {h} must be positive"
                )));
            }
        }
    }
    Ok(specs)
}

pub fn load_corpus(path: &Path) -> Result<Vec<ShapeSpec>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PlateError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_corpus(&text)
}

/// Disk, square, 3:1 rectangle, 2:1 ellipse, annulus and two equal disks, all of the given area.
pub fn default_corpus(area: f64, h: f64) -> Vec<ShapeSpec> {
    [
        ShapeKind::Disk,
        ShapeKind::Square,
        ShapeKind::Rectangle,
        ShapeKind::Ellipse,
        ShapeKind::Annulus,
        ShapeKind::TwoDisks,
    ]
    .into_iter()
    .map(|k| {
        ShapeSpec::new(k, area)
            .with_params(ShapeParams::default())
            .with_h(h)
    })
    .collect()
}

/// Writes `x,y,u` rows for every interior cell.
pub fn write_field_csv<W: Write>(field: &GridField, mut out: W) -> std::io::Result<()> {
    writeln!(out, "x,y,u")?;
    let dom = field.domain();
    for (k, v) in field.values().iter().enumerate() {
        let (x, y) = dom.cell_xy(k);
        writeln!(out, "{x},{y},{v}")?;
    }
    Ok(())
}

//! Finite-difference clamped plates on rasterized planar domains.

mod grid;
mod io;
mod operator;
mod optimize;
mod shape;

pub use grid::{
    rasterize, rasterize_shape, BoundaryTreatment, GridDomain, GridField, FRACTION_SAMPLES,
    GRID_MARGIN, MIN_CELLS,
};
pub use io::{default_corpus, load_corpus, parse_corpus, write_field_csv, SolveRecord};
pub use operator::{
    evaluate, sigma_guard, solve_plate, PlateOperator, SolveReport, CG_CAP_FACTOR, CG_TOLERANCE,
};
pub use optimize::{optimize_load, optimize_load_from, LoadOptimization, StopReason};
pub use shape::{
    Shape, ShapeKind, ShapeParams, ShapeSpec, DEFAULT_ELLIPSE_ASPECT, DEFAULT_GAP_RATIO, DEFAULT_H,
    DEFAULT_INNER_RATIO, DEFAULT_RECTANGLE_ASPECT,
};

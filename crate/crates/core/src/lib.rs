//! Numerical laboratory for the clamped-plate compliance problem.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod closed_form;
pub mod compressed_two_ball;
pub mod error;
pub mod geometry;
pub mod plate_fd;
pub mod radial_solver;
pub mod rearrange;
pub mod specfun;
pub mod verify;

pub use error::{PlateError, Result};

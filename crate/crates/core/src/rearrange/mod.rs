//! Rearrangements of grid fields and comparison predicates built on them.

mod compare;
mod poisson;
mod symmetrize;

pub use compare::{
    calibrate_allowance, discrete_gradient, discrete_laplacian, signed_talenti_check,
    talenti_compare, AllowanceConstants, Check, ComparisonReport, OrderMargin, CALIBRATION_SAFETY,
    CALIBRATION_SPACINGS, CRITICAL_GRADIENT, CRITICAL_SET_WARNING, FROZEN_ALLOWANCE,
    NEGATIVITY_TOLERANCE, ROUNDOFF,
};
pub use poisson::{RadialPoisson, ANNULUS_QUADRATURE};
pub use symmetrize::{
    decreasing_rearrangement_1d, distribution, schwarz_symmetrize, DecreasingRearrangement,
    DistributionFunction, RadialProfile,
};

//! Constant-curvature primitives: the metric factor, geodesic-ball volumes,
//! sphere areas and the volume-splitting complement radius.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PlateError, Result};
use crate::specfun::gamma;

/// A simply connected space form: Euclidean ℝᴺ, the round sphere 𝕊² or the hyperbolic plane ℍ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    curvature: i8,
    dimension: usize,
}

impl Space {
    pub fn new(curvature: i8, dimension: usize) -> Result<Self> {
        if !(-1..=1).contains(&curvature) {
            return Err(PlateError::Domain(format!(
                "curvature {curvature} not in {{-1, 0, 1}}"
            )));
        }
        if dimension == 0 {
            return Err(PlateError::Domain("dimension must be at least 1".into()));
        }
        if curvature != 0 && dimension != 2 {
            return Err(PlateError::UnsupportedGeometry {
                curvature,
                dimension,
            });
        }
        Ok(Self {
            curvature,
            dimension,
        })
    }

    pub fn flat(dimension: usize) -> Result<Self> {
        Self::new(0, dimension)
    }

    pub fn sphere() -> Self {
        Self {
            curvature: 1,
            dimension: 2,
        }
    }

    pub fn hyperbolic() -> Self {
        Self {
            curvature: -1,
            dimension: 2,
        }
    }

    pub fn curvature(&self) -> i8 {
        self.curvature
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_flat(&self) -> bool {
        self.curvature == 0
    }

    /// Checks that `r` is an admissible geodesic radius.
    pub fn check_radius(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(PlateError::Domain(format!(
                "radius {r} must be finite and nonnegative"
            )));
        }
        if self.curvature == 1 && r > PI {
            return Err(PlateError::Domain(format!(
                "radius {r} exceeds pi on the sphere"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.curvature {
            0 => write!(f, "flat(N={})", self.dimension),
            1 => write!(f, "sphere"),
            _ => write!(f, "hyperbolic"),
        }
    }
}

/// Parses `flat`, `sphere` or `hyperbolic`; flat spaces default to dimension 2.
impl FromStr for Space {
    type Err = PlateError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "flat" | "euclidean" => Space::flat(2),
            "sphere" | "spherical" => Ok(Space::sphere()),
            "hyperbolic" => Ok(Space::hyperbolic()),
            other => Err(PlateError::Config(format!("unknown space '{other}'"))),
        }
    }
}

/// A geodesic ball of given radius in a space form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub space: Space,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(space: Space, radius: f64) -> Result<Self> {
        space.check_radius(radius)?;
        if radius == 0.0 || (space.curvature == 1 && radius >= PI) {
            return Err(PlateError::Domain(format!(
                "ball radius {radius} out of range"
            )));
        }
        Ok(Self { space, radius })
    }

    pub fn volume(&self) -> f64 {
        ball_volume_unchecked(self.space, self.radius)
    }
}

/// Surface area |S^{N−1}| of the unit sphere in ℝᴺ.
pub fn unit_sphere_area(n: usize) -> f64 {
    let half = 0.5 * n as f64;
    2.0 * PI.powf(half) / gamma(half)
}

/// The metric factor: sinh r, r or sin r.
pub fn sn(space: Space, r: f64) -> Result<f64> {
    space.check_radius(r)?;
    Ok(sn_unchecked(space, r))
}

pub(crate) fn sn_unchecked(space: Space, r: f64) -> f64 {
    match space.curvature {
        0 => r,
        1 => r.sin().max(0.0),
        _ => r.sinh(),
    }
}

/// Volume of the geodesic ball of radius r.
pub fn ball_volume(space: Space, r: f64) -> Result<f64> {
    space.check_radius(r)?;
    Ok(ball_volume_unchecked(space, r))
}

pub(crate) fn ball_volume_unchecked(space: Space, r: f64) -> f64 {
    match space.curvature {
        0 => {
            let n = space.dimension;
            unit_sphere_area(n) * r.powi(n as i32) / n as f64
        }
        1 => 4.0 * PI * (0.5 * r).sin().powi(2),
        _ => 4.0 * PI * (0.5 * r).sinh().powi(2),
    }
}

/// Area of the geodesic sphere of radius r.
pub fn sphere_area(space: Space, r: f64) -> Result<f64> {
    space.check_radius(r)?;
    let n = space.dimension;
    Ok(unit_sphere_area(n) * sn_unchecked(space, r).powi(n as i32 - 1))
}

/// Radius b with V(B_a) + V(B_b) = V(B_R).
pub fn complement_radius(space: Space, big_r: f64, a: f64) -> Result<f64> {
    space.check_radius(big_r)?;
    space.check_radius(a)?;
    if a > big_r {
        return Err(PlateError::Domain(format!("a = {a} exceeds R = {big_r}")));
    }
    Ok(complement_radius_unchecked(space, big_r, a))
}

pub(crate) fn complement_radius_unchecked(space: Space, big_r: f64, a: f64) -> f64 {
    let (x, y) = (0.5 * big_r, 0.5 * a);
    match space.curvature {
        0 => {
            let n = space.dimension as i32;
            (big_r.powi(n) - a.powi(n)).max(0.0).powf(1.0 / n as f64)
        }
        1 => 2.0 * ((x - y).sin() * (x + y).sin()).max(0.0).sqrt().asin(),
        _ => 2.0 * ((x - y).sinh() * (x + y).sinh()).max(0.0).sqrt().asinh(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_curved_higher_dimensions() {
        assert!(matches!(
            Space::new(1, 3),
            Err(PlateError::UnsupportedGeometry { .. })
        ));
        assert!(Space::new(2, 2).is_err());
        assert!(Space::new(0, 0).is_err());
    }

    #[test]
    fn sphere_radius_guard() {
        assert!(sn(Space::sphere(), 3.5).is_err());
        assert!(sn(Space::flat(2).unwrap(), -1.0).is_err());
    }

    #[test]
    fn parse_space() {
        assert_eq!("sphere".parse::<Space>().unwrap(), Space::sphere());
        assert!("torus".parse::<Space>().is_err());
    }
}

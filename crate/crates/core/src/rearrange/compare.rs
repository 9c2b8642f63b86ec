//! Executable comparison predicates between a grid field and its radial counterpart.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poisson::RadialPoisson;
use super::symmetrize::{schwarz_symmetrize, RadialProfile};
use crate::error::{PlateError, Result};
use crate::plate_fd::{rasterize, solve_plate, GridDomain, GridField, ShapeKind, ShapeSpec};

/// Relative size of negative values tolerated in a field passed to [`talenti_compare`].
pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;
/// Fraction of cells with vanishing discrete gradient above which a warning is attached.
pub const CRITICAL_SET_WARNING: f64 = 0.05;
/// Gradients below this fraction of the largest one count as zero.
pub const CRITICAL_GRADIENT: f64 = 1e-9;
/// Relative round-off allowed when certifying monotonicity of the radial solution.
pub const ROUNDOFF: f64 = 1e-12;
/// Grid spacings of the disk runs used by [`calibrate_allowance`].
pub const CALIBRATION_SPACINGS: [f64; 3] = [1.0 / 32.0, 1.0 / 48.0, 1.0 / 64.0];
/// Factor applied to the largest normalized disk discrepancy during calibration.
pub const CALIBRATION_SAFETY: f64 = 2.0;

/// Constants C of the discretization allowance C · h · scale, one per kind of check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllowanceConstants {
    pub sup: f64,
    pub lp: f64,
    pub gradient: f64,
    pub signed: f64,
    pub flux: f64,
}

/// Allowance constants obtained once from [`calibrate_allowance`] and frozen.
pub const FROZEN_ALLOWANCE: AllowanceConstants = AllowanceConstants {
    sup: 0.53,
    lp: 0.38,
    gradient: 0.17,
    signed: 0.30,
    flux: 5.2,
};

/// One inequality: it passes when margin ≥ −allowance, with allowance = C · h · scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub margin: f64,
    pub scale: f64,
    pub allowance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, margin: f64, scale: f64, constant: f64, h: f64) -> Self {
        let allowance = constant * h * scale;
        Self {
            name: name.into(),
            margin,
            scale,
            allowance,
            passed: margin >= -allowance,
        }
    }

    /// |margin| / (h · scale), the quantity bounded by the allowance constant.
    pub fn normalized(&self, h: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.margin.abs() / (h * self.scale)
        }
    }
}

/// Margin of an Lᵖ or gradient inequality of a given order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderMargin {
    pub order: f64,
    pub margin: f64,
}

/// Outcome of a comparison predicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub h: f64,
    pub allowance_constants: AllowanceConstants,
    /// max over radii of u* − f (absent for the signed check).
    pub sup_violation: Option<f64>,
    /// p ↦ ∫ fᵖ − ∫ uᵖ.
    pub lp_margins: Vec<OrderMargin>,
    /// q ↦ ∫ |∇f|^q − ∫ |∇u|^q.
    pub gradient_margins: Vec<OrderMargin>,
    /// ∫ |v| − ∫ |u| (signed check only).
    pub signed_margin: Option<f64>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    /// Values of the radial solution at the annulus radii, centre first.
    #[serde(skip)]
    pub radial_nodes: Vec<f64>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Five-point Laplacian with zero extension outside the mask.
pub fn discrete_laplacian(field: &GridField) -> GridField {
    let d = field.domain();
    let h2 = d.h() * d.h();
    let values = (0..d.cell_count())
        .map(|k| {
            let (i, j) = d.cell_ij(k);
            let around =
                field.at(i + 1, j) + field.at(i - 1, j) + field.at(i, j + 1) + field.at(i, j - 1);
            (around - 4.0 * field.values()[k]) / h2
        })
        .collect();
    GridField::new(d.clone(), values).expect("finite field gives finite Laplacian")
}

/// Centred differences, one-sided where a neighbour lies outside the mask, zero where both do.
pub fn discrete_gradient(field: &GridField) -> Vec<[f64; 2]> {
    let d = field.domain();
    let h = d.h();
    let axis = |k: usize, i: i64, j: i64, di: i64, dj: i64| {
        let c = field.values()[k];
        let fwd = d.unknown(i + di, j + dj).map(|m| field.values()[m]);
        let bwd = d.unknown(i - di, j - dj).map(|m| field.values()[m]);
        match (fwd, bwd) {
            (Some(f), Some(b)) => (f - b) / (2.0 * h),
            (Some(f), None) => (f - c) / h,
            (None, Some(b)) => (c - b) / h,
            (None, None) => 0.0,
        }
    };
    (0..d.cell_count())
        .map(|k| {
            let (i, j) = d.cell_ij(k);
            [axis(k, i, j, 1, 0), axis(k, i, j, 0, 1)]
        })
        .collect()
}

fn check_domain(domain: &GridDomain, u: &GridField) -> Result<()> {
    if **u.domain() == *domain {
        Ok(())
    } else {
        Err(PlateError::DomainMismatch)
    }
}

fn validate_orders(orders: &[f64], upper: f64, what: &str) -> Result<()> {
    for &p in orders {
        if !(p > 0.0 && p <= upper) {
            return Err(PlateError::Domain(format!(
                "{what} order {p} must lie in (0, {upper}]"
            )));
        }
    }
    Ok(())
}

/// Radial solution of Δw = source where source is minus the symmetrization of `negated`.
fn radial_from_symmetrized(negated: &GridField) -> (RadialProfile, RadialPoisson) {
    let sym = schwarz_symmetrize(negated);
    let source = RadialProfile {
        values: sym.values.iter().map(|v| -v).collect(),
        cell_measure: sym.cell_measure,
    };
    let solution = RadialPoisson::solve(&source);
    (sym, solution)
}

fn gradient_norms(u: &GridField) -> Vec<f64> {
    discrete_gradient(u)
        .iter()
        .map(|g| g[0].hypot(g[1]))
        .collect()
}

/// Compares a nonnegative field u on Ω with the solution f of Δf = F on the equal-area disk,
/// where −F is the Schwarz symmetrization of −Δu.
pub fn talenti_compare(
    domain: &GridDomain,
    u: &GridField,
    p_list: &[f64],
    q_list: &[f64],
) -> Result<ComparisonReport> {
    check_domain(domain, u)?;
    validate_orders(p_list, f64::INFINITY, "Lp")?;
    validate_orders(q_list, 2.0, "gradient")?;
    let c = FROZEN_ALLOWANCE;
    let h = domain.h();
    let m = h * h;
    let largest = u.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let lowest = u.values().iter().copied().fold(0.0f64, f64::min);
    if lowest < -NEGATIVITY_TOLERANCE * largest {
        return Err(PlateError::Precondition(format!(
            "field must be nonnegative, found {lowest:e} against maximum {largest:e}"
        )));
    }
    let u = u.map(|v| v.max(0.0))?;
    let minus_lap = discrete_laplacian(&u).map(|v| -v)?;
    let (_, f) = radial_from_symmetrized(&minus_lap);
    let u_star = schwarz_symmetrize(&u);

    let mut checks = Vec::new();
    let sup_violation = u_star
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| v - f.value(u_star.mid_radius(i)))
        .fold(f64::NEG_INFINITY, f64::max);
    let u_max = u_star.values.first().copied().unwrap_or(0.0);
    checks.push(Check::new("sup", -sup_violation, u_max, c.sup, h));

    let mut lp_margins = Vec::new();
    for &p in p_list {
        let lhs = f.integrate(|v, _| v.abs().powf(p));
        let rhs = m * u.values().iter().map(|v| v.powf(p)).sum::<f64>();
        lp_margins.push(OrderMargin {
            order: p,
            margin: lhs - rhs,
        });
        checks.push(Check::new(format!("lp_{p}"), lhs - rhs, rhs, c.lp, h));
    }

    let grads = gradient_norms(&u);
    let mut gradient_margins = Vec::new();
    for &q in q_list {
        let lhs = f.integrate(|_, d| d.abs().powf(q));
        let rhs = m * grads.iter().map(|g| g.powf(q)).sum::<f64>();
        gradient_margins.push(OrderMargin {
            order: q,
            margin: lhs - rhs,
        });
        checks.push(Check::new(
            format!("gradient_{q}"),
            lhs - rhs,
            rhs,
            c.gradient,
            h,
        ));
    }

    let f_max = f.nodes.first().copied().unwrap_or(0.0).abs();
    let steps = f
        .nodes
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::new("f_decreasing", steps, f_max, ROUNDOFF / h, h));
    let interior = &f.nodes[..f.nodes.len() - 1];
    let lowest_f = interior.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check::new("f_positive", lowest_f, 0.0, 0.0, h));

    Ok(ComparisonReport {
        h,
        allowance_constants: c,
        sup_violation: Some(sup_violation),
        lp_margins,
        gradient_margins,
        signed_margin: None,
        checks,
        warnings: Vec::new(),
        radial_nodes: f.nodes,
    })
}

/// Compares ∫|u| with ∫|v| where −Δv = (−Δu)* on the equal-area disk and v vanishes on its rim.
pub fn signed_talenti_check(domain: &GridDomain, u: &GridField) -> Result<ComparisonReport> {
    check_domain(domain, u)?;
    let c = FROZEN_ALLOWANCE;
    let h = domain.h();
    let m = h * h;
    let f = discrete_laplacian(u).map(|v| -v)?;
    let (_, v) = radial_from_symmetrized(&f);

    let lhs = v.integrate(|w, _| w.abs());
    let rhs = m * u.values().iter().map(|w| w.abs()).sum::<f64>();
    let signed = lhs - rhs;
    let flux = v.boundary_flux();
    let source_mass = m * f.values().iter().map(|w| w.abs()).sum::<f64>();
    let isoperimetric = domain.boundary_length() / (2.0 * (PI * domain.area()).sqrt());

    let checks = vec![
        Check::new("signed_l1", signed, rhs, c.signed, h),
        Check::new(
            "zero_flux",
            -flux.abs(),
            source_mass * isoperimetric,
            c.flux,
            h,
        ),
    ];

    let mut warnings = Vec::new();
    let grads = gradient_norms(u);
    let top = grads.iter().copied().fold(0.0f64, f64::max);
    let flat = grads
        .iter()
        .filter(|&&g| g <= CRITICAL_GRADIENT * top)
        .count();
    let fraction = flat as f64 / grads.len() as f64;
    if fraction > CRITICAL_SET_WARNING {
        warnings.push(format!(
            "{:.1}% of cells have vanishing discrete gradient; the comparison assumes a negligible critical set",
            100.0 * fraction
        ));
    }

    Ok(ComparisonReport {
        h,
        allowance_constants: c,
        sup_violation: None,
        lp_margins: Vec::new(),
        gradient_margins: Vec::new(),
        signed_margin: Some(signed),
        checks,
        warnings,
        radial_nodes: v.nodes,
    })
}

/// Largest normalized discrepancy |margin| / (h · scale) per kind of check over disk runs
/// (plate solution with unit load), multiplied by [`CALIBRATION_SAFETY`].
pub fn calibrate_allowance(spacings: &[f64]) -> Result<AllowanceConstants> {
    let mut out = AllowanceConstants {
        sup: 0.0,
        lp: 0.0,
        gradient: 0.0,
        signed: 0.0,
        flux: 0.0,
    };
    for &h in spacings {
        let domain = Arc::new(rasterize(&ShapeSpec::new(ShapeKind::Disk, PI), h)?);
        let (u, _) = solve_plate(&domain, &GridField::constant(domain.clone(), 1.0), 0.0)?;
        let t = talenti_compare(&domain, &u, &[1.0, 2.0], &[1.0, 2.0])?;
        let s = signed_talenti_check(&domain, &u)?;
        for check in t.checks.iter().chain(&s.checks) {
            let n = CALIBRATION_SAFETY * check.normalized(h);
            let slot = match check.name.as_str() {
                "sup" => &mut out.sup,
                "signed_l1" => &mut out.signed,
                "zero_flux" => &mut out.flux,
                name if name.starts_with("lp_") => &mut out.lp,
                name if name.starts_with("gradient_") => &mut out.gradient,
                _ => continue,
            };
            *slot = slot.max(n);
        }
    }
    Ok(out)
}

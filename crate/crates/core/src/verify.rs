//! Acceptance checks over all modules, one function per criterion.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::closed_form::{
    ball_deflection, ball_mean_deflection, twoball_abs_load, twoball_constant_load, TwoBallConfig,
};
use crate::compressed_two_ball::{
    compressed_energy, disk_buckling_sigma, energy_slope_at_one, sigma_threshold_scan,
    DEFAULT_A_GRID, DEFAULT_SIGMA_GRID,
};
use crate::error::Result;
use crate::geometry::Space;
use crate::plate_fd::{
    default_corpus, optimize_load, rasterize, solve_plate, GridDomain, GridField, ShapeKind,
    ShapeSpec, SolveReport,
};
use crate::radial_solver::{profile_functionals, solve_radial, RadialProblem, RadialSolution};
use crate::rearrange::{
    decreasing_rearrangement_1d, distribution, schwarz_symmetrize, signed_talenti_check,
    talenti_compare,
};

/// Grid spacing of the corpus runs.
pub const CORPUS_H: f64 = 1.0 / 64.0;
/// Spacings of the disk mesh-convergence study.
pub const CONVERGENCE_SPACINGS: [f64; 4] = [1.0 / 32.0, 1.0 / 48.0, 1.0 / 64.0, 1.0 / 96.0];
/// Required observed order of the disk mean deflection.
pub const REQUIRED_ORDER: f64 = 1.5;
/// Iteration cap and gain tolerance of the load optimization runs.
pub const OPTIMIZE_MAX_ITERS: usize = 20;
pub const OPTIMIZE_TOL: f64 = 1e-12;
pub const CRITERIA: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub criteria: Vec<CriterionResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

struct Builder {
    id: u8,
    name: &'static str,
    parts: Vec<(String, bool)>,
    metrics: BTreeMap<String, f64>,
}

impl Builder {
    fn new(id: u8, name: &'static str) -> Self {
        Self {
            id,
            name,
            parts: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn part(&mut self, label: impl Into<String>, ok: bool) {
        self.parts.push((label.into(), ok));
    }

    fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    fn finish(self) -> CriterionResult {
        let passed = self.parts.iter().all(|(_, ok)| *ok);
        let failed: Vec<&str> = self
            .parts
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(l, _)| l.as_str())
            .collect();
        let summary = if passed {
            format!("{} checks passed", self.parts.len())
        } else {
            format!("failed: {}", failed.join("; "))
        };
        CriterionResult {
            id: self.id,
            name: self.name.into(),
            passed,
            summary,
            metrics: self.metrics,
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn corpus_domains() -> Result<Vec<(ShapeSpec, Arc<GridDomain>)>> {
    default_corpus(PI, CORPUS_H)
        .into_iter()
        .map(|spec| {
            let d = Arc::new(rasterize(&spec, CORPUS_H)?);
            Ok((spec, d))
        })
        .collect()
}

fn unit_solve(d: &Arc<GridDomain>) -> Result<(GridField, SolveReport)> {
    solve_plate(d, &GridField::constant(d.clone(), 1.0), 0.0)
}

/// Radial solver against the Euclidean ball deflection and its mean.
pub fn closed_form_oracle() -> Result<CriterionResult> {
    let mut b = Builder::new(1, "closed-form oracle");
    for n in 1..=3usize {
        let nf = n as f64;
        let sol = RadialSolution::solve(&RadialProblem::clamped(n, 1.0, 0.0)?)?;
        let worst = (0..10)
            .map(|k| {
                let r = k as f64 / 9.0;
                (sol.value(r) - (1.0 - r * r).powi(2) / (8.0 * nf * (nf + 2.0))).abs()
            })
            .fold(0.0, f64::max);
        b.metric(format!("n{n}_profile_error"), worst);
        b.part(
            format!("N={n} profile error {worst:.2e} > 1e-8"),
            worst <= 1e-8,
        );
        let quad =
            profile_functionals(&solve_radial(&RadialProblem::clamped(n, 1.0, 0.0)?)?).integral_psi;
        let formula = ball_mean_deflection(Space::flat(n)?, 1.0)?;
        let err = (quad - formula).abs();
        b.metric(format!("n{n}_mean_error"), err);
        b.part(
            format!("N={n} mean deflection error {err:.2e} > 1e-10"),
            err <= 1e-10,
        );
    }
    let quad2 =
        profile_functionals(&solve_radial(&RadialProblem::clamped(2, 1.0, 0.0)?)?).integral_psi;
    let err = (quad2 - PI / 192.0).abs();
    b.metric("n2_mean_vs_pi_over_192", err);
    b.part(
        format!("N=2 mean deflection differs from π/192 by {err:.2e}"),
        err <= 1e-10,
    );
    Ok(b.finish())
}

/// Curved mean deflections approach the flat value as the radius shrinks.
pub fn curved_limits() -> Result<CriterionResult> {
    let mut b = Builder::new(2, "curved limits");
    for (label, space) in [
        ("sphere", Space::sphere()),
        ("hyperbolic", Space::hyperbolic()),
    ] {
        let mut prev = f64::INFINITY;
        for r in [1e-1, 3e-2, 1e-2] {
            let ratio = ball_mean_deflection(space, r)? / ball_mean_deflection(Space::flat(2)?, r)?;
            let gap = (ratio - 1.0).abs();
            b.part(
                format!("{label} ratio gap not shrinking at R={r}"),
                gap < prev,
            );
            prev = gap;
            if r == 1e-2 {
                b.metric(format!("{label}_ratio_gap"), gap);
                b.part(
                    format!("{label} ratio gap {gap:.2e} > 1e-3 at R=1e-2"),
                    gap <= 1e-3,
                );
            }
        }
        let centre =
            ball_deflection(space, 1e-2, 0.0)? / ball_deflection(Space::flat(2)?, 1e-2, 0.0)?;
        b.metric(format!("{label}_centre_ratio"), centre);
    }
    Ok(b.finish())
}

/// 𝓔′(a) < 0 on 200 points and agreement with central differences.
pub fn twoball_monotonicity() -> Result<CriterionResult> {
    let mut b = Builder::new(3, "two-ball monotonicity");
    for (label, space) in [
        ("flat", Space::flat(2)?),
        ("sphere", Space::sphere()),
        ("hyperbolic", Space::hyperbolic()),
    ] {
        let big_r = 1.0;
        let energy = |a: f64| -> Result<f64> {
            Ok(twoball_constant_load(&TwoBallConfig::new(space, big_r, a)?)?.energy)
        };
        let mut max_slope = f64::NEG_INFINITY;
        let mut worst = 0.0f64;
        for k in 1..=200 {
            let a = big_r * k as f64 / 201.0;
            let sol = twoball_constant_load(&TwoBallConfig::new(space, big_r, a)?)?;
            max_slope = max_slope.max(sol.energy_derivative);
            let h = 1e-4 * a.min(big_r - a);
            let fd = (energy(a + h)? - energy(a - h)?) / (2.0 * h);
            worst = worst.max(relative(fd, sol.energy_derivative));
        }
        b.metric(format!("{label}_max_derivative"), max_slope);
        b.metric(format!("{label}_fd_relative_error"), worst);
        b.part(
            format!("{label} derivative reaches {max_slope:.2e}"),
            max_slope < 0.0,
        );
        b.part(
            format!("{label} central-difference mismatch {worst:.2e} > 1e-6"),
            worst <= 1e-6,
        );
    }
    Ok(b.finish())
}

/// Energies of the two-ball problem with a load of unknown sign.
pub fn variable_load() -> Result<CriterionResult> {
    let mut b = Builder::new(4, "variable-load energies");
    let big_r: f64 = 1.0;
    let target = -PI * big_r.powi(6) / 384.0;
    let worst = (0..50)
        .map(|k| {
            let a = big_r * k as f64 / 49.0;
            twoball_abs_load(2, big_r, a).map(|s| (s.energy - target).abs())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    b.metric("n2_constant_deviation", worst);
    b.part(
        format!("N=2 energy deviates from −πR⁶/384 by {worst:.2e}"),
        worst <= 1e-12,
    );

    let grid: Vec<f64> = (0..=200).map(|k| big_r * k as f64 / 200.0).collect();
    let e1: Vec<f64> = grid
        .iter()
        .map(|&a| twoball_abs_load(1, big_r, a).map(|s| s.energy))
        .collect::<Result<_>>()?;
    let min1 = e1.iter().copied().fold(f64::INFINITY, f64::min);
    let endpoint = -big_r.powi(5) / 45.0;
    let ends = (e1[0] - endpoint).abs().max((e1[200] - endpoint).abs());
    b.metric("n1_minimum", min1);
    b.metric("n1_endpoint_error", ends);
    b.part(
        format!("N=1 endpoint energies differ from −R⁵/45 by {ends:.2e}"),
        ends <= 1e-12,
    );
    b.part(
        "N=1 minimum is not at the endpoints",
        min1 >= endpoint - 1e-15,
    );

    let e3: Vec<f64> = grid
        .iter()
        .map(|&a| twoball_abs_load(3, big_r, a).map(|s| s.energy))
        .collect::<Result<_>>()?;
    let k3 = e3
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let argmin = grid[k3];
    let expected = 0.5f64.cbrt() * big_r;
    b.metric("n3_argmin", argmin);
    b.part(
        format!("N=3 argmin {argmin} not within one step of {expected:.6}"),
        (argmin - expected).abs() <= big_r / 200.0,
    );
    Ok(b.finish())
}

/// ∂𝓔/∂a at a = 1 vanishes under compression.
pub fn compression_flatness() -> Result<CriterionResult> {
    let mut b = Builder::new(5, "compression flatness");
    for sigma in [0.0, 0.5, 1.0, 2.0] {
        let s = energy_slope_at_one(sigma)?;
        b.metric(format!("slope_sigma_{sigma}"), s);
        b.part(format!("slope {s:.2e} at σ={sigma}"), s.abs() <= 1e-3);
    }
    Ok(b.finish())
}

/// Compression threshold estimate and the disk buckling value.
pub fn thresholds() -> Result<CriterionResult> {
    let mut b = Builder::new(6, "thresholds");
    let scan = sigma_threshold_scan(DEFAULT_A_GRID, DEFAULT_SIGMA_GRID)?;
    let buckling = disk_buckling_sigma();
    b.metric("sigma2", scan.threshold);
    b.metric("buckling", buckling);
    b.part(
        format!("σ₂ = {:.4} outside [2.7, 3.3]", scan.threshold),
        (2.7..=3.3).contains(&scan.threshold),
    );
    b.part(
        format!("buckling {buckling:.6} not 3.8317 ± 1e-4"),
        (buckling - 3.8317).abs() <= 1e-4,
    );
    b.part(
        "buckling does not round to 3.83",
        (buckling * 100.0).round() == 383.0,
    );
    Ok(b.finish())
}

/// Uncompressed energy from the radial machinery against the closed form.
pub fn compressed_consistency() -> Result<CriterionResult> {
    let mut b = Builder::new(7, "compressed/uncompressed consistency");
    let flat = Space::flat(2)?;
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let a = k as f64 / 20.0;
        let radial = compressed_energy(a, 0.0)?.energy;
        let closed = twoball_constant_load(&TwoBallConfig::new(flat, 1.0, a)?)?.energy;
        worst = worst.max((radial - closed).abs());
    }
    b.metric("max_difference", worst);
    b.part(format!("difference {worst:.2e} > 1e-8"), worst <= 1e-8);
    Ok(b.finish())
}

/// Finite-difference compliance of the corpus against the disk.
pub fn saint_venant() -> Result<CriterionResult> {
    let mut b = Builder::new(8, "Saint-Venant corpus");
    let mut compliance = Vec::new();
    for (spec, d) in corpus_domains()? {
        let (_, r) = unit_solve(&d)?;
        b.metric(format!("{}_compliance", spec.kind.name()), r.compliance);
        compliance.push((spec.kind, r.compliance));
    }
    let disk = compliance
        .iter()
        .find(|(k, _)| *k == ShapeKind::Disk)
        .map(|c| c.1)
        .unwrap_or(0.0);
    let error = (disk - PI / 192.0).abs();
    b.metric("disk_error", error);
    for (kind, c) in compliance.iter().filter(|(k, _)| *k != ShapeKind::Disk) {
        let margin = disk - c;
        b.metric(format!("{}_margin", kind.name()), margin);
        b.part(
            format!("{} margin {margin:.3e} ≤ 3 × {error:.3e}", kind.name()),
            margin > 3.0 * error,
        );
    }
    Ok(b.finish())
}

/// Bang-bang load iteration on the corpus.
pub fn optimal_load() -> Result<CriterionResult> {
    let mut b = Builder::new(9, "optimal-load iteration");
    for (spec, d) in corpus_domains()? {
        let name = spec.kind.name();
        let o = optimize_load(&d, 0.0, OPTIMIZE_MAX_ITERS, OPTIMIZE_TOL)?;
        let monotone = o.trace.windows(2).all(|w| w[1] >= w[0]);
        b.metric(format!("{name}_iterations"), o.iterations as f64);
        b.part(format!("{name} trace decreases"), monotone);
        b.part(
            format!("{name} used {} iterations", o.iterations),
            o.iterations <= OPTIMIZE_MAX_ITERS,
        );
        if spec.kind == ShapeKind::Disk {
            let fixed = o.load.values().iter().all(|&v| v == 1.0);
            b.part(
                "disk load is not fixed at 1 after one solve",
                fixed && o.iterations == 1,
            );
        }
    }
    Ok(b.finish())
}

/// Comparison predicates on the corpus and the signed check.
pub fn talenti_suite() -> Result<CriterionResult> {
    let mut b = Builder::new(10, "Talenti suite");
    for (spec, d) in corpus_domains()? {
        let name = spec.kind.name();
        let (u, _) = unit_solve(&d)?;
        let r = talenti_compare(&d, &u, &[1.0, 2.0], &[1.0, 2.0])?;
        for c in &r.checks {
            b.metric(format!("{name}_{}", c.name), c.margin);
            b.part(
                format!(
                    "{name} {} margin {:.3e} below −{:.3e}",
                    c.name, c.margin, c.allowance
                ),
                c.passed,
            );
        }
        let s = signed_talenti_check(&d, &u)?;
        for c in &s.checks {
            b.metric(format!("{name}_{}", c.name), c.margin);
            b.part(
                format!(
                    "{name} {} margin {:.3e} below −{:.3e}",
                    c.name, c.margin, c.allowance
                ),
                c.passed,
            );
        }
        if spec.kind == ShapeKind::Disk {
            let c = s.check("signed_l1").expect("signed check present");
            b.part(
                "disk signed margin exceeds the allowance",
                c.margin.abs() <= c.allowance,
            );
        }
    }
    let two = Arc::new(rasterize(
        &ShapeSpec::new(ShapeKind::TwoDisks, PI),
        CORPUS_H,
    )?);
    let load = GridField::from_fn(two.clone(), |x, _| if x > 0.0 { 1.0 } else { -1.0 })?;
    let (u, _) = solve_plate(&two, &load, 0.0)?;
    let s = signed_talenti_check(&two, &u)?;
    b.metric(
        "two_disks_signed_margin",
        s.signed_margin.unwrap_or(f64::NAN),
    );
    b.part("sign-changing two-disk check fails", s.passed());
    Ok(b.finish())
}

/// Least-squares slope of log(error) against log(h).
pub fn observed_order(spacings: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Equimeasurability, the energy identity, domain monotonicity and mesh convergence.
pub fn property_suite() -> Result<CriterionResult> {
    let mut b = Builder::new(11, "property suite");
    let mut identity = 0.0f64;
    let mut equimeasurable = true;
    for (_, d) in corpus_domains()? {
        let (u, r) = unit_solve(&d)?;
        identity = identity.max((r.mean_deflection + 2.0 * r.energy).abs() / r.mean_deflection);
        let mu = distribution(&u);
        equimeasurable &= decreasing_rearrangement_1d(&u).distribution() == mu;
        equimeasurable &= schwarz_symmetrize(&u).distribution() == mu;
    }
    b.metric("energy_identity_relative", identity);
    b.part("rearrangements are not equimeasurable", equimeasurable);
    b.part(
        format!("energy identity off by {identity:.2e}"),
        identity <= 1e-7,
    );

    let small = Arc::new(rasterize(
        &ShapeSpec::new(ShapeKind::Square, 2.0),
        CORPUS_H,
    )?);
    let large = Arc::new(rasterize(
        &ShapeSpec::new(ShapeKind::Square, 3.0),
        CORPUS_H,
    )?);
    let nested = (0..small.cell_count()).all(|k| {
        let (x, y) = small.cell_xy(k);
        large.shape().contains(x, y)
    });
    let (_, rs) = unit_solve(&small)?;
    let (_, rl) = unit_solve(&large)?;
    b.metric("nested_energy_small", rs.energy);
    b.metric("nested_energy_large", rl.energy);
    b.part("nested squares are not nested on the grid", nested);
    b.part(
        "energy of the smaller square is below the larger",
        rs.energy >= rl.energy,
    );

    let exact = PI / 192.0;
    let mut errors = Vec::new();
    for h in CONVERGENCE_SPACINGS {
        let d = Arc::new(rasterize(&ShapeSpec::new(ShapeKind::Disk, PI), h)?);
        let (_, r) = unit_solve(&d)?;
        let e = (r.mean_deflection - exact) / exact;
        b.metric(format!("disk_error_h{}", (1.0 / h).round()), e);
        errors.push(e);
    }
    let order = observed_order(&CONVERGENCE_SPACINGS, &errors);
    b.metric("disk_order", order);
    b.part(
        format!("disk convergence order {order:.2} < {REQUIRED_ORDER}"),
        order >= REQUIRED_ORDER,
    );
    Ok(b.finish())
}

/// Runs one criterion by number.
pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    match id {
        1 => closed_form_oracle(),
        2 => curved_limits(),
        3 => twoball_monotonicity(),
        4 => variable_load(),
        5 => compression_flatness(),
        6 => thresholds(),
        7 => compressed_consistency(),
        8 => saint_venant(),
        9 => optimal_load(),
        10 => talenti_suite(),
        11 => property_suite(),
        _ => Err(crate::PlateError::Domain(format!("no criterion {id}"))),
    }
}

/// Runs every criterion; a criterion that errors is reported as failed.
pub fn verify_all() -> VerificationReport {
    let criteria = CRITERIA
        .iter()
        .map(|&id| {
            run_criterion(id).unwrap_or_else(|e| CriterionResult {
                id,
                name: format!("criterion {id}"),
                passed: false,
                summary: format!("error: {e}"),
                metrics: BTreeMap::new(),
            })
        })
        .collect();
    VerificationReport { criteria }
}

use std::f64::consts::PI;

use platelab::closed_form::{ball_deflection, ball_mean_deflection};
use platelab::geometry::Space;
use platelab::radial_solver::{
    profile_functionals, solve_radial, RadialProblem, RadialProfile, RadialSolution,
};
use platelab::PlateError;
use proptest::prelude::*;

/// State (ψ, ψ′, w, w′) with w = Δψ for the planar radial equation Δw + σ²w = α.
type State = [f64; 4];

fn rhs(r: f64, y: State, sigma: f64, alpha: f64) -> State {
    [
        y[1],
        y[2] - y[1] / r,
        y[3],
        alpha - sigma * sigma * y[2] - y[3] / r,
    ]
}

/// RK4 integration from the origin using the regular Taylor start.
fn shoot(a: f64, sigma: f64, alpha: f64, w0: f64, steps: usize) -> Vec<(f64, State)> {
    let r0 = 1e-6 * a;
    let w2 = (alpha - sigma * sigma * w0) / 4.0;
    let mut y = [
        w0 * r0 * r0 / 4.0,
        w0 * r0 / 2.0,
        w0 + w2 * r0 * r0,
        2.0 * w2 * r0,
    ];
    let mut r = r0;
    let h = (a - r0) / steps as f64;
    let mut out = vec![(r, y)];
    for _ in 0..steps {
        let add = |y: State, k: State, s: f64| [0, 1, 2, 3].map(|i| y[i] + s * k[i]);
        let k1 = rhs(r, y, sigma, alpha);
        let k2 = rhs(r + 0.5 * h, add(y, k1, 0.5 * h), sigma, alpha);
        let k3 = rhs(r + 0.5 * h, add(y, k2, 0.5 * h), sigma, alpha);
        let k4 = rhs(r + h, add(y, k3, h), sigma, alpha);
        y = [0, 1, 2, 3].map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        r += h;
        out.push((r, y));
    }
    out
}

/// Shooting solution of the boundary-value problem: returns (r, ψ, ψ′) samples.
fn shooting_oracle(p: &RadialProblem, steps: usize) -> Vec<(f64, f64, f64)> {
    let base = shoot(p.a, p.sigma, p.alpha, 0.0, steps);
    let unit = shoot(p.a, p.sigma, 0.0, 1.0, steps);
    let (_, yb) = base[steps];
    let (_, yu) = unit[steps];
    let w0 = (p.slope_bc - yb[1]) / yu[1];
    let shift = -(yb[0] + w0 * yu[0]);
    base.iter()
        .zip(&unit)
        .map(|((r, b), (_, u))| (*r, b[0] + w0 * u[0] + shift, b[1] + w0 * u[1]))
        .collect()
}

#[test]
fn polynomial_examples() {
    let clamped = RadialSolution::solve(&RadialProblem::clamped(2, 1.0, 0.0).unwrap()).unwrap();
    let slope = RadialSolution::solve(&RadialProblem::unit_slope(2, 1.0, 0.0).unwrap()).unwrap();
    let zero = RadialSolution::solve(&RadialProblem::new(2, 1.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
    for k in 0..=20 {
        let r = k as f64 / 20.0;
        assert!((clamped.value(r) - (1.0 - r * r).powi(2) / 64.0).abs() < 1e-16);
        assert!((slope.value(r) - 0.5 * (r * r - 1.0)).abs() < 1e-16);
        assert_eq!(zero.value(r), 0.0);
    }
    assert_eq!(slope.boundary_laplacian(), 2.0);
}

#[test]
fn matches_ball_deflection_for_several_dimensions() {
    for n in 1..=3 {
        let space = Space::flat(n).unwrap();
        let profile = solve_radial(&RadialProblem::clamped(n, 1.0, 0.0).unwrap()).unwrap();
        let sol = RadialSolution::solve(&profile.problem).unwrap();
        for k in 1..=10 {
            let r = (k as f64 - 0.5) / 10.0;
            let expect = ball_deflection(space, 1.0, r).unwrap();
            assert!((sol.value(r) - expect).abs() < 1e-8);
        }
        for (r, v) in profile.nodes.iter().zip(&profile.values) {
            assert!((v - ball_deflection(space, 1.0, *r).unwrap()).abs() < 1e-12);
        }
        let f = profile_functionals(&profile);
        let mean = ball_mean_deflection(space, 1.0).unwrap();
        assert!((f.integral_psi - mean).abs() < 1e-10, "N={n}");
    }
}

#[test]
fn profile_invariants_hold() {
    for &(n, sigma, alpha, slope) in &[
        (2, 0.0, 1.0, 0.0),
        (3, 0.0, 1.0, 0.5),
        (2, 1.5, 1.0, 0.0),
        (2, 3.0, 0.0, 1.0),
        (2, 3.8, 1.0, -0.3),
    ] {
        let p = RadialProblem::new(n, 1.0, sigma, alpha, slope).unwrap();
        let prof = solve_radial(&p).unwrap();
        assert!(prof.nodes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(prof.nodes[0], 0.0);
        assert_eq!(*prof.nodes.last().unwrap(), 1.0);
        assert!(prof.derivatives[0].abs() < 1e-14);
        assert!(prof.values.last().unwrap().abs() < 1e-10);
        assert!((prof.derivatives.last().unwrap() - slope).abs() < 1e-10);
    }
}

#[test]
fn strong_equation_residual_is_small() {
    for &(sigma, alpha, slope) in &[(0.7, 1.0, 0.0), (2.5, 0.0, 1.0), (3.5, 1.0, 0.4)] {
        let p = RadialProblem::new(2, 1.0, sigma, alpha, slope).unwrap();
        let sol = RadialSolution::solve(&p).unwrap();
        let h = 1e-5;
        for k in 1..20 {
            let r = k as f64 / 20.0;
            let w = sol.laplacian(r);
            let dw = sol.laplacian_derivative(r);
            let d2w =
                (sol.laplacian_derivative(r + h) - sol.laplacian_derivative(r - h)) / (2.0 * h);
            let residual = d2w + dw / r + sigma * sigma * w - alpha;
            let scale = alpha.abs().max(sigma * sigma * w.abs()).max(1.0);
            assert!(residual.abs() < 1e-7 * scale, "σ={sigma} r={r}: {residual}");
            let dpsi = (sol.value(r + h) - sol.value(r - h)) / (2.0 * h);
            assert!((dpsi - sol.derivative(r)).abs() < 1e-8);
            let d2psi = (sol.derivative(r + h) - sol.derivative(r - h)) / (2.0 * h);
            assert!((d2psi + sol.derivative(r) / r - w).abs() < 1e-8);
        }
    }
}

#[test]
fn bessel_branch_agrees_with_shooting() {
    let steps = 4000;
    for &(a, sigma, alpha, slope) in &[
        (1.0, 0.5, 1.0, 0.0),
        (1.0, 2.0, 1.0, 0.0),
        (1.0, 3.5, 1.0, 0.0),
        (0.8, 3.0, 0.0, 1.0),
        (0.6, 1.0, 0.0, 1.0),
        (1.0, 3.8, 1.0, 0.2),
    ] {
        let p = RadialProblem::new(2, a, sigma, alpha, slope).unwrap();
        let sol = RadialSolution::solve(&p).unwrap();
        let oracle = shooting_oracle(&p, steps);
        let scale = oracle.iter().map(|s| s.1.abs()).fold(1e-3, f64::max);
        for &(r, psi, dpsi) in oracle.iter().step_by(97) {
            assert!((sol.value(r) - psi).abs() < 1e-6 * scale, "σ={sigma} r={r}");
            assert!(
                (sol.derivative(r) - dpsi).abs() < 1e-6 * scale.max(1.0),
                "σ={sigma} r={r}"
            );
        }
    }
}

#[test]
fn shooting_oracle_reproduces_polynomial_case() {
    let p = RadialProblem::clamped(2, 1.0, 0.0).unwrap();
    for (r, psi, _) in shooting_oracle(&p, 2000).into_iter().step_by(101) {
        assert!((psi - (1.0 - r * r).powi(2) / 64.0).abs() < 1e-9);
    }
}

#[test]
fn energy_identity_for_clamped_problems() {
    for &sigma in &[0.0, 0.5, 1.5, 3.0, 3.7] {
        let p = RadialProblem::clamped(2, 1.0, sigma).unwrap();
        let f = profile_functionals(&solve_radial(&p).unwrap());
        let rhs = f.dirichlet2 - sigma * sigma * f.dirichlet1;
        assert!(
            (f.integral_psi - rhs).abs() < 1e-7 * f.integral_psi.abs(),
            "σ={sigma}"
        );
        assert!(f.dirichlet1 >= 0.0 && f.dirichlet2 >= 0.0);
    }
}

#[test]
fn quadrature_matches_exact_integral() {
    for &(sigma, alpha, slope) in &[(0.0, 1.0, 0.0), (2.0, 1.0, 0.0), (3.0, 0.0, 1.0)] {
        let p = RadialProblem::new(2, 0.9, sigma, alpha, slope).unwrap();
        let sol = RadialSolution::solve(&p).unwrap();
        let f = profile_functionals(&solve_radial(&p).unwrap());
        assert!((f.integral_psi - sol.integral()).abs() < 1e-12 * sol.integral().abs().max(1e-3));
        assert!((f.boundary_laplacian - sol.boundary_laplacian()).abs() < 1e-14);
    }
}

#[test]
fn functional_examples() {
    let p = RadialProblem::clamped(2, 1.0, 0.0).unwrap();
    let f = profile_functionals(&solve_radial(&p).unwrap());
    assert!((f.integral_psi - PI / 192.0).abs() < 1e-15);
    let p = RadialProblem::unit_slope(2, 1.0, 0.0).unwrap();
    assert!(
        (profile_functionals(&solve_radial(&p).unwrap()).boundary_laplacian - 2.0).abs() < 1e-15
    );
    let p = RadialProblem::new(2, 1.0, 0.0, 0.0, 0.0).unwrap();
    let f = profile_functionals(&solve_radial(&p).unwrap());
    assert_eq!(
        (
            f.integral_psi,
            f.dirichlet1,
            f.dirichlet2,
            f.boundary_laplacian
        ),
        (0.0, 0.0, 0.0, 0.0)
    );
}

#[test]
fn guards() {
    assert!(matches!(
        RadialProblem::clamped(2, 1.0, 3.84),
        Err(PlateError::IllPosed { .. })
    ));
    assert!(matches!(
        RadialProblem::clamped(2, 0.5, 7.7),
        Err(PlateError::IllPosed { .. })
    ));
    assert!(RadialProblem::clamped(2, 0.5, 7.6).is_ok());
    assert!(matches!(
        RadialProblem::clamped(1, 1.0, 0.1),
        Err(PlateError::UnsupportedGeometry { .. })
    ));
    assert!(RadialProblem::new(2, 1.0, 0.0, 0.5, 0.0).is_err());
    assert!(RadialProblem::new(2, -1.0, 0.0, 1.0, 0.0).is_err());
    assert!(RadialProfile::sample(&RadialProblem::clamped(2, 1.0, 0.0).unwrap(), 2).is_err());
}

proptest! {
    #[test]
    fn boundary_conditions_hold(a in 0.1f64..2.0, frac in 0.0f64..0.99, alpha in 0usize..2, slope in -2.0f64..2.0) {
        let sigma = frac * 3.8317 / a;
        let p = RadialProblem::new(2, a, sigma, alpha as f64, slope).unwrap();
        let sol = RadialSolution::solve(&p).unwrap();
        let scale = sol.value(0.0).abs().max(a * slope.abs()).max(1e-3);
        prop_assert!(sol.value(a).abs() < 1e-10 * scale);
        prop_assert!((sol.derivative(a) - slope).abs() < 1e-10 * slope.abs().max(scale / a));
    }

    #[test]
    fn compression_increases_clamped_integral(s1 in 0.0f64..3.0, ds in 0.01f64..0.8) {
        let i1 = RadialSolution::solve(&RadialProblem::clamped(2, 1.0, s1).unwrap()).unwrap().integral();
        let i2 = RadialSolution::solve(&RadialProblem::clamped(2, 1.0, s1 + ds).unwrap()).unwrap().integral();
        prop_assert!(i2 > i1);
    }
}

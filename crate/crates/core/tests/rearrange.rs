#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::sync::Arc;

use platelab::plate_fd::{
    default_corpus, rasterize, solve_plate, GridDomain, GridField, ShapeKind, ShapeSpec,
};
use platelab::rearrange::{
    calibrate_allowance, decreasing_rearrangement_1d, discrete_gradient, discrete_laplacian,
    distribution, schwarz_symmetrize, signed_talenti_check, talenti_compare, RadialPoisson,
    RadialProfile, CALIBRATION_SPACINGS, FROZEN_ALLOWANCE,
};
use platelab::PlateError;
use proptest::prelude::*;

fn domain(kind: ShapeKind, h: f64) -> Arc<GridDomain> {
    Arc::new(rasterize(&ShapeSpec::new(kind, PI), h).unwrap())
}

fn plate(d: &Arc<GridDomain>) -> GridField {
    solve_plate(d, &GridField::constant(d.clone(), 1.0), 0.0)
        .unwrap()
        .0
}

fn disk_deflection(d: &Arc<GridDomain>) -> GridField {
    GridField::from_fn(d.clone(), |x, y| (1.0 - x * x - y * y).powi(2) / 64.0).unwrap()
}

#[test]
fn distribution_of_constant_field() {
    let d = domain(ShapeKind::Square, 1.0 / 16.0);
    let mu = distribution(&GridField::constant(d.clone(), 2.0));
    assert_eq!(mu.thresholds, vec![2.0]);
    assert_eq!(mu.measure(1.999), d.area());
    assert_eq!(mu.measure(2.0), 0.0);
    assert_eq!(mu.measure(5.0), 0.0);
    assert_eq!(mu.total_measure(), d.area());
}

#[test]
fn distribution_of_disk_deflection() {
    let h = 1.0 / 32.0;
    let d = domain(ShapeKind::Disk, h);
    let mu = distribution(&disk_deflection(&d));
    assert!((mu.measure(0.0) - PI).abs() < 2.0 * h * 2.0 * PI);
    assert_eq!(mu.measure(0.0), d.area());
    assert_eq!(mu.measure(1.0 / 64.0), 0.0);
    let measures = mu.measures();
    assert_eq!(measures[0], 0.0);
    assert!(measures.windows(2).all(|w| w[0] <= w[1]));
    assert!(mu.thresholds.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn distribution_matches_brute_force_count() {
    let d = domain(ShapeKind::Ellipse, 1.0 / 16.0);
    let u = GridField::from_fn(d.clone(), |x, y| ((3.0 * x).sin() * y).round_ties_even()).unwrap();
    let mu = distribution(&u);
    let m = d.h() * d.h();
    for a in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        let count = u.values().iter().filter(|&&v| v > a).count();
        assert_eq!(mu.measure(a), count as f64 * m, "a={a}");
    }
}

#[test]
fn rearrangement_sorts_with_index_ties() {
    let d = domain(ShapeKind::Square, 1.0 / 16.0);
    let mut values = vec![0.0; d.cell_count()];
    values[..3].copy_from_slice(&[3.0, 1.0, 2.0]);
    let r = decreasing_rearrangement_1d(&GridField::new(d.clone(), values).unwrap());
    assert_eq!(&r.values[..4], &[3.0, 2.0, 1.0, 0.0]);
    assert_eq!(&r.order[..5], &[0, 2, 1, 3, 4]);
    assert!(r.order[3..].windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sign_changing_values_fill_the_tail() {
    let d = domain(ShapeKind::Disk, 1.0 / 16.0);
    let u = GridField::from_fn(d.clone(), |x, _| x).unwrap();
    let r = decreasing_rearrangement_1d(&u);
    let positive = u.values().iter().filter(|&&v| v > 0.0).count() as f64 * d.h() * d.h();
    assert_eq!(r.positive_measure(), positive);
    let m = r.cell_measure;
    let mut z = positive + 0.5 * m;
    while z < r.total_measure() {
        assert!(r.value_at(z) <= 0.0);
        z += m;
    }
    assert!(r.value_at(0.5 * m) > 0.0);
}

#[test]
fn symmetrization_examples() {
    let d = domain(ShapeKind::Disk, 1.0 / 32.0);
    let u = disk_deflection(&d);
    let p = schwarz_symmetrize(&u);
    let mut sorted = u.values().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(p.values, sorted);
    for (i, &v) in p.values.iter().enumerate().step_by(37) {
        let r = p.mid_radius(i);
        assert!((v - (1.0 - r * r).powi(2) / 64.0).abs() < 0.05 / 64.0);
    }

    let c = schwarz_symmetrize(&GridField::constant(d.clone(), 0.7));
    assert!(c.values.iter().all(|&v| v == 0.7));
    assert!((c.outer_radius() - (d.area() / PI).sqrt()).abs() < 1e-14);

    let half = d.cell_count() / 2;
    let indicator = GridField::new(
        d.clone(),
        (0..d.cell_count())
            .map(|k| f64::from(u8::from(k % 2 == 0)))
            .collect(),
    )
    .unwrap();
    let p = schwarz_symmetrize(&indicator);
    let inner = ((d.cell_count() - half) as f64 * d.h() * d.h() / PI).sqrt();
    assert_eq!(p.value_at(0.999 * inner), 1.0);
    assert_eq!(p.value_at(1.001 * inner), 0.0);
    assert_eq!(p.radius(p.values.len()), p.outer_radius());
    assert_eq!(p.radii().len(), p.values.len());
}

#[test]
fn radial_poisson_reproduces_the_paraboloid() {
    let c = -3.0;
    let profile = RadialProfile {
        values: vec![c; 2000],
        cell_measure: 1.0 / 4096.0,
    };
    let f = RadialPoisson::solve(&profile);
    let big_r = f.outer_radius();
    for k in 0..=100 {
        let r = big_r * k as f64 / 100.0;
        let exact = (big_r * big_r - r * r) * c.abs() / 4.0;
        assert!((f.value(r) - exact).abs() < 1e-10, "r={r}");
        assert!((f.derivative(r) - c * r / 2.0).abs() < 1e-10, "r={r}");
    }
    let mass = f.integrate(|v, _| v);
    assert!((mass - PI * c.abs() * big_r.powi(4) / 8.0).abs() < 1e-12);
    assert!((f.boundary_flux() - c * PI * big_r * big_r).abs() < 1e-12);
    assert_eq!(f.value(2.0 * big_r), 0.0);
}

#[test]
fn radial_poisson_converges_for_smooth_sources() {
    let mut errors = Vec::new();
    for n in [400usize, 1600] {
        let m = PI / n as f64;
        let values = (0..n).map(|i| (i as f64 + 0.5) * m / PI).collect();
        let f = RadialPoisson::solve(&RadialProfile {
            values,
            cell_measure: m,
        });
        let err = (0..=50)
            .map(|k| {
                let r = k as f64 / 50.0;
                (f.value(r) - (r.powi(4) - 1.0) / 16.0).abs()
            })
            .fold(0.0, f64::max);
        errors.push(err);
    }
    assert!(errors[1] < errors[0] / 3.5, "{errors:?}");
    assert!(errors[1] < 1e-4);
}

#[test]
fn discrete_operators_on_quadratics() {
    let d = domain(ShapeKind::Square, 1.0 / 16.0);
    let u = GridField::from_fn(d.clone(), |x, y| x * x + 2.0 * y * y + x).unwrap();
    let lap = discrete_laplacian(&u);
    let grad = discrete_gradient(&u);
    for k in 0..d.cell_count() {
        let (i, j) = d.cell_ij(k);
        let (x, y) = d.cell_xy(k);
        let interior = [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .all(|(a, b)| d.is_interior(i + a, j + b));
        if interior {
            assert!((lap.values()[k] - 6.0).abs() < 1e-9);
            assert!((grad[k][0] - (2.0 * x + 1.0)).abs() < 1e-9);
            assert!((grad[k][1] - 4.0 * y).abs() < 1e-9);
        } else {
            assert!((grad[k][0] - (2.0 * x + 1.0)).abs() <= d.h() * 1.0001);
        }
    }
}

#[test]
fn talenti_equality_on_the_disk() {
    for h in [1.0 / 32.0, 1.0 / 64.0] {
        let d = domain(ShapeKind::Disk, h);
        for u in [disk_deflection(&d), plate(&d)] {
            let r = talenti_compare(&d, &u, &[1.0, 2.0], &[1.0, 2.0]).unwrap();
            assert!(r.passed(), "{:?}", r.checks);
            for c in r
                .checks
                .iter()
                .filter(|c| c.scale > 0.0 && c.name != "f_decreasing")
            {
                assert!(
                    c.margin.abs() <= c.allowance,
                    "{} at h={h}: {:?}",
                    c.name,
                    c
                );
            }
            assert_eq!(r.allowance_constants, FROZEN_ALLOWANCE);
        }
    }
}

#[test]
fn talenti_strict_on_the_square() {
    let d = domain(ShapeKind::Square, 1.0 / 64.0);
    let r = talenti_compare(&d, &plate(&d), &[1.0], &[2.0]).unwrap();
    assert!(r.passed());
    let lp = r.check("lp_1").unwrap();
    assert!(lp.margin > lp.allowance);
    let grad = r.check("gradient_2").unwrap();
    assert!(grad.margin > grad.allowance);
    assert_eq!(r.lp_margins[0].order, 1.0);
    assert_eq!(r.gradient_margins[0].order, 2.0);
}

#[test]
fn talenti_on_the_corpus_produces_decreasing_profiles() {
    for spec in default_corpus(PI, 1.0 / 64.0) {
        let d = Arc::new(rasterize(&spec, spec.spacing()).unwrap());
        let r = talenti_compare(&d, &plate(&d), &[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert!(
            r.radial_nodes.windows(2).all(|w| w[0] >= w[1]),
            "{}",
            spec.kind
        );
        assert!(r.check("f_decreasing").unwrap().passed);
        assert!(r.check("f_positive").unwrap().passed);
        assert!(r.passed(), "{} {:?}", spec.kind, r.checks);
        if spec.kind != ShapeKind::Disk {
            for name in ["lp_1", "lp_2", "gradient_1", "gradient_2"] {
                assert!(r.check(name).unwrap().margin > 0.0, "{} {name}", spec.kind);
            }
        }
    }
}

#[test]
fn annulus_rim_excess_decays_quadratically() {
    let violation = |h: f64| {
        let d = domain(ShapeKind::Annulus, h);
        talenti_compare(&d, &plate(&d), &[], &[])
            .unwrap()
            .sup_violation
            .unwrap()
    };
    let coarse = violation(1.0 / 32.0);
    let fine = violation(1.0 / 64.0);
    assert!(coarse > 0.0);
    assert!(fine < coarse / 3.0, "{coarse} {fine}");
}

#[test]
fn talenti_rejects_bad_input() {
    let d = domain(ShapeKind::Disk, 1.0 / 16.0);
    let u = GridField::from_fn(d.clone(), |x, _| x).unwrap();
    assert!(matches!(
        talenti_compare(&d, &u, &[1.0], &[1.0]),
        Err(PlateError::Precondition(_))
    ));
    let ok = disk_deflection(&d);
    assert!(talenti_compare(&d, &ok, &[1.0], &[3.0]).is_err());
    assert!(talenti_compare(&d, &ok, &[0.0], &[1.0]).is_err());
    let other = domain(ShapeKind::Square, 1.0 / 16.0);
    assert!(matches!(
        talenti_compare(&other, &ok, &[1.0], &[1.0]),
        Err(PlateError::DomainMismatch)
    ));
    assert!(matches!(
        signed_talenti_check(&other, &ok),
        Err(PlateError::DomainMismatch)
    ));
}

#[test]
fn signed_check_examples() {
    let h = 1.0 / 64.0;
    let d = domain(ShapeKind::Disk, h);
    let r = signed_talenti_check(&d, &disk_deflection(&d)).unwrap();
    let c = r.check("signed_l1").unwrap();
    assert!(c.margin.abs() <= c.allowance, "{c:?}");
    assert!(r.passed() && r.warnings.is_empty());

    let two = domain(ShapeKind::TwoDisks, h);
    let load = GridField::from_fn(two.clone(), |x, _| if x > 0.0 { 1.0 } else { -1.0 }).unwrap();
    let (u, _) = solve_plate(&two, &load, 0.0).unwrap();
    assert!(u.values().iter().any(|&v| v < 0.0) && u.values().iter().any(|&v| v > 0.0));
    let r = signed_talenti_check(&two, &u).unwrap();
    assert!(r.passed(), "{:?}", r.checks);
    assert!(r.signed_margin.unwrap() > 0.0);

    let zero = signed_talenti_check(&d, &GridField::zeros(d.clone())).unwrap();
    assert_eq!(zero.signed_margin, Some(0.0));
    assert!(zero.passed());
    assert_eq!(zero.warnings.len(), 1);
}

#[test]
fn frozen_allowance_covers_fresh_calibration() {
    let c = calibrate_allowance(&CALIBRATION_SPACINGS).unwrap();
    let pairs = [
        (c.sup, FROZEN_ALLOWANCE.sup),
        (c.lp, FROZEN_ALLOWANCE.lp),
        (c.gradient, FROZEN_ALLOWANCE.gradient),
        (c.signed, FROZEN_ALLOWANCE.signed),
        (c.flux, FROZEN_ALLOWANCE.flux),
    ];
    for (fresh, frozen) in pairs {
        assert!(
            fresh <= frozen && frozen <= 1.1 * fresh,
            "{fresh} vs {frozen}"
        );
    }
}

#[test]
fn report_serializes() {
    let d = domain(ShapeKind::Disk, 1.0 / 16.0);
    let r = talenti_compare(&d, &disk_deflection(&d), &[1.0], &[1.0]).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    for key in [
        "h",
        "allowance_constants",
        "sup_violation",
        "lp_margins",
        "gradient_margins",
        "signed_margin",
        "checks",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert!(json["checks"][0].get("passed").is_some());
}

fn small_domain() -> Arc<GridDomain> {
    domain(ShapeKind::Ellipse, 1.0 / 10.0)
}

fn quantized(seed: &[i32], n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| seed[(k * 7 + k / 3) % seed.len()] as f64 / 64.0)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equimeasurable_and_normalized(seed in proptest::collection::vec(-200i32..200, 1..40)) {
        let d = small_domain();
        let u = GridField::new(d.clone(), quantized(&seed, d.cell_count())).unwrap();
        let mu = distribution(&u);
        let r1 = decreasing_rearrangement_1d(&u);
        let r2 = schwarz_symmetrize(&u);
        prop_assert_eq!(&r1.distribution(), &mu);
        prop_assert_eq!(&r2.distribution(), &mu);
        prop_assert_eq!(r1.integral(), u.integral());
        prop_assert_eq!(r2.integral(), u.integral());
    }

    #[test]
    fn rearrangement_preserves_order(
        seed in proptest::collection::vec(-1.0f64..1.0, 1..30),
        bump in proptest::collection::vec(0.0f64..1.0, 1..30),
    ) {
        let d = small_domain();
        let n = d.cell_count();
        let u: Vec<f64> = (0..n).map(|k| seed[k % seed.len()] * (k as f64).cos()).collect();
        let w: Vec<f64> = u.iter().enumerate().map(|(k, v)| v + bump[k % bump.len()]).collect();
        let us = decreasing_rearrangement_1d(&GridField::new(d.clone(), u).unwrap());
        let ws = decreasing_rearrangement_1d(&GridField::new(d.clone(), w).unwrap());
        for (a, b) in us.values.iter().zip(&ws.values) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn measure_is_right_continuous_step(seed in proptest::collection::vec(-50i32..50, 1..20)) {
        let d = small_domain();
        let u = GridField::new(d.clone(), quantized(&seed, d.cell_count())).unwrap();
        let mu = distribution(&u);
        for (&t, &count) in mu.thresholds.iter().zip(&mu.counts) {
            prop_assert_eq!(mu.measure(t), count as f64 * mu.cell_measure);
            prop_assert!(mu.measure(t - 1e-9) > mu.measure(t));
        }
    }
}

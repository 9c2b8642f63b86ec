//! Special functions: Gamma, the dilogarithm, Bessel J₀/J₁ and the first zero of J₁.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{PlateError, Result};

/// Stopping rule for the power series used by [`dilog_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesAccuracy {
    pub relative_tolerance: f64,
    pub max_terms: usize,
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-13,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesAccuracy {
    pub fn new(relative_tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(relative_tolerance > 0.0 && relative_tolerance <= 1e-6) {
            return Err(PlateError::Domain(format!(
                "series tolerance {relative_tolerance} outside (0, 1e-6]"
            )));
        }
        if max_terms < 100 {
            return Err(PlateError::Domain(format!(
                "max_terms {max_terms} below 100"
            )));
        }
        Ok(Self {
            relative_tolerance,
            max_terms,
        })
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (g = 7, nine terms).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

fn dilog_series(x: f64, acc: &SeriesAccuracy) -> f64 {
    let mut sum = 0.0;
    let mut power = x;
    for k in 1..=acc.max_terms {
        let kf = k as f64;
        let term = power / (kf * kf);
        sum += term;
        if term.abs() <= acc.relative_tolerance * 1e-3 * sum.abs() {
            break;
        }
        power *= x;
    }
    sum
}

/// Dilogarithm Li₂(x) = Σ xᵏ/k² for real x ≤ 1.
pub fn dilog(x: f64) -> Result<f64> {
    dilog_with(x, &SeriesAccuracy::default())
}

pub fn dilog_with(x: f64, acc: &SeriesAccuracy) -> Result<f64> {
    if x.is_nan() || x > 1.0 {
        return Err(PlateError::Domain(format!("dilog argument {x} exceeds 1")));
    }
    let zeta2 = PI * PI / 6.0;
    let value = if x == 1.0 {
        zeta2
    } else if x.abs() <= 0.5 {
        dilog_series(x, acc)
    } else if x > 0.5 {
        zeta2 - x.ln() * (-x).ln_1p() - dilog_series(1.0 - x, acc)
    } else if x >= -1.0 {
        let l = (-x).ln_1p();
        -dilog_with(x / (x - 1.0), acc)? - 0.5 * l * l
    } else {
        let l = (-x).ln();
        -zeta2 - 0.5 * l * l - dilog_with(1.0 / x, acc)?
    };
    Ok(value)
}

/// Li₂(x) − Li₂(y), integrating −ln(1−t)/t directly when the arguments are close.
pub fn dilog_diff(x: f64, y: f64) -> Result<f64> {
    if x > 1.0 || y > 1.0 || x.is_nan() || y.is_nan() {
        return Err(PlateError::Domain(format!(
            "dilog arguments ({x}, {y}) exceed 1"
        )));
    }
    if (x - y).abs() >= 1e-4 || x.max(y) > 0.999 {
        return Ok(dilog(x)? - dilog(y)?);
    }
    let (nodes, weights) = gauss_legendre(8);
    let mid = 0.5 * (x + y);
    let half = 0.5 * (x - y);
    let mut sum = 0.0;
    for (t, w) in nodes.iter().zip(weights.iter()) {
        let s = mid + half * t;
        let integrand = if s == 0.0 { 1.0 } else { -(-s).ln_1p() / s };
        sum += w * integrand;
    }
    Ok(half * sum)
}

/// Gauss–Legendre nodes and weights on [−1, 1], computed by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (nodes, weights)
}

const BESSEL_SWITCH: f64 = 12.0;

fn bessel_series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    let q = half * half;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= -q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-18 && k as f64 > half {
            break;
        }
    }
    sum
}

fn bessel_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0f64;
    for k in 1..80u32 {
        let odd = (2 * k - 1) as f64;
        let next = a * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if k > 2 && next.abs() > a.abs() {
            break;
        }
        a = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    let chi = x - (0.5 * order as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J₀(x), accurate to about 1e−12 absolute for |x| ≤ 60.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= BESSEL_SWITCH {
        bessel_series(0, x)
    } else {
        bessel_asymptotic(0, x)
    }
}

/// J₁(x), accurate to about 1e−12 absolute for |x| ≤ 60.
pub fn j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    let v = if x <= BESSEL_SWITCH {
        bessel_series(1, x)
    } else {
        bessel_asymptotic(1, x)
    };
    s * v
}

/// Bessel function of the first kind of order 0 or 1 at x ≥ 0.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(PlateError::Domain(format!(
            "bessel argument {x} is negative"
        )));
    }
    match order {
        0 => Ok(j0(x)),
        1 => Ok(j1(x)),
        _ => Err(PlateError::Domain(format!(
            "bessel order {order} not in {{0, 1}}"
        ))),
    }
}

/// Power-series branch of J_n, exposed so the two branches can be compared at the switch point.
pub fn bessel_j_series(order: u32, x: f64) -> f64 {
    bessel_series(order, x.abs())
}

/// Asymptotic branch of J_n (order 0 or 1).
pub fn bessel_j_asymptotic(order: u32, x: f64) -> f64 {
    bessel_asymptotic(order, x.abs())
}

/// First positive zero j₁,₁ ≈ 3.8317 of J₁.
pub fn bessel_j1_first_zero() -> f64 {
    static ZERO: OnceLock<f64> = OnceLock::new();
    *ZERO.get_or_init(|| {
        let (mut lo, mut hi) = (3.0, 5.0);
        debug_assert!(j1(lo) > 0.0 && j1(hi) < 0.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if j1(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..20 {
            let d = j0(x) - j1(x) / x;
            let step = j1(x) / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x
    })
}

/// First positive zero j₀,₁ ≈ 2.4048 of J₀, found by bisection on the power series.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bessel_series(0, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

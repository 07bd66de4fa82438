//! Shared oracles for the integration tests: independent quadrature and
//! finite differences, plus reproducible smooth test fields. Everything here
//! deliberately avoids the library's own discretization paths.

#![allow(dead_code)]

use rand_core::{RngCore, SeedableRng};

use nematic_torus::{PeriodicGrid, ScalarField};

pub const TAU: f64 = std::f64::consts::TAU;

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(f, a, fa, m, fm, flm);
        let right = simpson(f, m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(f, a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 48)
}

/// ∫∫ g(θ) dθ dφ over the parameter square for a φ-independent integrand:
/// 2π times the adaptive θ-integral.
pub fn axisymmetric_integral(g: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
    TAU * adaptive_simpson(g, 0.0, TAU, tol)
}

/// Fourth-order central first derivative.
pub fn diff1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h)
}

/// A reproducible smooth doubly periodic field: a low-order random
/// trigonometric polynomial with coefficients decaying in the mode order.
pub fn trig_polynomial(grid: PeriodicGrid, seed: u64, degree: i32, amplitude: f64) -> ScalarField {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut unit = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut modes = Vec::new();
    for k in -degree..=degree {
        for l in -degree..=degree {
            if k == 0 && l == 0 {
                continue;
            }
            let order = (k.abs() + l.abs()) as f64;
            let coeff = amplitude * (2.0 * unit() - 1.0) / (1.0 + order * order);
            let phase = TAU * unit();
            modes.push((k as f64, l as f64, coeff, phase));
        }
    }
    let offset = amplitude * (2.0 * unit() - 1.0);
    ScalarField::from_fn(grid, |theta, phi| {
        let mut v = offset;
        for &(k, l, c, p) in &modes {
            v += c * (k * theta + l * phi + p).cos();
        }
        v
    })
}

/// Relative difference against scale 1 + |reference|.
pub fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / (1.0 + reference.abs())
}

//! Shared oracles for the integration tests: direct ODE integration of the
//! Schrodinger equation, midpoint quadrature for moments, the tan x = x fixed
//! point, and seeded random parameter draws.

#![allow(dead_code)]

use deltaprime::potential::{PiecewisePotential, Rectangle, RegularizationParams};
use deltaprime::transfer::TransferMatrix;
use deltaprime::transparency::{residual, TSet};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fixed-step RK4 of (psi, psi') across one constant slab.
fn rk4_slab(mut y: [f64; 2], kappa2: f64, width: f64, steps: usize) -> [f64; 2] {
    // y' = (y[1], -kappa2 * y[0])
    let h = width / steps as f64;
    let f = |y: [f64; 2]| [y[1], -kappa2 * y[0]];
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    y
}

/// Transfer matrix by direct ODE integration: propagate the two canonical
/// initial conditions across every rectangle.
pub fn ode_transfer(potential: &PiecewisePotential, e: f64, steps_per_slab: usize) -> TransferMatrix {
    let mut col1 = [1.0, 0.0];
    let mut col2 = [0.0, 1.0];
    for rect in potential.rectangles() {
        let kappa2 = e - rect.height;
        col1 = rk4_slab(col1, kappa2, rect.width, steps_per_slab);
        col2 = rk4_slab(col2, kappa2, rect.width, steps_per_slab);
    }
    TransferMatrix::from_real(col1[0], col2[0], col1[1], col2[1])
}

/// Midpoint-rule moment of a rectangle list, with the half-axis weighting for
/// j = 0; `panels` midpoints per rectangle (rectangles straddling the origin
/// are split first).
pub fn midpoint_moment(rects: &[Rectangle], j: usize, varsigma: f64, panels: usize) -> f64 {
    let fact: f64 = (1..=j).map(|k| k as f64).product();
    let mut pieces: Vec<(f64, f64, f64)> = Vec::new();
    for r in rects {
        let (a, b) = (r.left, r.right());
        if a < 0.0 && b > 0.0 {
            pieces.push((a, 0.0, r.height));
            pieces.push((0.0, b, r.height));
        } else {
            pieces.push((a, b, r.height));
        }
    }
    let mut total = 0.0;
    for (a, b, height) in pieces {
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for i in 0..panels {
            let xi = a + (i as f64 + 0.5) * h;
            let weight = if j == 0 && xi < 0.0 { 1.0 / varsigma } else { 1.0 };
            acc += weight * xi.powi(j as i32) * height;
        }
        total += acc * h / fact;
    }
    total
}

/// First positive fixed point of tan x = x, bisected on (pi, 3 pi / 2).
pub fn tan_fixed_point(n: usize) -> f64 {
    let f = |x: f64| x.tan() - x;
    let pi = std::f64::consts::PI;
    let (mut a, mut b) = ((n as f64 + 0.5) * pi - 0.4999 * pi + 1e-9, (n as f64 + 0.5) * pi - 1e-9);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(a).signum() == f(m).signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Roots in lambda of a reduced equation with no free constant (T4-T6),
/// bracketed on a uniform grid and bisected.
pub fn lambda_roots(set: TSet, varsigma: f64, lo: f64, hi: f64, n: usize, max_roots: usize) -> Vec<f64> {
    let f = |lambda: f64| residual(set, lambda, varsigma, 1.0).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    let mut prev = lo;
    let mut fprev = f(lo);
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let fx = f(x);
        if fprev.is_finite() && fx.is_finite() && fprev.signum() != fx.signum() {
            let (mut a, mut b, mut fa) = (prev, x, fprev);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fa.signum() == fm.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let root = 0.5 * (a + b);
            if f(root).abs() < 1e-9 {
                out.push(root);
                if out.len() >= max_roots {
                    break;
                }
            }
        }
        prev = x;
        fprev = fx;
    }
    out
}

/// A random but moderate parameter point: mixed propagating/evanescent
/// regimes without overflowing the evanescent growth.
pub fn draw_params(rng: &mut ChaCha8Rng) -> (RegularizationParams, f64, f64, f64) {
    let zero_a = rng.gen_bool(0.5);
    let params = RegularizationParams {
        mu: rng.gen_range(1.05..1.5),
        nu: rng.gen_range(0.5..2.0),
        tau: rng.gen_range(0.5..1.5),
        a: if zero_a {
            [0.0; 3]
        } else {
            [rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5)]
        },
        c: [
            rng.gen_range(0.7..1.3),
            rng.gen_range(0.7..1.3),
            rng.gen_range(0.7..1.3),
            rng.gen_range(0.7..1.3),
        ],
        varsigma: rng.gen_range(0.7..1.3),
        epsilon: rng.gen_range(0.5..1.0),
    };
    let lambda = rng.gen_range(0.2..0.8) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let eta = rng.gen_range(-0.5..0.5);
    let k = rng.gen_range(0.5..2.0);
    (params, lambda, eta, k)
}

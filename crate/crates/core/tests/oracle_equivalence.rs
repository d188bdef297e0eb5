//! Route-independence checks: the closed-form matrix against slab
//! composition and direct ODE integration, and closed-form moments against
//! midpoint quadrature.

mod common;

use deltaprime::distribution::{moment, rescaled_profile, Role};
use deltaprime::potential::{build_total_potential, PiecewisePotential, Rectangle, RegularizationParams};
use deltaprime::transfer::{compose_lambda, scattering, transfer_at};

#[test]
fn ode_matches_single_slab() {
    // one evanescent and one propagating rectangle
    let v = PiecewisePotential::new(vec![
        Rectangle::new(-0.5, 0.5, 4.0).unwrap(),
        Rectangle::new(0.0, 0.7, -2.0).unwrap(),
    ])
    .unwrap();
    let e = 1.3;
    let numeric = common::ode_transfer(&v, e, 20_000);
    let closed = compose_lambda(&v, e);
    let diff = [
        (numeric.m11 - closed.m11).norm(),
        (numeric.m12 - closed.m12).norm(),
        (numeric.m21 - closed.m21).norm(),
        (numeric.m22 - closed.m22).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    assert!(diff < 1e-9, "ODE/closed matrix gap {diff}");
}

#[test]
fn ode_matches_regularized_model() {
    let mut rng = common::seeded_rng(1234);
    for _ in 0..5 {
        let (mut params, lambda, eta, k) = common::draw_params(&mut rng);
        params.epsilon = 0.05;
        let v = build_total_potential(&params, lambda, eta).unwrap();
        let numeric = common::ode_transfer(&v, k * k, 20_000);
        let closed = transfer_at(&params, lambda, eta, k * k).unwrap();
        let (x1, x2) = v.support();
        let t_ode = scattering(&numeric, k, x1, x2).unwrap();
        let t_closed = scattering(&closed, k, x1, x2).unwrap();
        assert!((t_ode.t2 - t_closed.t2).abs() < 1e-6);
        assert!((t_ode.r2 - t_closed.r2).abs() < 1e-6);
    }
}

#[test]
fn composition_is_route_independent() {
    let mut rng = common::seeded_rng(99);
    for _ in 0..200 {
        let (params, lambda, eta, k) = common::draw_params(&mut rng);
        let closed = transfer_at(&params, lambda, eta, k * k).unwrap();
        let composed = deltaprime::composed_at(&params, lambda, eta, k * k).unwrap();
        let diff = [
            (closed.m11 - composed.m11).norm(),
            (closed.m12 - composed.m12).norm(),
            (closed.m21 - composed.m21).norm(),
            (closed.m22 - composed.m22).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        assert!(diff / closed.max_norm() < 1e-10);
        assert!(closed.max_imag() < 1e-10 * closed.max_norm(), "real potential, real matrix");
    }
}

#[test]
fn quadrature_matches_closed_moments() {
    let p = RegularizationParams {
        mu: 1.4,
        nu: 1.1,
        tau: 0.8,
        a: [0.3, 0.2, 0.6],
        c: [0.9, 1.2, 0.7, 1.1],
        varsigma: 1.7,
        epsilon: 0.02,
    };
    for role in [Role::Delta, Role::DeltaPrime] {
        let rects = rescaled_profile(&p, role).unwrap();
        for j in 0..=3 {
            let closed = moment(&p, role, j).unwrap().value;
            let quad = common::midpoint_moment(&rects, j, p.varsigma, 50_000);
            let scale = rects.iter().map(|r| (r.height * r.width).abs()).sum::<f64>().max(1.0);
            assert!(
                (closed - quad).abs() / scale < 1e-8,
                "j = {j}: closed {closed} vs quadrature {quad}"
            );
        }
    }
}

#[test]
fn tan_fixed_points_solve_t5() {
    use deltaprime::transparency::{residual, TSet};
    for n in 1..=4 {
        let x = common::tan_fixed_point(n);
        assert!((x.tan() - x).abs() < 1e-9 * x);
        let lambda = x * x / 2.0;
        assert!(residual(TSet::T5, lambda, 1.0, 1.0).unwrap().abs() < 1e-10);
    }
}

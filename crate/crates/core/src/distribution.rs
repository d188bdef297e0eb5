//! Moment functionals of the rescaled profiles and classification of exponent
//! triples against the two trihedral surfaces.
//!
//! The rescaled variable is `xi = e^{1-mu} x`. The delta-profile is a single
//! rectangle of height `e^{mu-1-tau}/c3` on `(0, c3 e^{1-mu+tau})`; the
//! delta-prime profile consists of three rectangles whose heights and widths
//! follow from the power parametrization. The zeroth moment splits the
//! negative half-axis with weight `1/varsigma`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Rectangle, RegularizationParams};

/// Which rescaled profile a moment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Delta,
    DeltaPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub j: usize,
    pub value: f64,
    pub epsilon: f64,
}

/// Elements of the delta trihedral surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PSet {
    P0,
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

/// Elements of the delta-prime trihedral surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QSet {
    Q0,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
}

/// Classification of an exponent triple `(mu, nu, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Surface {
    /// Strictly inside the delta trihedral: full transmission in the limit.
    DeltaInterior,
    /// On an element of the delta surface.
    DeltaBoundary(PSet),
    /// Outside the delta trihedral and not on either surface.
    DeltaExterior,
    /// On an element of the delta-prime surface.
    DeltaPrime(QSet),
}

/// Equality tolerance on exponent relations; exponents are design inputs,
/// typically exact rationals.
pub const EXPONENT_TOL: f64 = 1e-12;

fn eq(x: f64, y: f64) -> bool {
    (x - y).abs() <= EXPONENT_TOL
}

fn gt(x: f64, y: f64) -> bool {
    x > y + EXPONENT_TOL
}

/// Rescaled profile rectangles in the `xi` variable for the given role.
pub fn rescaled_profile(params: &RegularizationParams, role: Role) -> Result<Vec<Rectangle>> {
    params.validate()?;
    let e = params.epsilon;
    let (mu, nu, tau) = (params.mu, params.nu, params.tau);
    let [a1, a2, a3] = params.a;
    let [c0, c1, c2, c3] = params.c;
    match role {
        Role::Delta => {
            let width = c3 * e.powf(1.0 - mu + tau);
            Ok(vec![Rectangle::new(0.0, width, e.powf(mu - 1.0 - tau) / c3)?])
        }
        Role::DeltaPrime => {
            let w1 = c1 * e.powf(2.0 - mu);
            let w3 = c3 * e.powf(1.0 - mu + tau);
            let w2 = (c2 / params.varsigma) * e.powf(2.0 - 2.0 * mu + nu);
            Ok(vec![
                Rectangle::new(-w1, w1, a1 + (c0 / c1) * e.powf(mu - 2.0))?,
                Rectangle::new(0.0, w3, a3)?,
                Rectangle::new(w3, w2, a2 - (c0 / c2) * e.powf(2.0 * mu - 2.0 - nu))?,
            ])
        }
    }
}

fn rect_moment(rect: &Rectangle, j: usize) -> f64 {
    let (a, b) = (rect.left, rect.right());
    let jf = j as i32;
    let fact: f64 = (1..=j).map(|k| k as f64).product();
    rect.height * (b.powi(jf + 1) - a.powi(jf + 1)) / ((j as f64 + 1.0) * fact)
}

/// Closed-form moment of the rescaled profile.
///
/// For `j = 0` the negative half-axis contribution is weighted by
/// `1/varsigma`; for `j >= 1` the moment is `(1/j!) Int xi^j V(xi) dxi`.
pub fn moment(params: &RegularizationParams, role: Role, j: usize) -> Result<MomentReport> {
    let rects = rescaled_profile(params, role)?;
    let value = moment_of_rectangles(&rects, j, params.varsigma);
    if !value.is_finite() {
        return Err(Error::InvalidParameter("moment overflows double precision".into()));
    }
    Ok(MomentReport { j, value, epsilon: params.epsilon })
}

/// Moment of an explicit rectangle list; splits any rectangle straddling the
/// origin so the `j = 0` half-axis weighting stays exact.
pub fn moment_of_rectangles(rects: &[Rectangle], j: usize, varsigma: f64) -> f64 {
    let mut value = 0.0;
    for rect in rects {
        if j > 0 {
            value += rect_moment(rect, j);
            continue;
        }
        let (a, b) = (rect.left, rect.right());
        let neg = (b.min(0.0) - a.min(0.0)) * rect.height;
        let pos = (b.max(0.0) - a.max(0.0)) * rect.height;
        value += neg / varsigma + pos;
    }
    value
}

/// Assign the exponent triple to a surface element, the interior of the delta
/// trihedral, or the exterior. Requires `mu > 1`.
pub fn classify(mu: f64, nu: f64, tau: f64) -> Result<Surface> {
    if !(mu > 1.0) {
        return Err(Error::InvalidParameter(format!("mu must be > 1, got {mu}")));
    }
    if let Some(p) = p_element(mu, nu, tau) {
        return Ok(Surface::DeltaBoundary(p));
    }
    if let Some(q) = q_element(mu, nu, tau) {
        return Ok(Surface::DeltaPrime(q));
    }
    // Full-transmission cone: strictly below the apex wall and strictly above
    // the two slanted faces.
    if mu < 1.5 && gt(nu, 3.0 * (mu - 1.0)) && gt(tau, 2.0 * (mu - 1.0)) {
        Ok(Surface::DeltaInterior)
    } else {
        Ok(Surface::DeltaExterior)
    }
}

fn p_element(mu: f64, nu: f64, tau: f64) -> Option<PSet> {
    let half3 = 1.5;
    if eq(mu, half3) && eq(nu, half3) && eq(tau, 1.0) {
        return Some(PSet::P0);
    }
    if mu > 1.0 && mu < half3 && eq(nu, 3.0 * (mu - 1.0)) && eq(tau, 2.0 * (mu - 1.0)) {
        return Some(PSet::P1);
    }
    if eq(mu, half3) && gt(nu, half3) && eq(tau, 1.0) {
        return Some(PSet::P2);
    }
    if eq(mu, half3) && eq(nu, half3) && gt(tau, 1.0) {
        return Some(PSet::P3);
    }
    if mu > 1.0 && mu < half3 && gt(nu, 3.0 * (mu - 1.0)) && eq(tau, 2.0 * (mu - 1.0)) {
        return Some(PSet::P4);
    }
    if mu > 1.0 && mu < half3 && eq(nu, 3.0 * (mu - 1.0)) && gt(tau, 2.0 * (mu - 1.0)) {
        return Some(PSet::P5);
    }
    if eq(mu, half3) && gt(nu, half3) && gt(tau, 1.0) {
        return Some(PSet::P6);
    }
    None
}

fn q_element(mu: f64, nu: f64, tau: f64) -> Option<QSet> {
    if eq(mu, 2.0) && eq(nu, 2.0) && eq(tau, 1.0) {
        return Some(QSet::Q0);
    }
    if mu > 1.0 && mu < 2.0 && eq(nu, 2.0 * (mu - 1.0)) && eq(tau, mu - 1.0) {
        return Some(QSet::Q1);
    }
    if eq(mu, 2.0) && gt(nu, 2.0) && eq(tau, 1.0) {
        return Some(QSet::Q2);
    }
    if eq(mu, 2.0) && eq(nu, 2.0) && gt(tau, 1.0) {
        return Some(QSet::Q3);
    }
    if mu > 1.0 && mu < 2.0 && gt(nu, 2.0 * (mu - 1.0)) && eq(tau, mu - 1.0) {
        return Some(QSet::Q4);
    }
    if mu > 1.0 && mu < 2.0 && eq(nu, 2.0 * (mu - 1.0)) && gt(tau, mu - 1.0) {
        return Some(QSet::Q5);
    }
    if eq(mu, 2.0) && gt(nu, 2.0) && gt(tau, 1.0) {
        return Some(QSet::Q6);
    }
    None
}

/// Constants entering the surface constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceConstants {
    pub a: [f64; 3],
    pub c: [f64; 4],
    pub varsigma: f64,
}

impl From<&RegularizationParams> for SurfaceConstants {
    fn from(p: &RegularizationParams) -> Self {
        Self { a: p.a, c: p.c, varsigma: p.varsigma }
    }
}

/// `|LHS - RHS|` of the constraint row for a delta-surface element.
pub fn p_constraint_residual(set: PSet, k: &SurfaceConstants) -> f64 {
    let [a1, a2, a3] = k.a;
    let [_, c1, c2, c3] = k.c;
    let s = k.varsigma;
    match set {
        PSet::P0 => (a1 * c1 + a2 * c2 + a3 * c3 * s - s).abs(),
        PSet::P1 => (a2 * c2 + a3 * c3 * s - s).abs(),
        PSet::P2 => (a1 * c1 + a3 * c3 * s - s).abs(),
        PSet::P3 => (a1 * c1 + a2 * c2 - s).abs(),
        PSet::P4 => (a3 * c3 - 1.0).abs(),
        PSet::P5 => (a2 * c2 - s).abs(),
        PSet::P6 => (a1 * c1 - s).abs(),
    }
}

/// `|LHS - RHS|` of the constraint row for a delta-prime-surface element.
pub fn q_constraint_residual(set: QSet, k: &SurfaceConstants) -> f64 {
    let [c0, c1, c2, c3] = k.c;
    let s = k.varsigma;
    match set {
        QSet::Q0 => (0.5 * (c1 + c2 / (s * s)) + c3 / s - 1.0 / c0).abs(),
        QSet::Q1 => (c2 / (2.0 * s) + c3 - s / c0).abs(),
        QSet::Q2 => (c1 / 2.0 + c3 / s - 1.0 / c0).abs(),
        QSet::Q3 => (c1 + c2 / (s * s) - 2.0 / c0).abs(),
        QSet::Q4 => (c0 * c3 - s).abs(),
        QSet::Q5 => (c0 * c2 - 2.0 * s * s).abs(),
        QSet::Q6 => (c0 * c1 - 2.0).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64, nu: f64, tau: f64, c: [f64; 4], varsigma: f64, epsilon: f64) -> RegularizationParams {
        RegularizationParams { mu, nu, tau, a: [0.0; 3], c, varsigma, epsilon }
    }

    #[test]
    fn delta_zeroth_moment_is_one() {
        for &(mu, nu, tau) in &[(2.0, 2.0, 1.0), (1.5, 2.0, 0.5), (1.3, 1.0, 0.9)] {
            for k in 0..5 {
                let p = params(mu, nu, tau, [0.7, 1.1, 0.4, 2.3], 1.6, 10f64.powi(-k));
                let m = moment(&p, Role::Delta, 0).unwrap();
                assert!((m.value - 1.0).abs() < 1e-12, "m0 = {} at {:?}", m.value, (mu, nu, tau));
            }
        }
    }

    #[test]
    fn delta_higher_moments_vanish() {
        // tau > mu - 1
        let mut last = f64::INFINITY;
        for k in 1..=5 {
            let p = params(1.5, 2.0, 1.0, [1.0; 4], 1.0, 10f64.powi(-k));
            let m = moment(&p, Role::Delta, 2).unwrap();
            assert!(m.value.abs() < last);
            last = m.value.abs();
        }
        // decay rate epsilon^{(1 - mu + tau) j} = epsilon here
        assert!(last < 1e-5);
    }

    #[test]
    fn delta_prime_zeroth_moment_vanishes_identically() {
        // a = 0 makes the half-axis areas cancel for every epsilon
        for k in 0..6 {
            let p = params(2.0, 2.0, 1.0, [0.9, 0.6, 1.7, 0.8], 1.3, 10f64.powi(-k));
            let m = moment(&p, Role::DeltaPrime, 0).unwrap();
            assert!(m.value.abs() < 1e-12, "m'0 = {} at eps = 1e-{k}", m.value);
        }
    }

    #[test]
    fn delta_prime_first_moment_on_q6() {
        // mu = 2, nu = 3, tau = 2 with c0*c1 = 2
        let mut gaps = Vec::new();
        for k in 2..=4 {
            let p = params(2.0, 3.0, 2.0, [2.0, 1.0, 1.0, 1.0], 1.0, 10f64.powi(-k));
            let m = moment(&p, Role::DeltaPrime, 1).unwrap();
            gaps.push((m.value + 1.0).abs());
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        assert!(gaps[2] < 1e-3);
    }

    #[test]
    fn classify_named_points() {
        assert_eq!(classify(1.5, 1.5, 1.0).unwrap(), Surface::DeltaBoundary(PSet::P0));
        assert_eq!(classify(2.0, 2.0, 1.0).unwrap(), Surface::DeltaPrime(QSet::Q0));
        assert_eq!(classify(1.5, 1.0, 0.5).unwrap(), Surface::DeltaPrime(QSet::Q1));
        assert_eq!(classify(2.0, 3.0, 2.0).unwrap(), Surface::DeltaPrime(QSet::Q6));
        assert_eq!(classify(1.2, 1.0, 0.5).unwrap(), Surface::DeltaInterior);
        assert_eq!(classify(2.5, 1.0, 0.5).unwrap(), Surface::DeltaExterior);
        assert!(classify(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn off_surface_point_matches_no_element() {
        // every defining equality of the surface elements fails here
        let (mu, nu, tau) = (1.2, 5.0, 10.0);
        assert_eq!(p_element(mu, nu, tau), None);
        assert_eq!(q_element(mu, nu, tau), None);
    }

    #[test]
    fn at_most_one_element_each() {
        // scan a grid; the defining relations must stay mutually exclusive
        let mut n = 0;
        for i in 1..40 {
            for j in 0..40 {
                for k in 0..40 {
                    let (mu, nu, tau) = (1.0 + i as f64 * 0.05, j as f64 * 0.1, k as f64 * 0.1);
                    let mut hits = 0;
                    for cand in [PSet::P0, PSet::P1, PSet::P2, PSet::P3, PSet::P4, PSet::P5, PSet::P6] {
                        if p_element(mu, nu, tau) == Some(cand) {
                            hits += 1;
                        }
                    }
                    assert!(hits <= 1);
                    if p_element(mu, nu, tau).is_some() && q_element(mu, nu, tau).is_some() {
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(n, 0, "P and Q elements overlap somewhere on the grid");
    }

    #[test]
    fn constraint_rows() {
        let k = SurfaceConstants { a: [0.0; 3], c: [2.0, 1.0, 1.0, 1.0], varsigma: 1.0 };
        assert!(q_constraint_residual(QSet::Q6, &k).abs() < 1e-15);
        let k = SurfaceConstants { a: [0.0, 0.0, 2.0], c: [1.0, 1.0, 1.0, 0.5], varsigma: 1.0 };
        assert!(p_constraint_residual(PSet::P4, &k).abs() < 1e-15);
        // Q0 with c1 = c2 = varsigma = 1: residual |(1+1)/2 + c3 - 1/c0|
        let k = SurfaceConstants { a: [0.0; 3], c: [0.4, 1.0, 1.0, 0.7], varsigma: 1.0 };
        let expect = (1.0 + 0.7 - 1.0 / 0.4f64).abs();
        assert!((q_constraint_residual(QSet::Q0, &k) - expect).abs() < 1e-14);
    }
}

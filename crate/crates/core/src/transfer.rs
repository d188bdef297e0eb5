//! Exact scattering across the finite-range potential.
//!
//! The transfer matrix maps `(psi, psi')` from the left edge of the support to
//! the right edge. Two independent routes are provided: the closed form for
//! the three-slab geometry and a slab-by-slab composition that works for any
//! piecewise-constant potential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{build_total_potential, geometry, PiecewisePotential, RegularizationParams, SlabGeometry};
use crate::special::{cos_sqrt, csinc, sinc_sqrt};

/// 2x2 transfer matrix with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { m11: one, m12: zero, m21: zero, m22: one }
    }

    pub fn from_real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self {
            m11: Complex64::new(m11, 0.0),
            m12: Complex64::new(m12, 0.0),
            m21: Complex64::new(m21, 0.0),
            m22: Complex64::new(m22, 0.0),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    /// Largest imaginary part over the entries; zero for real potentials.
    pub fn max_imag(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Wavenumbers of the three slabs at energy `E`:
/// `p^2 = E - lambda h1`, `q^2 = E - lambda h2`, `s^2 = E - eta h - lambda h3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumbers {
    pub p: Complex64,
    pub q: Complex64,
    pub s: Complex64,
    pub e: f64,
    pub p2: f64,
    pub q2: f64,
    pub s2: f64,
}

fn principal_sqrt(x: f64) -> Complex64 {
    Complex64::new(x, 0.0).sqrt()
}

pub fn wavenumbers(e: f64, lambda: f64, eta: f64, g: &SlabGeometry) -> Wavenumbers {
    let p2 = e - lambda * g.h1;
    let q2 = e - lambda * g.h2;
    let s2 = e - eta * g.h - lambda * g.h3;
    Wavenumbers {
        p: principal_sqrt(p2),
        q: principal_sqrt(q2),
        s: principal_sqrt(s2),
        e,
        p2,
        q2,
        s2,
    }
}

/// Closed-form transfer matrix of the three-slab potential, evaluated with
/// complex trigonometry; imaginary wavenumbers reduce to sinh/cosh
/// automatically and removable `sin(z w)/z` singularities use a Taylor
/// fallback.
pub fn closed_form_lambda(wn: &Wavenumbers, l: f64, rho: f64, r: f64) -> TransferMatrix {
    let (p, q, s) = (wn.p, wn.q, wn.s);
    let p2 = Complex64::new(wn.p2, 0.0);
    let q2 = Complex64::new(wn.q2, 0.0);
    let s2 = Complex64::new(wn.s2, 0.0);

    let cp = (p * l).cos();
    let cq = (q * r).cos();
    let cs = (s * rho).cos();
    // sin(p l)/p etc.; each division by a wavenumber pairs with its sine
    let spp = l * csinc(p * l);
    let sqq = r * csinc(q * r);
    let sss = rho * csinc(s * rho);
    // p sin(p l) = p^2 * (sin(p l)/p), even in p
    let psin = p2 * spp;
    let qsin = q2 * sqq;
    let ssin = s2 * sss;

    TransferMatrix {
        m11: (cp * cq - psin * sqq) * cs - (psin * cq * sss + cp * sqq * ssin),
        m12: (spp * cq + cp * sqq) * cs + (cp * cq * sss - spp * sqq * ssin),
        m21: -(psin * cq + cp * qsin) * cs - (cp * cq * ssin - psin * qsin * sss),
        m22: (cp * cq - spp * qsin) * cs - (spp * cq * ssin + cp * qsin * sss),
    }
}

/// Single-slab transfer matrix across width `w` with `kappa^2 = E - height`,
/// evaluated with real even functions of `kappa^2`.
pub fn slab_matrix(kappa2: f64, w: f64) -> TransferMatrix {
    let z = kappa2 * w * w;
    let c = cos_sqrt(z);
    let sn = w * sinc_sqrt(z); // sin(kappa w)/kappa
    TransferMatrix::from_real(c, sn, -kappa2 * sn, c)
}

/// Slab-by-slab composition oracle: product of per-rectangle matrices, applied
/// left to right across the support.
pub fn compose_lambda(potential: &PiecewisePotential, e: f64) -> TransferMatrix {
    let mut acc = TransferMatrix::identity();
    for rect in potential.rectangles() {
        acc = slab_matrix(e - rect.height, rect.width).compose(&acc);
    }
    acc
}

/// Reflection/transmission amplitudes and probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub r: Complex64,
    pub t: Complex64,
    pub r2: f64,
    pub t2: f64,
    pub conservation_residual: f64,
}

/// Solve the plane-wave matching conditions for the matrix `m` at wavenumber
/// `k > 0`; the transmission phase uses `x0 = x2 - x1`.
pub fn scattering(m: &TransferMatrix, k: f64, x1: f64, x2: f64) -> Result<ScatteringResult> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be > 0, got {k}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let u = m.m11 - m.m22;
    let v = k * m.m12 + m.m21 / k;
    let delta = m.m11 + m.m22 - i * (k * m.m12 - m.m21 / k);
    if delta.norm() < 1e-300 {
        return Err(Error::SingularScattering("matching denominator vanished".into()));
    }
    let x0 = x2 - x1;
    let r = -(u + i * v) / delta;
    let t = 2.0 * (-i * k * x0).exp() / delta;
    let r2 = r.norm_sqr();
    let t2 = t.norm_sqr();
    Ok(ScatteringResult { r, t, r2, t2, conservation_residual: (r2 + t2 - 1.0).abs() })
}

/// `|T|^2` from the real parts of `u = m11 - m22` and `v = k m12 + m21/k`,
/// valid when `det = 1` and the entries are real.
pub fn transmissibility_uv(m: &TransferMatrix, k: f64) -> f64 {
    let u = (m.m11 - m.m22).re;
    let v = (k * m.m12 + m.m21 / k).re;
    4.0 / (4.0 + u * u + v * v)
}

/// The limiting connection matrix `[[chi, 0], [g, 1/chi]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    pub chi: f64,
    pub g: f64,
}

impl ConnectionMatrix {
    pub fn new(chi: f64, g: f64) -> Result<Self> {
        if chi == 0.0 || !chi.is_finite() || !g.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid connection matrix: chi = {chi}, g = {g}")));
        }
        Ok(Self { chi, g })
    }

    /// Limiting transmissibility `4 / (4 + (chi - 1/chi)^2 + g^2/k^2)`.
    pub fn transmissibility(&self, k: f64) -> f64 {
        let d = self.chi - 1.0 / self.chi;
        4.0 / (4.0 + d * d + self.g * self.g / (k * k))
    }
}

/// Bound-state decay rate `kappa = -g / (chi + 1/chi)`; a bound state exists
/// only for `kappa > 0`.
pub fn bound_state(conn: &ConnectionMatrix) -> Result<Option<f64>> {
    if conn.chi == 0.0 {
        return Err(Error::InvalidParameter("chi must be non-zero".into()));
    }
    let kappa = -conn.g / (conn.chi + 1.0 / conn.chi);
    Ok(if kappa > 0.0 { Some(kappa) } else { None })
}

/// One point of an epsilon ladder probe.
#[derive(Debug, Clone, Copy)]
pub struct ProbePoint {
    pub epsilon: f64,
    pub matrix: TransferMatrix,
    pub t2: f64,
}

/// Evaluate the transfer matrix and `|T|^2` down a strictly decreasing epsilon
/// ladder at fixed `(lambda, eta, k)`.
pub fn epsilon_limit_probe(
    params: &RegularizationParams,
    lambda: f64,
    eta: f64,
    k: f64,
    ladder: &[f64],
) -> Result<Vec<ProbePoint>> {
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("epsilon ladder must be strictly decreasing".into()));
    }
    let mut out = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let p = params.with_epsilon(eps);
        let g = geometry(&p)?;
        let wn = wavenumbers(k * k, lambda, eta, &g);
        let m = closed_form_lambda(&wn, g.l, g.rho, g.r);
        out.push(ProbePoint { epsilon: eps, matrix: m, t2: transmissibility_uv(&m, k) });
    }
    Ok(out)
}

/// Convenience: total transfer matrix of the regularized potential at energy
/// `k^2` via the closed form.
pub fn transfer_at(params: &RegularizationParams, lambda: f64, eta: f64, e: f64) -> Result<TransferMatrix> {
    let g = geometry(params)?;
    let wn = wavenumbers(e, lambda, eta, &g);
    Ok(closed_form_lambda(&wn, g.l, g.rho, g.r))
}

/// Convenience: build the potential and compose slab matrices (oracle route).
pub fn composed_at(params: &RegularizationParams, lambda: f64, eta: f64, e: f64) -> Result<TransferMatrix> {
    Ok(compose_lambda(&build_total_potential(params, lambda, eta)?, e))
}

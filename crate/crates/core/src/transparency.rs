//! Reduced transparency equations, their roots, the connection-matrix entries
//! `chi` and `g`, the coupled constants, and the boundary sets.
//!
//! Each reduced equation is rewritten through even functions of the squared
//! trigonometric argument (see [`crate::special`]) so that it stays
//! real-valued for negative couplings; the rewrite removes an overall
//! square-root prefactor and leaves the root set unchanged.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::distribution::EXPONENT_TOL;
use crate::error::{Error, Result};
use crate::special::{cos_sqrt, cosh_sqrt, sinc_sqrt, sinhc_sqrt, tanc_sqrt, tanhc_sqrt};

/// The seven transparency sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TSet {
    T0,
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl fmt::Display for TSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", *self as usize)
    }
}

impl std::str::FromStr for TSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T0" => Ok(TSet::T0),
            "T1" => Ok(TSet::T1),
            "T2" => Ok(TSet::T2),
            "T3" => Ok(TSet::T3),
            "T4" => Ok(TSet::T4),
            "T5" => Ok(TSet::T5),
            "T6" => Ok(TSet::T6),
            other => Err(Error::InvalidParameter(format!("unknown transparency set {other:?}"))),
        }
    }
}

fn feq(x: f64, y: f64) -> bool {
    (x - y).abs() <= EXPONENT_TOL
}

fn fge(x: f64, y: f64) -> bool {
    x >= y - EXPONENT_TOL
}

impl TSet {
    /// Sets whose reduced equation is solved for `c0` (T0-T2) or `b` (T3).
    pub fn has_root_parameter(self) -> bool {
        matches!(self, TSet::T0 | TSet::T1 | TSet::T2 | TSet::T3)
    }

    /// Exponent window of the set.
    pub fn window_contains(self, mu: f64, nu: f64, tau: f64) -> bool {
        match self {
            TSet::T0 => feq(mu, 2.0) && feq(nu, 2.0) && feq(tau, 1.0),
            TSet::T1 => {
                mu > 1.0 && (mu < 1.5 || feq(mu, 1.5)) && feq(nu, 2.0 * (mu - 1.0)) && feq(tau, mu - 1.0)
            }
            TSet::T2 => feq(mu, 2.0) && fge(nu, 3.0) && feq(tau, 1.0),
            TSet::T3 => feq(mu, 2.0) && feq(nu, 2.0) && fge(tau, 2.0),
            TSet::T4 => {
                mu > 1.0 && (mu < 1.5 || feq(mu, 1.5)) && fge(nu, 3.0 * (mu - 1.0)) && feq(tau, mu - 1.0)
            }
            TSet::T5 => {
                mu > 1.0
                    && (mu < 1.5 || feq(mu, 1.5))
                    && feq(nu, 2.0 * (mu - 1.0))
                    && fge(tau, 2.0 * (mu - 1.0))
            }
            TSet::T6 => feq(mu, 2.0) && fge(nu, 3.0) && fge(tau, 2.0),
        }
    }

    /// Default exponents used when a caller does not pin them; T1 and T3
    /// default to their boundary points, matching the checked design cases.
    pub fn default_exponents(self) -> (f64, f64, f64) {
        match self {
            TSet::T0 => (2.0, 2.0, 1.0),
            TSet::T1 => (1.5, 1.0, 0.5),
            TSet::T2 => (2.0, 3.0, 1.0),
            TSet::T3 => (2.0, 2.0, 2.0),
            TSet::T4 => (1.5, 1.5, 0.5),
            TSet::T5 => (1.5, 1.0, 1.5),
            TSet::T6 => (2.0, 4.0, 3.0),
        }
    }

    /// Whether the exponent triple lies on the boundary set `B_j` of this set.
    pub fn on_boundary(self, mu: f64, nu: f64, tau: f64) -> bool {
        if !self.window_contains(mu, nu, tau) {
            return false;
        }
        match self {
            TSet::T0 => false,
            TSet::T1 => feq(mu, 1.5) && feq(nu, 1.0) && feq(tau, 0.5),
            TSet::T2 => feq(nu, 3.0),
            TSet::T3 => feq(tau, 2.0),
            TSet::T4 => feq(nu, 3.0 * (mu - 1.0)) || feq(mu, 1.5),
            TSet::T5 => feq(tau, 2.0 * (mu - 1.0)) || feq(mu, 1.5),
            TSet::T6 => feq(tau, 2.0) || feq(nu, 3.0),
        }
    }
}

/// One root of a reduced transparency equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransparencyRoot {
    pub set: TSet,
    pub lambda: f64,
    pub varsigma: f64,
    /// `c0` for T0-T2, `b` for T3.
    pub root_value: f64,
    /// 1-based position among the ascending roots.
    pub root_index: usize,
    pub residual: f64,
}

/// Residual of the reduced equation of `set` at `(lambda, varsigma)`.
///
/// For T0-T3 the unknown is `x` (`c0` or `b`, `x > 0`); for T4-T6 `x` is
/// ignored and the residual is in `varsigma`. Residuals are rescaled by the
/// removable square-root prefactor so they remain real for `lambda < 0`.
pub fn residual(set: TSet, lambda: f64, varsigma: f64, x: f64) -> Result<f64> {
    if set.has_root_parameter() && !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("root parameter must be > 0, got {x}")));
    }
    let s = varsigma;
    let value = match set {
        TSet::T0 => {
            let w = lambda * x / (1.0 + x);
            let th = tanhc_sqrt(w);
            let tn = tanc_sqrt(w);
            th - tn * (1.0 / s + (w / x) * th)
        }
        TSet::T1 => {
            let z = 2.0 * lambda * x / (1.0 + x);
            (1.0 / s + lambda / (1.0 + x)) * tanc_sqrt(z) - 1.0
        }
        TSet::T2 => {
            let z = 2.0 * lambda * x / (1.0 + x);
            s * (1.0 - lambda / (1.0 + x)) * tanhc_sqrt(z) - 1.0
        }
        TSet::T3 => {
            let z1 = 2.0 * lambda * x / (1.0 + x);
            let z2 = 2.0 * lambda / (1.0 + x);
            s * tanhc_sqrt(z1) - tanc_sqrt(z2)
        }
        TSet::T4 => s * (1.0 - lambda) - 1.0,
        TSet::T5 => tanc_sqrt(2.0 * lambda) - s,
        TSet::T6 => s * tanhc_sqrt(2.0 * lambda) - 1.0,
    };
    Ok(value)
}

const SCAN_POINTS: usize = 10_000;
const ROOT_RESIDUAL_TOL: f64 = 1e-12;

/// Scan `x` over a log-dense grid on `(1e-6, search_max]`, bracket sign
/// changes, and bisect each bracket. Brackets that straddle a tangent pole
/// converge to a point with a large residual and are discarded.
pub fn solve_roots(
    set: TSet,
    lambda: f64,
    varsigma: f64,
    search_max: f64,
    max_roots: usize,
) -> Result<Vec<TransparencyRoot>> {
    if !set.has_root_parameter() {
        return Err(Error::InvalidParameter(format!("{set} has no free root parameter")));
    }
    if !(search_max > 0.0) {
        return Err(Error::InvalidParameter("search_max must be > 0".into()));
    }
    let f = |x: f64| residual(set, lambda, varsigma, x).unwrap_or(f64::NAN);
    let lo = 1e-6_f64;
    let ratio = (search_max / lo).powf(1.0 / (SCAN_POINTS as f64 - 1.0));

    let mut roots = Vec::new();
    let mut all_nonfinite = true;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..SCAN_POINTS {
        let x = lo * ratio.powi(i as i32);
        let fx = f(x);
        if fx.is_finite() {
            all_nonfinite = false;
        }
        if f_prev.is_finite() && fx.is_finite() && f_prev != 0.0 && f_prev.signum() != fx.signum() {
            if let Some(root) = bisect(&f, x_prev, x) {
                roots.push(TransparencyRoot {
                    set,
                    lambda,
                    varsigma,
                    root_value: root.0,
                    root_index: roots.len() + 1,
                    residual: root.1,
                });
                if roots.len() >= max_roots {
                    return Ok(roots);
                }
            }
        } else if f_prev.is_finite() && fx == 0.0 {
            // grid point is an exact root
            roots.push(TransparencyRoot {
                set,
                lambda,
                varsigma,
                root_value: x,
                root_index: roots.len() + 1,
                residual: 0.0,
            });
            if roots.len() >= max_roots {
                return Ok(roots);
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    if all_nonfinite {
        return Err(Error::SolverFailure("residual non-finite across the entire scan range".into()));
    }
    Ok(roots)
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Option<(f64, f64)> {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if !fm.is_finite() || fm == 0.0 {
            if fm == 0.0 {
                return Some((mid, 0.0));
            }
            return None;
        }
        if fa.signum() == fm.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let x = 0.5 * (a + b);
    let r = f(x);
    // a pole bracket converges to a discontinuity with a large residual
    if r.is_finite() && r.abs() < ROOT_RESIDUAL_TOL {
        Some((x, r))
    } else {
        None
    }
}

/// Smallest `lambda` at which the reduced equation acquires a root, bisected
/// to 1e-6 in `lambda`.
pub fn critical_lambda(set: TSet, varsigma: f64, lambda_max: f64) -> Result<f64> {
    if !set.has_root_parameter() {
        return Err(Error::InvalidParameter(format!("{set} has no free root parameter")));
    }
    let has_root = |lambda: f64| -> bool {
        solve_roots(set, lambda, varsigma, 1e3, 1).map(|r| !r.is_empty()).unwrap_or(false)
    };
    let n = 200;
    let mut lo = 1e-3;
    let mut hi = None;
    for i in 1..=n {
        let lambda = lambda_max * i as f64 / n as f64;
        if has_root(lambda) {
            hi = Some(lambda);
            break;
        }
        lo = lambda;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::SolverFailure(format!("no root of {set} up to lambda = {lambda_max}"))
    })?;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if has_root(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The `chi` entry of the connection matrix for the given set and root.
pub fn chi(set: TSet, lambda: f64, varsigma: f64, root_value: f64) -> Result<f64> {
    let s = varsigma;
    let x = root_value;
    let value = match set {
        TSet::T0 => {
            let w = lambda * x / (1.0 + x);
            let denom = sinc_sqrt(w);
            if denom == 0.0 {
                return Err(Error::SolverFailure("sin divisor vanished in chi".into()));
            }
            s * sinhc_sqrt(w) / denom
        }
        TSet::T1 => {
            let z = 2.0 * lambda * x / (1.0 + x);
            let c = cos_sqrt(z);
            if c == 0.0 {
                return Err(Error::SolverFailure("cos divisor vanished in chi".into()));
            }
            (1.0 + lambda * s / (1.0 + x)) / c
        }
        TSet::T2 => {
            let z = 2.0 * lambda * x / (1.0 + x);
            let d = 1.0 - lambda / (1.0 + x);
            if d == 0.0 {
                return Err(Error::SolverFailure("divisor vanished in chi".into()));
            }
            cosh_sqrt(z) / d
        }
        TSet::T3 => {
            let z1 = 2.0 * lambda * x / (1.0 + x);
            let z2 = 2.0 * lambda / (1.0 + x);
            let c = cos_sqrt(z2);
            if c == 0.0 {
                return Err(Error::SolverFailure("cos divisor vanished in chi".into()));
            }
            cosh_sqrt(z1) / c
        }
        TSet::T4 => {
            if lambda == 1.0 {
                return Err(Error::SolverFailure("chi singular at lambda = 1".into()));
            }
            1.0 / (1.0 - lambda)
        }
        TSet::T5 => {
            let c = cos_sqrt(2.0 * lambda);
            if c == 0.0 {
                return Err(Error::SolverFailure("cos divisor vanished in chi".into()));
            }
            1.0 / c
        }
        TSet::T6 => cosh_sqrt(2.0 * lambda),
    };
    if !value.is_finite() {
        return Err(Error::SolverFailure("chi overflowed".into()));
    }
    Ok(value)
}

/// The `g` entry of the connection matrix.
///
/// `root_value` is `c0` for T0-T2 and `b` for T3 (ignored for T4-T6, where
/// `c0` comes from `c[0]`). The Kronecker-delta terms activate exactly on the
/// boundary exponent relations of each row.
#[allow(clippy::too_many_arguments)]
pub fn g_value(
    set: TSet,
    lambda: f64,
    eta: f64,
    varsigma: f64,
    root_value: f64,
    c: [f64; 4],
    exponents: (f64, f64, f64),
) -> Result<f64> {
    let (mu, nu, tau) = exponents;
    if !set.window_contains(mu, nu, tau) {
        return Err(Error::InvalidParameter(format!(
            "exponents ({mu}, {nu}, {tau}) outside the {set} window"
        )));
    }
    let s = varsigma;
    let [c0_free, c1, c2, c3] = c;
    let d = |on: bool| if on { 1.0 } else { 0.0 };
    let value = match set {
        TSet::T0 => {
            let x = root_value;
            let w = lambda * x / (1.0 + x);
            eta * (cos_sqrt(w) * cosh_sqrt(w)
                + lambda * s / (3.0 * x * (1.0 + x)) * w * sinc_sqrt(w) * sinhc_sqrt(w))
        }
        TSet::T1 => {
            let x = root_value;
            let z = 2.0 * lambda * x / (1.0 + x);
            let pre = 1.0 + lambda * s / (1.0 + x);
            (1.0 / pre)
                * (eta * (1.0 + lambda * lambda * s * s / (3.0 * (1.0 + x) * (1.0 + x)))
                    - lambda * lambda * x * x * c1 / 3.0 * d(feq(mu, 1.5)))
                * cos_sqrt(z)
        }
        TSet::T2 => {
            let x = root_value;
            let z = 2.0 * lambda * x / (1.0 + x);
            let pre = 1.0 - lambda / (1.0 + x);
            (1.0 / pre)
                * (eta
                    * (1.0 - lambda / (1.0 + x)
                        + lambda * lambda / (3.0 * (1.0 + x) * (1.0 + x)))
                    - lambda * lambda * x / (3.0 * s * s * (1.0 + x)) * d(feq(nu, 3.0)))
                * cosh_sqrt(z)
        }
        TSet::T3 => {
            let b = root_value;
            let z1 = 2.0 * lambda * b / (1.0 + b);
            let z2 = 2.0 * lambda / (1.0 + b);
            let kappa = 2.0 * lambda * c3 / ((1.0 + 1.0 / b) * c1 * c1) * d(feq(tau, 2.0));
            // tanh^2(sqrt z1) * cosh(sqrt z1) = z1 * sinhc^2 / cosh
            eta * cos_sqrt(z2) * cosh_sqrt(z1)
                - kappa * cos_sqrt(z2) * z1 * sinhc_sqrt(z1) * sinhc_sqrt(z1) / cosh_sqrt(z1)
        }
        TSet::T4 => {
            eta * (1.0 + lambda * lambda / (3.0 * (1.0 - lambda)))
                - lambda * lambda * c0_free * c0_free / 3.0
                    * (1.0 - lambda)
                    * (c1 * d(feq(mu, 1.5)) + c2 * (1.0 - lambda) * d(feq(nu, 3.0 * (mu - 1.0))))
        }
        TSet::T5 => {
            (eta
                - lambda * lambda * c0_free * c0_free
                    * (c1 / 3.0 * d(feq(mu, 1.5)) + c3 * d(feq(tau, 2.0 * (mu - 1.0)))))
                * cos_sqrt(2.0 * lambda)
        }
        TSet::T6 => {
            let z = 2.0 * lambda;
            let inner = c2 / 3.0 * tanhc_sqrt(z) * d(feq(nu, 3.0)) + c3 * d(feq(tau, 2.0));
            // tanh^2(sqrt z) * cosh(sqrt z) = z * sinhc^2 / cosh
            eta * cosh_sqrt(z)
                - (lambda * c0_free * c0_free / 2.0)
                    * inner
                    * z
                    * sinhc_sqrt(z)
                    * sinhc_sqrt(z)
                    / cosh_sqrt(z)
        }
    };
    if !value.is_finite() {
        return Err(Error::SolverFailure("g overflowed".into()));
    }
    Ok(value)
}

/// Constants assembled by the simplifying coupling relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledConstants {
    pub varsigma: f64,
    /// `[c0, c1, c2, c3]`
    pub c: [f64; 4],
    /// The extra parameter `b` for T3.
    pub b: Option<f64>,
}

/// Free constants consumed where a coupling row leaves a slot arbitrary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeConstants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for FreeConstants {
    fn default() -> Self {
        Self { c0: 1.0, c1: 1.0, c2: 1.0, c3: 1.0 }
    }
}

/// Fill the constants from the coupling row of `set`.
///
/// For T0-T3, `root_value` is the solved `c0` (or `b` for T3) and `varsigma`
/// is the caller's choice. For T4-T6, `varsigma` is overridden by the closed
/// form in `lambda` and `root_value` is ignored.
pub fn coupled_constants(
    set: TSet,
    lambda: f64,
    varsigma: f64,
    root_value: f64,
    free: &FreeConstants,
) -> Result<CoupledConstants> {
    for (name, v) in [("c0", free.c0), ("c1", free.c1), ("c2", free.c2), ("c3", free.c3)] {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!("free constant {name} must be > 0, got {v}")));
        }
    }
    let s = varsigma;
    let out = match set {
        TSet::T0 => {
            let c0 = positive(root_value, "c0")?;
            CoupledConstants {
                varsigma: s,
                c: [c0, 1.0 / (1.0 + c0), s * s / (1.0 + c0), s / (c0 * (1.0 + c0))],
                b: None,
            }
        }
        TSet::T1 => {
            let c0 = positive(root_value, "c0")?;
            CoupledConstants {
                varsigma: s,
                c: [c0, free.c1, 2.0 * s * s / (1.0 + c0), s / (c0 * (1.0 + c0))],
                b: None,
            }
        }
        TSet::T2 => {
            let c0 = positive(root_value, "c0")?;
            CoupledConstants {
                varsigma: s,
                c: [c0, 2.0 / (1.0 + c0), free.c2, s / (c0 * (1.0 + c0))],
                b: None,
            }
        }
        TSet::T3 => {
            let b = positive(root_value, "b")?;
            let c0 = 2.0 / ((1.0 + 1.0 / b) * free.c1);
            CoupledConstants {
                varsigma: s,
                c: [c0, free.c1, free.c1 * s * s / b, free.c3],
                b: Some(b),
            }
        }
        TSet::T4 => {
            let s = 1.0 / (1.0 - lambda);
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InfeasibleTarget(format!(
                    "T4 requires varsigma = 1/(1-lambda) > 0; lambda = {lambda}"
                )));
            }
            CoupledConstants {
                varsigma: s,
                c: [free.c0, free.c1, free.c2, 1.0 / ((1.0 - lambda) * free.c0)],
                b: None,
            }
        }
        TSet::T5 => {
            let s = tanc_sqrt(2.0 * lambda);
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InfeasibleTarget(format!(
                    "T5 requires varsigma = tan(sqrt(2 lambda))/sqrt(2 lambda) > 0; lambda = {lambda}"
                )));
            }
            // c2 = tan^2(sqrt(2 lambda)) / (lambda c0) = 2 s^2 lambda / (lambda c0)
            CoupledConstants {
                varsigma: s,
                c: [free.c0, free.c1, 2.0 * s * s / free.c0, free.c3],
                b: None,
            }
        }
        TSet::T6 => {
            let th = tanhc_sqrt(2.0 * lambda);
            if !(th > 0.0) || !th.is_finite() {
                return Err(Error::InfeasibleTarget(format!(
                    "T6 requires varsigma = sqrt(2 lambda)/tanh(sqrt(2 lambda)) > 0; lambda = {lambda}"
                )));
            }
            CoupledConstants {
                varsigma: 1.0 / th,
                c: [free.c0, 2.0 / free.c0, free.c2, free.c3],
                b: None,
            }
        }
    };
    Ok(out)
}

fn positive(v: f64, name: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
    }
}

/// Effective delta coupling on the delta trihedral surface:
/// `g = eta + lambda - (lambda^2 c0^2 / 3) * factor(P_j)`, with `chi = 1`.
///
/// Preconditions: the surface-constraint residual of the element must be
/// below 1e-8.
pub fn g_on_s_delta(
    set: crate::distribution::PSet,
    eta: f64,
    lambda: f64,
    constants: &crate::distribution::SurfaceConstants,
) -> Result<f64> {
    let res = crate::distribution::p_constraint_residual(set, constants);
    if res > 1e-8 {
        return Err(Error::ConstraintViolation(format!(
            "{set:?} constraint residual {res} exceeds 1e-8"
        )));
    }
    use crate::distribution::PSet as P;
    let [c0, c1, c2, c3] = constants.c;
    let factor = match set {
        P::P0 => c1 + c2 + 3.0 * c3,
        P::P1 => c2 + 3.0 * c3,
        P::P2 => c1 + 3.0 * c3,
        P::P3 => c1 + c2,
        P::P4 => 3.0 * c3,
        P::P5 => c2,
        P::P6 => c1,
    };
    Ok(eta + lambda - lambda * lambda * c0 * c0 / 3.0 * factor)
}

//! Inverse design: from a target coupling to a concrete finite-range
//! rectangular potential that is resonantly transparent there, plus the
//! transmission scan that verifies the resonance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{build_total_potential, geometry, PiecewisePotential, RegularizationParams, SlabGeometry};
use crate::transfer::{closed_form_lambda, scattering, wavenumbers, ConnectionMatrix, TransferMatrix};
use crate::transparency::{
    chi, coupled_constants, g_value, residual, solve_roots, CoupledConstants, FreeConstants,
    TransparencyRoot, TSet,
};

/// Everything `design` needs; exponents default to the set's representative
/// point when `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignRequest {
    pub target_lambda: f64,
    pub set: TSet,
    pub varsigma: f64,
    pub eta: f64,
    pub free: FreeConstants,
    pub exponents: Option<(f64, f64, f64)>,
    pub epsilon: f64,
    pub root_index: usize,
}

impl DesignRequest {
    pub fn new(target_lambda: f64, set: TSet, epsilon: f64) -> Self {
        Self {
            target_lambda,
            set,
            varsigma: 1.0,
            eta: 0.0,
            free: FreeConstants::default(),
            exponents: None,
            epsilon,
            root_index: 1,
        }
    }
}

/// A fully concrete design: the solved root, the coupled constants, and the
/// finite-epsilon rectangle geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseDesign {
    pub target_lambda: f64,
    pub set: TSet,
    pub varsigma: f64,
    pub eta: f64,
    pub root: TransparencyRoot,
    pub constants: CoupledConstants,
    pub exponents: (f64, f64, f64),
    pub epsilon: f64,
    pub params: RegularizationParams,
    pub geometry: SlabGeometry,
}

impl InverseDesign {
    /// The rectangular potential probed at coupling `lambda` (the geometry is
    /// fixed by the design; only the heights scale).
    pub fn potential_at(&self, lambda: f64) -> Result<PiecewisePotential> {
        build_total_potential(&self.params, lambda, self.eta)
    }

    /// Transfer matrix of the design potential probed at `(lambda, E)`.
    pub fn transfer_at(&self, lambda: f64, e: f64) -> TransferMatrix {
        let wn = wavenumbers(e, lambda, self.eta, &self.geometry);
        closed_form_lambda(&wn, self.geometry.l, self.geometry.rho, self.geometry.r)
    }
}

/// Transmission scan around the target coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    /// `(lambda, |T|^2)` samples over the window.
    pub scan: Vec<(f64, f64)>,
    pub peak_lambda: f64,
    pub peak_t2: f64,
    /// Zero-range prediction `4/(4 + (chi - 1/chi)^2 + g^2/k^2)`.
    pub limit_t2: f64,
}

/// Solve the inverse problem at `target_lambda`.
///
/// For T0-T3 the reduced equation is solved for `c0` (or `b`), taking the
/// `root_index`-th root; for T4-T6 `varsigma` is overridden by its closed
/// form in the target coupling.
pub fn design(req: &DesignRequest) -> Result<InverseDesign> {
    if !(req.epsilon > 0.0) || !req.epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {}", req.epsilon)));
    }
    if req.root_index == 0 {
        return Err(Error::InvalidParameter("root_index is 1-based".into()));
    }
    let exponents = req.exponents.unwrap_or_else(|| req.set.default_exponents());
    let (mu, nu, tau) = exponents;
    if !req.set.window_contains(mu, nu, tau) {
        return Err(Error::InvalidParameter(format!(
            "exponents ({mu}, {nu}, {tau}) outside the {} window",
            req.set
        )));
    }

    let (root, constants) = if req.set.has_root_parameter() {
        if !(req.varsigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "varsigma must be > 0, got {}",
                req.varsigma
            )));
        }
        let roots = solve_roots(req.set, req.target_lambda, req.varsigma, 1e3, req.root_index)?;
        let root = *roots.get(req.root_index - 1).ok_or_else(|| {
            Error::InfeasibleTarget(format!(
                "{} has no root #{} at lambda = {} (found {})",
                req.set,
                req.root_index,
                req.target_lambda,
                roots.len()
            ))
        })?;
        let constants =
            coupled_constants(req.set, req.target_lambda, req.varsigma, root.root_value, &req.free)?;
        (root, constants)
    } else {
        let constants =
            coupled_constants(req.set, req.target_lambda, req.varsigma, f64::NAN, &req.free)?;
        // the solved quantity is varsigma itself; record it as the root
        let res = residual(req.set, req.target_lambda, constants.varsigma, f64::NAN)?;
        let root = TransparencyRoot {
            set: req.set,
            lambda: req.target_lambda,
            varsigma: constants.varsigma,
            root_value: constants.varsigma,
            root_index: 1,
            residual: res,
        };
        (root, constants)
    };

    let params = RegularizationParams {
        mu,
        nu,
        tau,
        a: [0.0; 3],
        c: constants.c,
        varsigma: constants.varsigma,
        epsilon: req.epsilon,
    };
    let geometry = geometry(&params)?;

    Ok(InverseDesign {
        target_lambda: req.target_lambda,
        set: req.set,
        varsigma: constants.varsigma,
        eta: req.eta,
        root,
        constants,
        exponents,
        epsilon: req.epsilon,
        params,
        geometry,
    })
}

/// Zero-range connection matrix `(chi, g)` predicted for the design.
pub fn predicted_connection(d: &InverseDesign) -> Result<ConnectionMatrix> {
    let x = chi(d.set, d.target_lambda, d.varsigma, d.root.root_value)?;
    let g = g_value(
        d.set,
        d.target_lambda,
        d.eta,
        d.varsigma,
        d.root.root_value,
        d.constants.c,
        d.exponents,
    )?;
    ConnectionMatrix::new(x, g)
}

/// Sweep `|T|^2(lambda)` over `lambda_window` at the design's fixed epsilon,
/// locate the local maximum nearest the target by golden-section refinement,
/// and attach the zero-range height prediction.
pub fn verify_resonance(
    d: &InverseDesign,
    k: f64,
    lambda_window: (f64, f64),
    samples: usize,
) -> Result<ResonanceReport> {
    let (lo, hi) = lambda_window;
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be > 0, got {k}")));
    }
    if !(lo < d.target_lambda && d.target_lambda < hi) {
        return Err(Error::InvalidParameter(format!(
            "window ({lo}, {hi}) must contain the target {}",
            d.target_lambda
        )));
    }
    if samples < 16 {
        return Err(Error::InvalidParameter("need at least 16 samples".into()));
    }

    let t2_at = |lambda: f64| -> Result<f64> {
        let m = d.transfer_at(lambda, k * k);
        let x2 = d.geometry.rho + d.geometry.r;
        Ok(scattering(&m, k, -d.geometry.l, x2)?.t2)
    };

    let lambdas: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let t2s = sweep(&lambdas, &|l| t2_at(l).unwrap_or(f64::NAN));
    if t2s.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverFailure("transmission sweep produced non-finite values".into()));
    }
    let scan: Vec<(f64, f64)> = lambdas.iter().copied().zip(t2s.iter().copied()).collect();

    // interior local maxima, nearest to the target first
    let mut best: Option<usize> = None;
    for i in 1..samples - 1 {
        if t2s[i] >= t2s[i - 1] && t2s[i] >= t2s[i + 1] {
            let better = match best {
                None => true,
                Some(j) => {
                    (lambdas[i] - d.target_lambda).abs() < (lambdas[j] - d.target_lambda).abs()
                }
            };
            if better {
                best = Some(i);
            }
        }
    }
    let i = best.ok_or_else(|| {
        Error::VerificationFailed(format!(
            "no interior transmission maximum in ({lo}, {hi}) for {}",
            d.set
        ))
    })?;

    let (peak_lambda, peak_t2) =
        golden_max(&|l| t2_at(l).unwrap_or(0.0), lambdas[i - 1], lambdas[i + 1]);
    let limit_t2 = predicted_connection(d)?.transmissibility(k);

    Ok(ResonanceReport { scan, peak_lambda, peak_t2, limit_t2 })
}

/// Evaluate `f` over the grid on worker threads.
fn sweep(xs: &[f64], f: &(dyn Fn(f64) -> f64 + Sync)) -> Vec<f64> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    if workers <= 1 || xs.len() < 64 {
        return xs.iter().map(|&x| f(x)).collect();
    }
    let chunk = xs.len().div_ceil(workers);
    let mut out = vec![0.0; xs.len()];
    std::thread::scope(|scope| {
        for (xs_chunk, out_chunk) in xs.chunks(chunk).zip(out.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (o, &x) in out_chunk.iter_mut().zip(xs_chunk) {
                    *o = f(x);
                }
            });
        }
    });
    out
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let tol = 1e-12 * (a.abs() + b.abs()).max(1.0);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_request(set: TSet, lambda: f64) -> DesignRequest {
        DesignRequest::new(lambda, set, 1e-4)
    }

    #[test]
    fn t0_design_geometry_closed_form() {
        let d = design(&fig_request(TSet::T0, 28.0)).unwrap();
        let c0 = d.root.root_value;
        let e = d.epsilon;
        assert!(d.root.residual.abs() < 1e-10);
        assert!((d.geometry.l - e / (1.0 + c0)).abs() < 1e-18);
        assert!((d.geometry.r - e / (1.0 + c0)).abs() < 1e-18);
        assert!((d.geometry.rho - e / (c0 * (1.0 + c0))).abs() < 1e-18);
    }

    #[test]
    fn t1_design_geometry_closed_form() {
        let mut req = fig_request(TSet::T1, 19.0);
        req.exponents = Some((1.5, 1.0, 0.5));
        let d = design(&req).unwrap();
        let c0 = d.root.root_value;
        let e = d.epsilon;
        assert!((d.geometry.l - e).abs() < 1e-18); // c1 = 1
        assert!((d.geometry.r - 2.0 * e.sqrt() / (1.0 + c0)).abs() < 1e-14);
        assert!((d.geometry.rho - e.sqrt() / (c0 * (1.0 + c0))).abs() < 1e-14);
    }

    #[test]
    fn t3_design_geometry_closed_form() {
        let mut req = fig_request(TSet::T3, 20.0);
        req.exponents = Some((2.0, 2.0, 2.0));
        let d = design(&req).unwrap();
        let b = d.root.root_value;
        let e = d.epsilon;
        assert!((d.geometry.l - e).abs() < 1e-18); // c1 = 1
        assert!((d.geometry.r - e / b).abs() < 1e-14 * (e / b));
        assert!((d.geometry.rho - e * e).abs() < 1e-22); // c3 = 1
    }

    #[test]
    fn design_rejects_lambda_below_critical() {
        let err = design(&fig_request(TSet::T0, 0.5)).unwrap_err();
        assert!(err.to_string().contains("T0"), "{err}");
    }

    #[test]
    fn t4_design_fixes_varsigma_and_chi() {
        let mut req = fig_request(TSet::T4, 0.5);
        req.varsigma = 7.0; // overridden by the closed form
        let d = design(&req).unwrap();
        assert!((d.varsigma - 2.0).abs() < 1e-15);
        assert!(d.root.residual.abs() < 1e-12);
        let conn = predicted_connection(&d).unwrap();
        assert!((conn.chi - 2.0).abs() < 1e-15); // 1/(1 - lambda)
    }

    #[test]
    fn t4_design_infeasible_past_one() {
        assert!(design(&fig_request(TSet::T4, 2.0)).is_err());
    }

    #[test]
    fn predicted_g_zero_without_delta_terms() {
        // T3 interior exponents, eta = 0
        let mut req = fig_request(TSet::T3, 20.0);
        req.exponents = Some((2.0, 2.0, 3.0));
        let d = design(&req).unwrap();
        let conn = predicted_connection(&d).unwrap();
        assert_eq!(conn.g, 0.0);
        assert!(conn.chi.abs() > 0.0);
    }

    #[test]
    fn t1_boundary_g_closed_form() {
        let mut req = fig_request(TSet::T1, 19.0);
        req.exponents = Some((1.5, 1.0, 0.5));
        let d = design(&req).unwrap();
        let conn = predicted_connection(&d).unwrap();
        let (lambda, c0, c1) = (19.0, d.root.root_value, d.constants.c[1]);
        let expect = -(lambda * lambda * c0 * c0 * c1 / 3.0)
            * (2.0 * lambda * c0 / (1.0 + c0)).sqrt().cos()
            / (1.0 + lambda / (1.0 + c0));
        assert!((conn.g - expect).abs() < 1e-10 * expect.abs());
    }

    #[test]
    fn verify_preconditions() {
        let d = design(&fig_request(TSet::T0, 28.0)).unwrap();
        assert!(verify_resonance(&d, 0.0, (20.0, 36.0), 100).is_err());
        assert!(verify_resonance(&d, 1.0, (30.0, 36.0), 100).is_err());
        assert!(verify_resonance(&d, 1.0, (20.0, 36.0), 4).is_err());
    }

    #[test]
    fn coarse_resonance_smoke() {
        // wider rectangles so the peak is broad enough for a quick scan
        let mut req = fig_request(TSet::T0, 28.0);
        req.epsilon = 1e-2;
        let d = design(&req).unwrap();
        let rep = verify_resonance(&d, 1.0, (20.0, 36.0), 400).unwrap();
        assert!(rep.peak_t2 <= 1.0 + 1e-12 && rep.peak_t2 > 0.0);
        assert!((rep.peak_lambda - 28.0).abs() < 2.0);
        assert!(rep.limit_t2 > 0.0 && rep.limit_t2 <= 1.0);
        assert_eq!(rep.scan.len(), 400);
    }

    #[test]
    fn off_resonance_is_opaque() {
        let mut req = fig_request(TSet::T0, 28.0);
        req.epsilon = 1e-3;
        let d = design(&req).unwrap();
        let m = d.transfer_at(14.0, 1.0);
        let s = scattering(&m, 1.0, -d.geometry.l, d.geometry.rho + d.geometry.r).unwrap();
        assert!(s.t2 < 1e-2, "|T|^2 = {}", s.t2);
    }
}

//! The three-rectangle regularizing geometry and the combined finite-range
//! potential for `eta*delta(x) + lambda*delta'(x)`.
//!
//! The rectangle heights and widths follow the power parametrization
//! `h1 = a1 e^{2(1-mu)} + (c0/c1) e^{-mu}`, `h2 = a2 e^{2(1-mu)} - (c0/c2) e^{-nu}`,
//! `h3 = a3 e^{2(1-mu)}`, `h = e^{-tau}/c3`, `l = c1 e`,
//! `r = (c2/varsigma) e^{1-mu+nu}`, `rho = c3 e^{tau}`, where `e` is the
//! squeezing parameter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A constant-height interval of the piecewise potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub left: f64,
    pub width: f64,
    pub height: f64,
}

impl Rectangle {
    pub fn new(left: f64, width: f64, height: f64) -> Result<Self> {
        if !left.is_finite() || !width.is_finite() || !height.is_finite() {
            return Err(Error::InvalidParameter("rectangle fields must be finite".into()));
        }
        if width <= 0.0 {
            return Err(Error::InvalidParameter(format!("rectangle width must be > 0, got {width}")));
        }
        Ok(Self { left, width, height })
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }
}

/// Ordered, contiguous, non-overlapping constant-height intervals; zero outside
/// the support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePotential {
    rectangles: Vec<Rectangle>,
}

impl PiecewisePotential {
    pub fn new(rectangles: Vec<Rectangle>) -> Result<Self> {
        for pair in rectangles.windows(2) {
            let gap = (pair[1].left - pair[0].right()).abs();
            // contiguity up to roundoff relative to the local scale
            let scale = pair[0].width.abs().max(pair[1].width.abs()).max(1.0);
            if gap > 1e-12 * scale {
                return Err(Error::ConstraintViolation(format!(
                    "rectangles must be contiguous, gap {gap} after x = {}",
                    pair[0].right()
                )));
            }
        }
        Ok(Self { rectangles })
    }

    pub fn empty() -> Self {
        Self { rectangles: Vec::new() }
    }

    pub fn rectangles(&self) -> &[Rectangle] {
        &self.rectangles
    }

    /// Support interval `[x1, x2]`; `(0, 0)` for the empty potential.
    pub fn support(&self) -> (f64, f64) {
        match (self.rectangles.first(), self.rectangles.last()) {
            (Some(a), Some(b)) => (a.left, b.right()),
            _ => (0.0, 0.0),
        }
    }

    /// Height at `x` with the left-closed/right-open convention at internal
    /// boundaries; zero outside the support.
    pub fn evaluate(&self, x: f64) -> f64 {
        for rect in &self.rectangles {
            if x >= rect.left && x < rect.right() {
                return rect.height;
            }
        }
        0.0
    }
}

/// Exponents, amplitudes and constants of the power parametrization, plus the
/// squeezing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    pub mu: f64,
    pub nu: f64,
    pub tau: f64,
    /// `[a1, a2, a3]`
    pub a: [f64; 3],
    /// `[c0, c1, c2, c3]`
    pub c: [f64; 4],
    pub varsigma: f64,
    pub epsilon: f64,
}

impl RegularizationParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.mu, self.nu, self.tau, self.varsigma, self.epsilon]
            .into_iter()
            .chain(self.a)
            .chain(self.c);
        for v in all {
            if !v.is_finite() {
                return Err(Error::InvalidParameter("parameters must be finite".into()));
            }
        }
        for (name, v) in [
            ("c0", self.c[0]),
            ("c1", self.c[1]),
            ("c2", self.c[2]),
            ("c3", self.c[3]),
            ("varsigma", self.varsigma),
            ("epsilon", self.epsilon),
        ] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.mu <= 1.0 {
            return Err(Error::InvalidParameter(format!("mu must be > 1, got {}", self.mu)));
        }
        Ok(())
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// The seven rectangle parameters produced by the power parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabGeometry {
    pub h: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub l: f64,
    pub rho: f64,
    pub r: f64,
}

impl SlabGeometry {
    /// Total support width `l + rho + r`.
    pub fn support_width(&self) -> f64 {
        self.l + self.rho + self.r
    }
}

/// Evaluate the power parametrization at the given parameter point.
///
/// When `a1 = a2 = 0` the double-well constraint `h1*h2 < 0` is checked.
pub fn geometry(params: &RegularizationParams) -> Result<SlabGeometry> {
    params.validate()?;
    let e = params.epsilon;
    let [a1, a2, a3] = params.a;
    let [c0, c1, c2, c3] = params.c;

    let g = SlabGeometry {
        h1: a1 * e.powf(2.0 * (1.0 - params.mu)) + (c0 / c1) * e.powf(-params.mu),
        h2: a2 * e.powf(2.0 * (1.0 - params.mu)) - (c0 / c2) * e.powf(-params.nu),
        h3: a3 * e.powf(2.0 * (1.0 - params.mu)),
        h: e.powf(-params.tau) / c3,
        l: c1 * e,
        r: (c2 / params.varsigma) * e.powf(1.0 - params.mu + params.nu),
        rho: c3 * e.powf(params.tau),
    };
    for v in [g.h, g.h1, g.h2, g.h3, g.l, g.rho, g.r] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(
                "geometry overflows double precision at this epsilon".into(),
            ));
        }
    }
    if a1 == 0.0 && a2 == 0.0 && g.h1 * g.h2 >= 0.0 {
        return Err(Error::ConstraintViolation(format!(
            "double-well constraint h1*h2 < 0 violated: h1 = {}, h2 = {}",
            g.h1, g.h2
        )));
    }
    Ok(g)
}

/// Combined potential `eta*Delta_e + lambda*Delta'_e` as three contiguous
/// rectangles: `[-l, 0]` at `lambda*h1`, `[0, rho]` at `eta*h + lambda*h3`,
/// `[rho, rho+r]` at `lambda*h2`.
pub fn build_total_potential(
    params: &RegularizationParams,
    lambda: f64,
    eta: f64,
) -> Result<PiecewisePotential> {
    if lambda == 0.0 {
        return Err(Error::InvalidParameter("lambda must be non-zero".into()));
    }
    let g = geometry(params)?;
    PiecewisePotential::new(vec![
        Rectangle::new(-g.l, g.l, lambda * g.h1)?,
        Rectangle::new(0.0, g.rho, eta * g.h + lambda * g.h3)?,
        Rectangle::new(g.rho, g.r, lambda * g.h2)?,
    ])
}

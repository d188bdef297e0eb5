//! Even analytic functions of a squared argument.
//!
//! Every function here takes the *square* `z` of the underlying wavenumber-like
//! argument, so `cos_sqrt(z) = cos(sqrt(z))` for `z >= 0` and `cosh(sqrt(-z))`
//! for `z < 0`. Written this way they are real-analytic on the whole real line,
//! which lets the transcendental transparency equations and the transfer-matrix
//! entries be evaluated with plain `f64` for either sign of the coupling.

use num_complex::Complex64;

/// cos(sqrt(z)), continued to z < 0 as cosh(sqrt(-z)).
pub fn cos_sqrt(z: f64) -> f64 {
    if z >= 0.0 {
        z.sqrt().cos()
    } else {
        (-z).sqrt().cosh()
    }
}

/// cosh(sqrt(z)), continued to z < 0 as cos(sqrt(-z)).
pub fn cosh_sqrt(z: f64) -> f64 {
    cos_sqrt(-z)
}

/// sin(sqrt(z))/sqrt(z), continued as sinh(sqrt(-z))/sqrt(-z); equals 1 at z = 0.
pub fn sinc_sqrt(z: f64) -> f64 {
    if z.abs() < 1e-12 {
        return 1.0 - z / 6.0 + z * z / 120.0;
    }
    if z >= 0.0 {
        let r = z.sqrt();
        r.sin() / r
    } else {
        let r = (-z).sqrt();
        r.sinh() / r
    }
}

/// sinh(sqrt(z))/sqrt(z), continued as sin(sqrt(-z))/sqrt(-z).
pub fn sinhc_sqrt(z: f64) -> f64 {
    sinc_sqrt(-z)
}

/// tan(sqrt(z))/sqrt(z), continued as tanh(sqrt(-z))/sqrt(-z); equals 1 at z = 0.
pub fn tanc_sqrt(z: f64) -> f64 {
    if z.abs() < 1e-12 {
        return 1.0 + z / 3.0 + 2.0 * z * z / 15.0;
    }
    if z >= 0.0 {
        let r = z.sqrt();
        r.tan() / r
    } else {
        let r = (-z).sqrt();
        r.tanh() / r
    }
}

/// tanh(sqrt(z))/sqrt(z), continued as tan(sqrt(-z))/sqrt(-z).
pub fn tanhc_sqrt(z: f64) -> f64 {
    tanc_sqrt(-z)
}

/// sin(u)/u for complex u, with a Taylor fallback near the removable
/// singularity at u = 0.
pub fn csinc(u: Complex64) -> Complex64 {
    if u.norm() < 1e-6 {
        let u2 = u * u;
        Complex64::new(1.0, 0.0) - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

//! Resonant transmission across a squeezed rectangular model of the
//! delta-prime potential: regularizing geometry, distributional diagnostics,
//! exact transfer matrices, transparency root solving, and inverse design.

pub mod distribution;
pub mod error;
pub mod inverse;
pub mod potential;
pub mod special;
pub mod transfer;
pub mod transparency;

pub use error::{Error, Result};
pub use potential::{build_total_potential, geometry, PiecewisePotential, Rectangle, RegularizationParams, SlabGeometry};
pub use transfer::{
    bound_state, closed_form_lambda, compose_lambda, composed_at, epsilon_limit_probe, scattering,
    slab_matrix, transfer_at, transmissibility_uv, wavenumbers, ConnectionMatrix, ScatteringResult,
    TransferMatrix, Wavenumbers,
};
pub use transparency::{
    chi, coupled_constants, critical_lambda, g_on_s_delta, g_value, residual, solve_roots,
    CoupledConstants, FreeConstants, TransparencyRoot, TSet,
};
pub use inverse::{design, predicted_connection, verify_resonance, DesignRequest, InverseDesign, ResonanceReport};
pub use distribution::{classify, moment, rescaled_profile, MomentReport, PSet, QSet, Role, Surface, SurfaceConstants};

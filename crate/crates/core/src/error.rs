//! Error type shared across the crate.

use thiserror::Error;

/// Failure modes of the numerical layers.
///
/// Non-convergence variants carry the best estimate achieved so callers can
/// decide whether a degraded answer is still useful.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Parameter validation failed (non-positive width, empty grid, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Adaptive 1-D quadrature stopped refining above the requested
    /// tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// Tensor cubature hit the order cap before successive estimates
    /// agreed.
    #[error("cubature did not converge at order {order}: achieved {achieved:.3e}, requested {requested:.3e}")]
    CubatureNonConvergence {
        order: usize,
        achieved: f64,
        requested: f64,
    },

    /// Time grid is not strictly increasing from zero.
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// A query left the domain covered by a trace or interpolant.
    #[error("time {t} outside tabulated range [0, {tmax}]")]
    OutOfRange { t: f64, tmax: f64 },

    /// Both states of a pair coincide; distance-based measures are
    /// undefined.
    #[error("degenerate state pair: trace distance is zero")]
    DegeneratePair,

    /// The ODE integrator underflowed its minimum step size.
    #[error("ODE step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
}

use thiserror::Error;

/// Errors shared across the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Curve construction rejected the parameters (zero radius, empty coefficients, ...).
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    /// x'^2 + y'^2 fell below the regularity threshold; the reduced equation divides by it.
    #[error("singular parameterization at p = {p}: x'^2 + y'^2 = {g:.3e} < 1e-12")]
    SingularParameterization { p: f64, g: f64 },

    /// A scalar argument was outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The grid cannot support the requested stencils.
    #[error("grid too short: n = {n}, need n >= {min}")]
    GridTooShort { n: usize, min: usize },

    /// The initial value problem left the representable range.
    #[error("integration blow-up at step {step} of {steps} (t = {t:.6})")]
    Blowup { step: usize, steps: usize, t: f64 },

    /// Neither the direct shot nor the oracle-seeded retry produced a trajectory.
    #[error("solver failed to produce a trajectory: direct shot: {direct}; oracle-seeded retry: {fallback}")]
    NoTrajectory { direct: String, fallback: String },
}

pub type Result<T> = std::result::Result<T, Error>;

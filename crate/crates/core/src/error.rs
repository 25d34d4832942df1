use thiserror::Error;

/// Errors reported by the numerical and exact routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modular parameter must lie in the upper half plane (Im tau = {0})")]
    InvalidTau(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("point {re}{im:+}i is within {distance:e} of a pole")]
    PoleProximity { re: f64, im: f64, distance: f64 },

    #[error("Im(x) = {im} outside the admissible strip ({lo}, {hi})")]
    StripViolation { im: f64, lo: f64, hi: f64 },

    #[error("integration contour at height {height} passes within {distance} of a pole (guard {guard})")]
    ContourTooClose { height: f64, distance: f64, guard: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("contour radius collapsed: {0}")]
    RadiusCollapse(String),

    #[error("quadrature did not converge: change {change:e} exceeds tolerance {tol:e}")]
    NonConvergent { change: f64, tol: f64 },

    #[error("degenerate linear system: {0}")]
    DegenerateSystem(String),

    #[error("root bracket failed for p_{n} on interval {index}: {detail}")]
    BracketFailure { n: usize, index: usize, detail: String },

    #[error("Hurwitz zeta pole: a = {0} is a non-positive integer")]
    HurwitzPole(f64),

    #[error("graded rationals with different ΔZ powers ({0} vs {1}) cannot be added")]
    GradeMismatch(u32, u32),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

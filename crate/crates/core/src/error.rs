use thiserror::Error;

/// Errors produced by solvers, quadrature and geometry routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad shape parameters, grid not covering the
    /// scatterer, inadmissible material constants, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A geometric constraint was violated (e.g. a probe point fell inside
    /// the scatterer).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// An operation precondition was violated at the call site.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Kernel evaluated at coincident source and observation points.
    #[error("kernel singularity: source and observation points coincide")]
    Singularity,

    /// Iterative solve did not reach the requested tolerance.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    Convergence { residual: f64, iterations: usize },

    /// A reference series (Mie) failed to converge within its order budget.
    #[error("oracle error: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

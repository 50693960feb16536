use thiserror::Error;

/// Errors shared across the simulation modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} outside -{l_max}..{l_max}")]
    OutOfRange { site: i32, l_max: i32 },

    #[error("double occupancy of site {site} forbidden for {statistics}")]
    DoubleOccupancyForbidden { site: i32, statistics: &'static str },

    #[error("eigendecomposition did not converge")]
    ConvergenceFailure,

    #[error("effective parameters undefined at V = 0")]
    ZeroInteraction,

    #[error("mismatched grids: {context}")]
    GridMismatch { context: String },

    #[error("front-speed fit needs at least {needed} time samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("front reached |q| = {radius} with half extent {l_max} inside the fit window")]
    FrontHitBoundary { radius: i32, l_max: i32 },

    #[error("site ({l1}, {l2}) is not part of the waveguide layout")]
    UnsupportedSite { l1: i32, l2: i32 },

    #[error("{0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

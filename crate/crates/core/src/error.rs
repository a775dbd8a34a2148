use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid device graph: {0}")]
    InvalidGraph(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("sector basis for n_sites={n_sites}, n_excitations={n_excitations} is not representable: {reason}")]
    BasisTooLarge {
        n_sites: usize,
        n_excitations: usize,
        reason: String,
    },

    #[error("bitstring {bits:#b} has {found} excitations, sector requires {expected}")]
    WrongPopcount {
        bits: u64,
        found: u32,
        expected: usize,
    },

    #[error("index {index} out of range for sector of dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("imbalance undefined: {excited} excited of {n_sites} sites (need 0 < N_exc < N)")]
    ImbalanceUndefined { excited: usize, n_sites: usize },

    #[error("dimension {dimension} exceeds the full-diagonalization cap {cap}; use the krylov method instead")]
    DimensionOverCap { dimension: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("krylov propagation did not converge: error estimate {estimate:.3e} > tolerance {tolerance:.3e}")]
    KrylovNotConverged { estimate: f64, tolerance: f64 },

    #[error("lanczos did not converge: residual {residual:.3e} > target {target:.3e}")]
    LanczosNotConverged { residual: f64, target: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate spectrum width: E_max ({e_max}) <= E_GS ({e_gs})")]
    DegenerateSpectrum { e_gs: f64, e_max: f64 },

    #[error("only {qualifying} product states qualify for the energy window, {requested} requested")]
    InsufficientStates { qualifying: usize, requested: usize },

    #[error("self-test failed: {0}")]
    SelfTestFailed(String),

    #[error("config error in {path}: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

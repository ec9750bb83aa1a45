//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter failed validation (hard failures only; soft
    /// range advice is reported through [`crate::circuit::CircuitParams::warnings`]).
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The charge-basis truncation cannot host the coupling stencil.
    #[error("basis truncation too small: n_max={n_max}, m_max={m_max} (need at least 4 in each direction)")]
    TruncationTooSmall { n_max: i32, m_max: i32 },

    /// Two operators or an operator/spectrum pair were built on different bases.
    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    /// An operation that needs k eigenpairs was asked for fewer.
    #[error("need at least {need} eigenpairs, requested {got}")]
    TooFewLevels { need: usize, got: usize },

    /// Convergence report needs at least two truncations to compare.
    #[error("convergence report needs at least 2 basis specs, got {got}")]
    TooFewBases { got: usize },

    /// A search bracket does not satisfy its precondition.
    #[error("bracket [{lo}, {hi}] invalid: {reason}")]
    BadBracket { lo: f64, hi: f64, reason: String },

    /// Golden-section search found the maximum on the bracket boundary.
    #[error("objective is maximal at the bracket boundary f={f}; no interior maximum")]
    BoundaryMaximum { f: f64 },

    /// Bisection bracket with no sign change.
    #[error("no sign change across bracket [{lo}, {hi}]: delta({lo}) = {d_lo}, delta({hi}) = {d_hi}")]
    NoSignChange { lo: f64, hi: f64, d_lo: f64, d_hi: f64 },

    /// Time step does not resolve the fastest frequency in the problem.
    #[error("time step dt={dt} ns does not resolve nu_max={nu_max} GHz (need dt <= {limit} ns)")]
    StepTooLarge { dt: f64, nu_max: f64, limit: f64 },

    /// Density-matrix invariants were violated during integration.
    #[error("integration invariant violated at t={t} ns ({detail}); retry with a smaller step than dt={dt} ns")]
    IntegrationInvariant { t: f64, detail: String, dt: f64 },

    /// A density matrix failed its structural invariants.
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// Fourier-extraction window shorter than one oscillation period.
    #[error("extraction window {window} ns is shorter than one period of {nu} GHz")]
    WindowTooShort { window: f64, nu: f64 },

    /// Drive amplitudes outside the weak-drive (perturbative) regime.
    #[error("weak-drive regime violated: {detail}")]
    RegimeViolation { detail: String },

    /// Sweep request malformed.
    #[error("invalid sweep request: {0}")]
    BadSweep(String),

    /// A requested table column does not exist.
    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    /// Plot or serialization asked to run on an empty table.
    #[error("empty table")]
    EmptyTable,

    /// Configuration parse/validation failure, with the offending key path.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// Table deserialization failure.
    #[error("table parse error: {0}")]
    TableParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Machine-readable one-line JSON record, used by the CLI on failure.
    pub fn to_json_record(&self) -> String {
        let kind = match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::TruncationTooSmall { .. } => "truncation_too_small",
            Error::BasisMismatch { .. } => "basis_mismatch",
            Error::TooFewLevels { .. } => "too_few_levels",
            Error::TooFewBases { .. } => "too_few_bases",
            Error::BadBracket { .. } => "bad_bracket",
            Error::BoundaryMaximum { .. } => "boundary_maximum",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::IntegrationInvariant { .. } => "integration_invariant",
            Error::InvalidDensityMatrix(_) => "invalid_density_matrix",
            Error::WindowTooShort { .. } => "window_too_short",
            Error::RegimeViolation { .. } => "regime_violation",
            Error::BadSweep(_) => "bad_sweep",
            Error::UnknownColumn(_) => "unknown_column",
            Error::EmptyTable => "empty_table",
            Error::Config { .. } => "config",
            Error::TableParse(_) => "table_parse",
            Error::Io(_) => "io",
        };
        format!(
            "{{\"error\":{{\"kind\":{},\"message\":{}}}}}",
            serde_json::to_string(kind).unwrap(),
            serde_json::to_string(&self.to_string()).unwrap()
        )
    }
}

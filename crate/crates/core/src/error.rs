use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element does not belong to this platform")]
    PlatformMismatch,

    #[error("decode error: {0}")]
    Decode(String),

    #[error("invalid platform: {0}")]
    InvalidPlatform(String),

    #[error("invalid endomorphism: {0}")]
    InvalidEndomorphism(String),

    /// `s(g, phi, x)` is only defined for `x >= 1`.
    #[error("exponent must be at least 1")]
    ZeroExponent,

    #[error("orbit exceeds cap of {cap} elements")]
    OrbitExceedsCap { cap: u64 },

    #[error("residue modulus {found} does not match period {expected}")]
    ModulusMismatch { expected: u64, found: u64 },

    #[error("element is not on the cycle")]
    NotOnCycle,

    #[error("functions do not hide a shift")]
    NoHiddenShift,

    #[error("period recovery failed after {attempts} attempts")]
    PeriodRecoveryFailed { attempts: u32 },

    #[error("invalid quantum run configuration: {0}")]
    InvalidQuantumConfig(String),

    #[error("invalid amplitude vector: {0}")]
    InvalidState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// True for failures of a probabilistic solver, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::PeriodRecoveryFailed { .. })
    }
}

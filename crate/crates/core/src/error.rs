use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("backend mismatch: {0}")]
    Backend(String),

    #[error("precision exhausted after {0} refinement steps")]
    PrecisionExhausted(usize),

    #[error("cancellation depth exceeded while resolving tied leading terms")]
    CancellationDepth,

    #[error("divisor is not monic of positive degree")]
    NonMonic,

    #[error("shortcut radius exceeded: computed {value}, bound {bound}")]
    ShortcutRadius { value: String, bound: String },

    #[error("shortcut oracle cannot evaluate {0}")]
    ShortcutUnsupported(String),

    #[error("residue equation unsolvable at step {0}")]
    ResidueUnsolvable(usize),

    #[error("root found in the base field at step {0}: not a defect extension")]
    RootFound(usize),

    #[error("pattern undetected after {0} steps")]
    PatternUndetected(usize),

    #[error("stalled at step {step}: value {value} did not increase")]
    Stalled { step: usize, value: String },

    #[error("B unknown: no sup hint and no detected pattern")]
    BUnknown,

    #[error("hint inconsistent: gamma_{rho} = {gamma} is not below B = {bound}")]
    HintInconsistent { rho: usize, gamma: String, bound: String },

    #[error("J not stabilized within {0} family members")]
    NotStabilized(usize),

    #[error("pi-line disagreement at k = {k} (rho = {rho})")]
    PiLineDisagreement { k: usize, rho: usize },

    #[error("non-p-power member {0} in B_n")]
    NonPPower(usize),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("routes disagree: distance route says {distance}, key-polynomial route says {key_poly}")]
    RoutesDisagree { distance: String, key_poly: String },

    #[error("not a defect run: {0}")]
    NotDefect(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("no cached run at {0}")]
    CacheMissing(String),

    #[error("cache mismatch: {0}")]
    CacheMismatch(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("stage {stage}: {source}")]
    Stage { stage: usize, source: Box<Error> },
}

impl Error {
    /// Input problems, as opposed to mathematical failures of a run.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::NotPrime(_)
            | Error::Parse { .. }
            | Error::UnknownBuiltin(_)
            | Error::Backend(_)
            | Error::Config(_) => true,
            Error::Stage { source, .. } => source.is_input_error(),
            Error::Io(_) => true,
            _ => false,
        }
    }

    pub(crate) fn at_stage(self, stage: usize) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage { stage, source: Box::new(e) },
        }
    }
}

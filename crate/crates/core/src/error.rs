use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModlocError {
    #[error("subspace is not standard (cyclic={cyclic}, separating={separating})")]
    NotStandard { cyclic: bool, separating: bool },
    #[error("invalid modular data: {0}")]
    InvalidModularData(String),
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("unitary does not leave the subspace invariant (deviation {0:.3e})")]
    NotInvariant(f64),
    #[error("momentum is not on the open forward cone: {0:?}")]
    OffCone([f64; 3]),
    #[error("section is singular at {0:?}")]
    SectionSingular([f64; 3]),
    #[error("pullback leaves the radial grid for {fraction:.3} of the mass (limit {limit:.3})")]
    OffGrid { fraction: f64, limit: f64 },
    #[error("dilation step {0} is not a multiple of the radial grid step")]
    IncompatibleStep(f64),
    #[error("no PCT operator: kappa > 0 requires the doubled representation")]
    NoPct,
    #[error("spectral cutoff keeps only {kept} of {total} modes")]
    CutoffTooAggressive { kept: usize, total: usize },
    #[error("empty wedge family")]
    EmptyFamily,
    #[error("translation is not along the future edge direction of the wedge")]
    NotEdgeDirection,
    #[error("real subspace K is not invariant under V (deviation {0:.3e})")]
    KNotInvariant(f64),
    #[error("source is not supported in the double cone: {0}")]
    SupportViolation(String),
    #[error("algebra dimension exceeds the limit {0}")]
    DimensionOverflow(usize),
    #[error("vacuum is not cyclic and separating")]
    NotCyclicSeparating,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("checks failed: {0}")]
    CheckFailed(String),
    #[error("replay mismatch: {0}")]
    Mismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ModlocError>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("cannot parse group spec at byte {pos}: {msg}")]
    GroupParse { pos: usize, msg: String },

    #[error("shape mismatch: expected {expected} coordinates, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },

    #[error("frequency {frequency} on torus factor {factor} violates the aliasing guard (N = {modulus})")]
    Aliasing {
        factor: usize,
        frequency: i64,
        modulus: u64,
    },

    #[error("frequency {frequency} on torus factor {factor} exceeds the bandwidth d = {limit}")]
    Bandwidth {
        factor: usize,
        frequency: i64,
        limit: u64,
    },

    #[error("sample table has {found} entries, group order is {expected}")]
    TableSize { expected: usize, found: usize },

    #[error("group of order {order} exceeds the enumeration budget of {budget} points")]
    EnumerationBudget { order: u64, budget: u64 },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sector {index} has width {width:.6} < 2π/n = {min:.6}")]
    SectorTooNarrow { index: usize, width: f64, min: f64 },

    #[error("point {index} has modulus {modulus:.6} outside the annulus [{inner:.6}, 1]")]
    AnnulusViolation {
        index: usize,
        modulus: f64,
        inner: f64,
    },

    #[error("insufficient frequency headroom: need |s| >= {required:.3} within |s| < N/2 = {guard}; best available {best:?}")]
    InsufficientHeadroom {
        required: f64,
        guard: u64,
        best: Option<i64>,
    },

    #[error("no fresh coordinate: every factor carrying a spectrum element is touched by the family")]
    NoFreshCoordinate,

    #[error("alignment unsolvable for function {index}: best defect {defect:.6}")]
    AlignmentUnsolvable { index: usize, defect: f64 },

    #[error("insufficient independent tail characters: need {required}, found {found}")]
    InsufficientTail { required: usize, found: usize },

    #[error("finite window exhausted ({case}): {detail}")]
    WindowExhausted { case: String, detail: String },

    #[error("target missed for function {index}: achieved {achieved:.9} < {target:.9}")]
    TargetMissed {
        index: usize,
        achieved: f64,
        target: f64,
    },

    #[error("certificate schema error: {0}")]
    Schema(String),
}

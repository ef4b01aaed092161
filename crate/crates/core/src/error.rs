use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("instance has no points")]
    EmptyInstance,

    #[error("duplicate point id `{0}`")]
    DuplicateId(String),

    #[error("unknown point id `{0}`")]
    UnknownId(String),

    #[error("point index {index} out of range for {size} points")]
    IndexOutOfRange { index: usize, size: usize },

    #[error(
        "matrix shape mismatch: expected {expected}x{expected}, row {row} has {found} entries"
    )]
    Shape {
        expected: usize,
        row: usize,
        found: usize,
    },

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),

    #[error("nonzero diagonal entry D({id},{id}) = {value}")]
    NonzeroDiagonal { id: String, value: f64 },

    #[error("symmetry violation: D({x},{y}) = {xy} but D({y},{x}) = {yx}")]
    Asymmetric {
        x: String,
        y: String,
        xy: f64,
        yx: f64,
    },

    #[error("nonpositive off-diagonal entry D({x},{y}) = {value}")]
    NonpositiveEntry { x: String, y: String, value: f64 },

    #[error("unknown F-function `{0}`")]
    UnknownFunction(String),

    #[error("F-function `{name}` does not take parameter `{param}`")]
    UnexpectedParam { name: String, param: String },

    #[error("alpha must be a finite nonnegative real, got {0}")]
    InvalidAlpha(f64),

    #[error("{name} evaluated outside (0, inf): t = {t:e}")]
    Domain { name: String, t: f64 },

    #[error("{name}({t:e}) is not finite")]
    NonFiniteValue { name: String, t: f64 },

    #[error("no lower bracket for {name} below y = {y}: the function does not diverge to -inf numerically")]
    BracketFailure { name: String, y: f64 },

    #[error("target value must be finite, got {0}")]
    NonFiniteTarget(f64),

    #[error("sample grid must be positive and ascending (violation at position {0})")]
    InvalidGrid(usize),

    #[error("chain endpoints must differ")]
    SameEndpoints,

    #[error("brute-force enumeration is limited to {limit} points, instance has {size}")]
    TooLargeForBruteForce { size: usize, limit: usize },

    #[error("radius must be a finite positive real, got {0}")]
    InvalidRadius(f64),

    #[error("set must be nonempty")]
    EmptySet,

    #[error("ball family does not cover point index {0}")]
    NotACover(usize),

    #[error("nested family must contain at least one set")]
    EmptyFamily,

    #[error("family member {0} is empty")]
    EmptyMember(usize),

    #[error("family member {0} is not contained in member {prev}", prev = .0 - 1)]
    NotNested(usize),

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("invalid weight distribution: {0}")]
    InvalidDistribution(String),

    #[error("point count must be at least 1")]
    NoPoints,

    #[error("benchmark needs at least one size")]
    NoSizes,

    #[error("kernels disagree at n = {n}: max abs difference {max_diff:e} at ({i}, {j})")]
    KernelDisagreement {
        n: usize,
        i: usize,
        j: usize,
        max_diff: f64,
    },
}

impl Error {
    /// Numeric failures (as opposed to malformed input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::NonFiniteValue { .. }
                | Error::BracketFailure { .. }
                | Error::KernelDisagreement { .. }
        )
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gradient of the defining function is degenerate (|∇ρ| = {norm:e})")]
    DegenerateGradient { norm: f64 },

    #[error("point is not on the boundary (|ρ| = {value:e})")]
    NotOnBoundary { value: f64 },

    #[error("vector field is not tangent to the boundary (|dρ(T)| = {value:e})")]
    NotTangent { value: f64 },

    #[error("ω₀(T) = {alpha} is not positive at this point")]
    NonPositiveAlpha { alpha: f64 },

    #[error("complex dimension {n} too small for this operation")]
    DimensionTooSmall { n: usize },

    #[error("index count {count} exceeds the configured budget {budget}")]
    CapacityExceeded { count: u128, budget: usize },

    #[error("quadrature needs {nodes} nodes, budget is {budget}")]
    QuadratureBudgetExceeded { nodes: u128, budget: usize },

    #[error("resolvent ill-conditioned on the quadrature grid after {refinements} refinements")]
    ResolventIllConditioned { refinements: usize },

    #[error("kernel summation lost all significant digits (cancellation factor e^{spread:.1})")]
    UnstableSummation { spread: f64 },

    #[error("kernel evaluation near the Bergman singularity (|1 - <z,w>| = {gap:e})")]
    NearSingular { gap: f64 },

    #[error("depth {depth} exceeds the admissible interior depth {max}")]
    DepthTooLarge { depth: f64, max: f64 },

    #[error("growth-order fit expects positive values, got {value} at position {index}")]
    NonPositiveValue { index: usize, value: f64 },

    #[error("invalid χ profile: {0}")]
    InvalidProfile(String),

    #[error("point lies outside the closed domain: {0}")]
    OutsideDomain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error comes from a resource budget rather than bad input or math.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::CapacityExceeded { .. } | Error::QuadratureBudgetExceeded { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: asymmetry ‖H − H†‖_F = {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("inconsistent constraint dimensions: constraint {index} has {found} coefficients, blocks need {expected}")]
    ConstraintDimension {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("bracket does not straddle the threshold: predicate({lo}) = {lo_value}, predicate({hi}) = {hi_value}")]
    BracketNotStraddling {
        lo: f64,
        hi: f64,
        lo_value: bool,
        hi_value: bool,
    },

    #[error("generator {index} depends on the previous generators (residual {residual:.3e})")]
    DependentGenerators { index: usize, residual: f64 },

    #[error("span is not adjoint-closed: adjoint of generator {index} is at distance {distance:.3e} from the span")]
    NotAdjointClosed { index: usize, distance: f64 },

    #[error("unital flag set but the identity is at distance {distance:.3e} from the span")]
    UnitNotInSpan { distance: f64 },

    #[error("system is already unital")]
    AlreadyUnital,

    #[error("operands belong to different operator systems ({left} vs {right})")]
    SystemMismatch { left: String, right: String },

    #[error("input is not self-adjoint (asymmetry {asymmetry:.3e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("map does not preserve adjoints (defect {defect:.3e})")]
    NotAdjointPreserving { defect: f64 },

    #[error("system is not commutative: {0}")]
    NonCommutative(String),

    #[error("malformed ordered space: {0}")]
    MalformedSpace(String),

    #[error("adjacency matrix is not symmetric at ({0}, {1})")]
    AsymmetricAdjacency(usize, usize),

    #[error("requested {k} generators but M_{d} has real dimension {max}")]
    TooManyGenerators { k: usize, d: usize, max: usize },

    #[error("element is not in the cone: {0}")]
    NotInCone(String),

    #[error("json error at {path}: {message}")]
    Json { path: String, message: String },

    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::Shape {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

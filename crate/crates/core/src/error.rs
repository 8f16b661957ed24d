use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative of order {order} unsupported for `{name}` at x = {x}")]
    OrderUnsupported { name: String, order: usize, x: f64 },

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("builtin `{name}` expects {expected} parameter(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("degenerate metric at x = {x}, u = {u}: cosh u - h sinh u = {factor:e}")]
    DegenerateMetric { x: f64, u: f64, factor: f64 },

    #[error("metric is singular at ({0}, {1}, {2})")]
    SingularMetric(f64, f64, f64),

    #[error("step size must be positive, got {0}")]
    StepSize(f64),

    #[error("parameter {s} is outside the sampled span [{lo}, {hi}]")]
    OutOfSpan { s: f64, lo: f64, hi: f64 },

    #[error("nearest foot point lies at the boundary of the sampled span (t = {0})")]
    NotInSpan(f64),

    #[error("turning angle is not 1-Lipschitz: slope {slope} near t = {t}")]
    NonFoliating { t: f64, slope: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("path back-tracks in x at vertex {0}")]
    NonMonotonePath(usize),

    #[error("bad letter `{0}`")]
    BadLetter(String),

    #[error("enumeration of {count} words exceeds the cap of {cap}")]
    ResourceGuard { count: u64, cap: u64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

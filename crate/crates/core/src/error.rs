use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("singular symbol: nonzero coefficient on kernel mode (k={k}, eta={eta}, l={l})")]
    SingularSymbol { k: i64, eta: f64, l: i64 },
    #[error("nonzero data on the operator kernel: {0}")]
    Kernel(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("wrong mode sector: {0}")]
    WrongSector(String),
    #[error("quadrature did not converge on [{a}, {b}] ({context})")]
    Quadrature { a: f64, b: f64, context: String },
    #[error("time step unstable after {retries} halvings (last dt = {dt})")]
    Stability { dt: f64, retries: u32 },
    #[error("CFL breach at t = {t}: dt = {dt}, suggested dt = {suggested}")]
    Cfl { t: f64, dt: f64, suggested: f64 },
    #[error("value out of range: {0}")]
    Range(String),
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("oracle refused: {0}")]
    Oracle(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("matrix is not positive semi-definite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix is not realizable as a {k}-plane mixture: largest eigenvalue {lambda_max} exceeds 1/{k}")]
    NotRealizable { k: usize, lambda_max: f64 },
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("target dimension {k} outside 1..={n}")]
    BadDimension { k: usize, n: usize },
    #[error("operation supports dimension 2 only, got {0}")]
    DimensionUnsupported(usize),
    #[error("linear solve did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolveFailure { residual: f64, iterations: usize },
    #[error("window R={r} needs {nodes} nodes, budget is {budget}")]
    BudgetExceeded { r: usize, nodes: usize, budget: usize },
    #[error("network is not stationary: max residual {0:e}")]
    NotStationary(f64),
    #[error("radius {0} is not in (0, 1/2)")]
    RadiusTooLarge(f64),
    #[error("degenerate mass profile: {0}")]
    DegenerateProfile(String),
    #[error("injection does not balance on component {component}: net mass {net:e}")]
    UnbalancedInjection { component: usize, net: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

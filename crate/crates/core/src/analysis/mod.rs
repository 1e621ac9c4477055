//! Balance, maximality and density diagnostics of network media.

mod balance;
mod density;
mod irreducible;
mod stationary;

pub use balance::{
    balance_report, maximality_check, node_residuals, valency, BalanceReport, MaximalityReport,
    NodeBalance, ValencyReport,
};
pub use density::{
    ball_mass_profile, estimate_local_dimension, geometric_radii, monotonicity_check,
    BallMassProfile, LocalDimension, MonotonicityReport,
};
pub use irreducible::{irreducible, IrreducibilityReport, IrreducibilityVerdict, DEFAULT_EDGE_BUDGET};
pub use stationary::{stationary_weights, StationaryOutcome, WEIGHT_MARGIN};

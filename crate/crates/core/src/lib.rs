//! Conductive media supported on periodic networks of the flat torus.
//!
//! The crate computes effective conductance tensors of network media through
//! the periodic cell problem, relates their kernel to the homotopy lattice of
//! the support, checks attainment of the upper bound through node balance,
//! and simulates fluctuation-driven conductance adaptation.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod adaptation;
pub mod analysis;
pub mod cellsolver;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod mixture;
pub mod network;
pub mod scalar;
pub mod topology;

pub use adaptation::{
    adapt, darcy_solve, AdaptOptions, AdaptationTrace, FluctuationModel, SinkMode, TraceStep,
};
pub use analysis::{
    balance_report, ball_mass_profile, estimate_local_dimension, irreducible, maximality_check,
    monotonicity_check, stationary_weights, valency, BalanceReport, BallMassProfile,
    IrreducibilityReport, IrreducibilityVerdict, LocalDimension, MaximalityReport,
    MonotonicityReport, StationaryOutcome, ValencyReport,
};
pub use cellsolver::{
    effective_bilinear, effective_tensor, homogenize_window, subdivide, EffectiveTensor,
    HomogenizationTrace,
};
pub use error::{Error, Result};
pub use linalg::{kernel_basis, largest_principal_angle, SymMatrix};
pub use mixture::{mass_tensor, realizable_dimension, realize_as_mixture, ProjectionMixture};
pub use network::{Anisotropy, Edge, NetworkMedium, PeriodicNetwork, TorusPoint};
pub use scalar::{Real, Tolerances};
pub use topology::{
    classify, components, cycle_lattice, planarize, Classification, CycleLattice, LatticeKind,
};

pub type SymMatrix64 = SymMatrix<f64>;
pub type Network = PeriodicNetwork<f64>;
pub type Medium = NetworkMedium<f64>;
pub type Point = TorusPoint<f64>;
pub type Mixture = ProjectionMixture<f64>;
pub type Effective = EffectiveTensor<f64>;
pub type Classified = Classification<f64>;
pub type Trace = AdaptationTrace<f64>;

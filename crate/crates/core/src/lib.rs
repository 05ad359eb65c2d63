//! Squeezed-state dynamics for one-dimensional quadratic Hamiltonians.
//!
//! The engine follows the auxiliary-equation approach: a classical solution
//! pair with unit Wronskian determines the quantum evolution of Gaussian
//! (displaced, squeezed) states exactly. On top of that sit the catalog of
//! solvable systems, the three equivalent state parameterizations, second
//! moments and uncertainty products, an independent split-step grid
//! propagator for cross-checks, and a small CLI.

pub mod aux_solutions;
pub mod cli;
pub mod driving;
pub mod expr;
pub mod ode;
pub mod oracle;
pub mod phase_space;
pub mod systems;
pub mod verify;

pub use aux_solutions::{analytic_basis, numeric_basis, AuxiliaryBasis, BasisInitialConditions};
pub use driving::{driving_integrals, DrivingIntegrals};
pub use expr::CoefficientFn;
pub use phase_space::{Covariance, InitialPhasePoint, Representation, SqueezeParameters};
pub use systems::{make_system, SystemKind, SystemParams, SystemSpec};

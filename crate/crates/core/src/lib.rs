//! Numerical laboratory for a nonlinear Schrödinger equation with a
//! nonnegative short-range potential on a 2D periodic box: spectral operator
//! calculus for −Δ_V (resolvents, heat semigroup, fractional powers by two
//! routes), the commutator operator A(s), the estimate surveys behind the
//! dispersive machinery, the zero-regular-point test, and a split-step solver
//! that measures t^{−1} decay and scattering at desk scale.

pub mod commutator;
pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod field;
pub mod fields;
pub mod grid;
pub mod norms;
pub mod operator;
pub mod potential;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use field::ComplexField;
pub use grid::Grid2D;
pub use operator::{OperatorMode, SpectralOperator};
pub use potential::PotentialSpec;

//! Continuous non-selective quantum measurement of composite systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`matrix`], [`eigen`], [`state`]: dense complex matrices, a Jacobi
//!   Hermitian eigensolver and validated states/observables/unitaries.
//! - [`lindblad`]: single-channel Lindblad and measurement generators, RK4
//!   evolution and linear-entropy rate diagnostics.
//! - [`composite`]: the twisted swap observable on two equal parts and the
//!   reduced dynamics of receiver and sender.
//! - [`infoexchange`]: information gain, optimal receiver states and the
//!   efficiency of the exchange, with and without an energy constraint.
//! - [`closedform`]: exact dephasing solutions for additive and
//!   multiplicative observables.
//! - [`scenario`]: config parsing and the runnable experiments behind the
//!   `cqm` binary.

pub mod closedform;
pub mod composite;
pub mod eigen;
pub mod error;
pub mod infoexchange;
pub mod lindblad;
pub mod literal;
pub mod matrix;
pub mod ode;
pub mod scenario;
pub mod state;
pub mod trajectory;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, Subsystem, C64};
pub use state::{DensityMatrix, HermitianObservable, UnitaryMap};

use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(ValidationReport),
    #[error("NotHermitian: max |a_ij - conj(a_ji)| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("NotUnitary: max |UU† - 1| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("Hamiltonians are not unitarily equivalent: max |H_S - U H_R U†| = {deviation:.3e}")]
    NotEquivalent { deviation: f64 },
    #[error("PropertyViolated: property ({property}) of the swap observable fails by {residual:.3e}")]
    PropertyViolated {
        property: ObservableProperty,
        residual: f64,
    },
    #[error("StepRejected at t = {t}: eigenvalue {min_eigenvalue:.3e} below guard (reduce dt)")]
    StepRejected { t: f64, min_eigenvalue: f64 },
    #[error("NotCommuting: max |[R, R†]| = {norm:.3e}")]
    NotCommuting { norm: f64 },
    #[error("Hamiltonian is not traceless (tr H = {trace:.3e}); shift it first")]
    NotTraceless { trace: f64 },
    #[error("NotPositive: isoenergetic optimum leaves the state space (eigenvalue {min_eigenvalue:.3e})")]
    Infeasible { min_eigenvalue: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Tags for the three algebraic properties the measured observable must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableProperty {
    /// O = O† = T (U ⊗ U†)
    Hermitian,
    /// O² = 1
    Involution,
    /// [O, H_C] = 0
    ConservesEnergy,
}

impl fmt::Display for ObservableProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hermitian => "a: hermitian",
            Self::Involution => "b: involution",
            Self::ConservesEnergy => "c: commutes with H_C",
        })
    }
}

/// One violated density-matrix invariant with its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NotHermitian { deviation: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotHermitian { deviation } => write!(f, "NotHermitian (deviation {deviation:.3e})"),
            Self::TraceNotOne { trace } => write!(f, "TraceNotOne (trace {trace:.6})"),
            Self::NotPositive { min_eigenvalue } => {
                write!(f, "NotPositive (min eigenvalue {min_eigenvalue:.3e})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_not_hermitian(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::NotHermitian { .. }))
    }

    pub fn has_trace_not_one(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::TraceNotOne { .. }))
    }

    pub fn has_not_positive(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::NotPositive { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

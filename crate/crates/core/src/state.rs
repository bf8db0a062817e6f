//! Validated value types: density matrices, observables and unitaries, plus
//! the entropy functionals defined on states.

use crate::eigen::{hermitian_eigen, hermitian_eigenvalues};
use crate::error::{Error, Result, ValidationReport, Violation};
use crate::matrix::{partial_trace_matrix, ComplexMatrix, Subsystem, C64};

/// Max |ρ_ij − conj(ρ_ji)| accepted as Hermitian.
pub const TOL_HERM: f64 = 1e-10;
/// Max |tr ρ − 1| accepted as normalized.
pub const TOL_TRACE: f64 = 1e-10;
/// Smallest eigenvalue accepted is −TOL_PSD.
pub const TOL_PSD: f64 = 1e-9;
/// Max entrywise deviation of UU† and U†U from the identity.
pub const TOL_UNITARY: f64 = 1e-10;

/// A Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` and wraps it. Fails with [`Error::InvalidState`] listing
    /// every violated invariant.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density_matrix(m)
    }

    /// Skips validation; for internal results that are valid by construction
    /// and have already been checked numerically.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "state vector must be nonzero and finite".into(),
            ));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&v, &v),
        })
    }

    /// |k⟩⟨k| in dimension `n`.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for dim {n}"
            )));
        }
        Ok(Self {
            matrix: ComplexMatrix::basis_projector(n, k, k),
        })
    }

    /// 1/N.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density matrix is square")
    }

    /// ⟨A⟩ = tr(ρA), real part.
    pub fn expectation(&self, a: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(a).re
    }

    /// U ρ U†.
    pub fn conjugated(&self, u: &UnitaryMap) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::Dimension {
                context: "unitary conjugation",
                expected: self.dim(),
                found: u.dim(),
            });
        }
        Ok(Self {
            matrix: self.matrix.conjugate_by(u.matrix()),
        })
    }

    /// ρ_a ⊗ ρ_b.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: crate::matrix::tensor_product(&self.matrix, &other.matrix),
        }
    }
}

/// Checks the three density-matrix invariants and reports all failures.
pub fn validate_density_matrix(m: ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let mut report = ValidationReport::default();
    let herm = m.hermiticity_deviation();
    if herm > TOL_HERM {
        report
            .violations
            .push(Violation::NotHermitian { deviation: herm });
    }
    let tr = m.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > TOL_TRACE {
        report.violations.push(Violation::TraceNotOne { trace: tr.re });
    }
    let min_eig = hermitian_eigenvalues(&m)?.first().copied().unwrap_or(0.0);
    if min_eig < -TOL_PSD {
        report.violations.push(Violation::NotPositive {
            min_eigenvalue: min_eig,
        });
    }
    if report.is_empty() {
        Ok(DensityMatrix { matrix: m })
    } else {
        Err(Error::InvalidState(report))
    }
}

/// S = 1 − tr(ρ²).
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// −Σ λ ln λ over the spectrum, with 0 ln 0 = 0. Tiny negative eigenvalues
/// from rounding are treated as zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    von_neumann_from_spectrum(&rho.eigenvalues())
}

pub(crate) fn von_neumann_from_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Reduced state of one factor of a `(d_r·d_s)`-dimensional state.
pub fn partial_trace(rho_c: &DensityMatrix, keep: Subsystem, dims: (usize, usize)) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(rho_c.matrix(), keep, dims)?;
    Ok(DensityMatrix::from_trusted(m.hermitian_part()))
}

/// Trace distance ½‖a − b‖₁.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            context: "trace distance",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff)?.iter().map(|l| l.abs()).sum::<f64>())
}

/// A Hermitian operator (within [`TOL_HERM`]); stored exactly symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: ComplexMatrix,
}

impl HermitianObservable {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let deviation = m.hermiticity_deviation();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix: m.hermitian_part(),
        })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> crate::eigen::HermitianEigen {
        hermitian_eigen(&self.matrix).expect("observable is square")
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// O − (tr O / N)·1, together with the removed shift tr O / N.
    pub fn traceless_shifted(&self) -> (Self, f64) {
        let shift = self.trace() / self.dim() as f64;
        let id = ComplexMatrix::identity(self.dim());
        (
            Self {
                matrix: self.matrix.add_scaled(&id, -shift),
            },
            shift,
        )
    }
}

/// A unitary matrix (within [`TOL_UNITARY`]).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMap {
    matrix: ComplexMatrix,
}

impl UnitaryMap {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let id = ComplexMatrix::identity(m.rows());
        let d = m.dagger();
        let deviation = (&m * &d).max_abs_diff(&id).max((&d * &m).max_abs_diff(&id));
        if deviation > TOL_UNITARY {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix: m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
        }
    }

    /// exp(−i·H·θ) for Hermitian H.
    pub fn exp_i(h: &HermitianObservable, theta: f64) -> Self {
        let e = h.eigen();
        Self {
            matrix: e.spectral_map(|l| C64::from_polar(1.0, -l * theta)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.dagger(),
        }
    }
}

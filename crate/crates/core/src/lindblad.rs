//! Lindblad and continuous-measurement generators, the fixed-step integrator
//! that drives them, and linear-entropy rate diagnostics.
//!
//! With ħ = 1 a single-channel Lindblad generator reads
//!
//! ```text
//! dρ/dt = −i[H, ρ] + (γ/2)([Rρ, R†] + [R, ρR†])
//! ```
//!
//! and continuous non-selective measurement of an observable O is the special
//! case H = 0, R = R† = O, which collapses to the double commutator
//! `−(γ/2)[O, [O, ρ]]`.

use crate::error::{Error, Result};
use crate::matrix::{commutator, ComplexMatrix, C64, I};
use crate::ode::{rk4_step, step_schedule};
use crate::state::{von_neumann_from_spectrum, DensityMatrix, HermitianObservable};
use crate::trajectory::{Sample, Trajectory};

/// Eigenvalue floor below which an integration step is rejected.
pub const STEP_GUARD: f64 = -1e-6;
/// Default step in units of 1/γ.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default horizon in units of 1/γ.
pub const DEFAULT_T_FINAL: f64 = 20.0;

/// Anything that produces dρ/dt for a square matrix of fixed dimension.
pub trait Generator {
    fn dim(&self) -> usize;

    /// Right-hand side on an arbitrary matrix (RK stages are not states).
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix;

    /// Hamiltonian whose expectation is recorded along trajectories.
    fn hamiltonian(&self) -> Option<&HermitianObservable> {
        None
    }
}

#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    hamiltonian: HermitianObservable,
    jump: ComplexMatrix,
    jump_dagger: ComplexMatrix,
    rate: f64,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: HermitianObservable, jump: ComplexMatrix, rate: f64) -> Result<Self> {
        if !jump.is_square() {
            return Err(Error::NotSquare {
                rows: jump.rows(),
                cols: jump.cols(),
            });
        }
        if jump.rows() != hamiltonian.dim() {
            return Err(Error::Dimension {
                context: "jump operator vs Hamiltonian",
                expected: hamiltonian.dim(),
                found: jump.rows(),
            });
        }
        check_rate(rate)?;
        let jump_dagger = jump.dagger();
        Ok(Self {
            hamiltonian,
            jump,
            jump_dagger,
            rate,
        })
    }

    /// Pure dissipator, H = 0.
    pub fn dissipator(jump: ComplexMatrix, rate: f64) -> Result<Self> {
        let n = jump.rows();
        Self::new(HermitianObservable::zero(n), jump, rate)
    }

    /// Decay into |g⟩ = |0⟩ of a two-level system: R = |g⟩⟨e|.
    pub fn two_level_decay(rate: f64) -> Result<Self> {
        Self::dissipator(ComplexMatrix::basis_projector(2, 0, 1), rate)
    }

    pub fn jump(&self) -> &ComplexMatrix {
        &self.jump
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn hamiltonian_observable(&self) -> &HermitianObservable {
        &self.hamiltonian
    }
}

impl Generator for LindbladGenerator {
    fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = self.hamiltonian.matrix();
        let r = &self.jump;
        let rd = &self.jump_dagger;
        let unitary = (&(h * rho) - &(rho * h)).scale(-I);
        let r_rho = r * rho;
        let rho_rd = rho * rd;
        let a = &(&r_rho * rd) - &(rd * &r_rho);
        let b = &(r * &rho_rd) - &(&rho_rd * r);
        unitary.add_scaled(&(&a + &b), 0.5 * self.rate)
    }

    fn hamiltonian(&self) -> Option<&HermitianObservable> {
        Some(&self.hamiltonian)
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementGenerator {
    observable: HermitianObservable,
    rate: f64,
}

impl MeasurementGenerator {
    pub fn new(observable: HermitianObservable, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self { observable, rate })
    }

    pub fn observable(&self) -> &HermitianObservable {
        &self.observable
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// The same dynamics written as a Lindblad generator with H = 0, R = O.
    pub fn to_lindblad(&self) -> LindbladGenerator {
        LindbladGenerator::dissipator(self.observable.matrix().clone(), self.rate)
            .expect("observable is square with a valid rate")
    }
}

impl Generator for MeasurementGenerator {
    fn dim(&self) -> usize {
        self.observable.dim()
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let o = self.observable.matrix();
        let inner = &(o * rho) - &(rho * o);
        let outer = &(o * &inner) - &(&inner * o);
        outer.scale_real(-0.5 * self.rate)
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rate must be finite and >= 0, got {rate}"
        )));
    }
    Ok(())
}

fn check_dim(gen: &impl Generator, rho: &DensityMatrix) -> Result<()> {
    if gen.dim() != rho.dim() {
        return Err(Error::Dimension {
            context: "generator vs state",
            expected: gen.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

pub fn lindblad_rhs(gen: &LindbladGenerator, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    check_dim(gen, rho)?;
    Ok(gen.apply(rho.matrix()))
}

pub fn measurement_rhs(gen: &MeasurementGenerator, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    check_dim(gen, rho)?;
    Ok(gen.apply(rho.matrix()))
}

/// Hermitizes and renormalizes a raw integrator state, then checks the
/// eigenvalue guard. Returns the state and its spectrum.
pub(crate) fn settle_state(m: ComplexMatrix, t: f64) -> Result<(DensityMatrix, Vec<f64>)> {
    if !m.is_finite() {
        return Err(Error::StepRejected {
            t,
            min_eigenvalue: f64::NAN,
        });
    }
    let h = m.hermitian_part();
    let tr = h.trace().re;
    let h = h.scale_real(1.0 / tr);
    let values = crate::eigen::hermitian_eigenvalues(&h)?;
    let min_eigenvalue = values.first().copied().unwrap_or(0.0);
    if min_eigenvalue < STEP_GUARD {
        return Err(Error::StepRejected { t, min_eigenvalue });
    }
    Ok((DensityMatrix::from_trusted(h), values))
}

pub(crate) fn sample_from(t: f64, state: DensityMatrix, spectrum: &[f64], energy: Option<f64>) -> Sample {
    let purity = state.purity();
    Sample {
        t,
        purity,
        linear_entropy: 1.0 - purity,
        von_neumann_entropy: von_neumann_from_spectrum(spectrum),
        energy,
        state,
    }
}

/// Integrates `gen` from `rho0` over `[0, t_final]` with fixed-step RK4.
///
/// Every step is re-Hermitized and trace-renormalized; a snapshot is stored
/// at t = 0 and after every step.
pub fn evolve(gen: &impl Generator, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<Trajectory> {
    check_dim(gen, rho0)?;
    check_horizon(t_final, dt)?;
    let energy = |rho: &DensityMatrix| gen.hamiltonian().map(|h| rho.expectation(h.matrix()));

    let spectrum0 = rho0.eigenvalues();
    let steps = step_schedule(t_final, dt);
    let mut samples = Vec::with_capacity(steps.len() + 1);
    samples.push(sample_from(0.0, rho0.clone(), &spectrum0, energy(rho0)));

    let mut current = rho0.matrix().clone();
    let mut t = 0.0;
    for (k, h) in steps.iter().enumerate() {
        let next = rk4_step(&current, *h, |m| gen.apply(m));
        t = if k + 1 == steps.len() {
            t_final
        } else {
            (k + 1) as f64 * dt
        };
        let (state, spectrum) = settle_state(next, t)?;
        current = state.matrix().clone();
        let e = energy(&state);
        samples.push(sample_from(t, state, &spectrum, e));
    }
    debug_assert!((t - t_final).abs() < 1e-9);
    Ok(Trajectory::new(samples))
}

pub(crate) fn check_horizon(t_final: f64, dt: f64) -> Result<()> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_final must be > 0, got {t_final}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= t_final) {
        return Err(Error::InvalidArgument(format!(
            "dt must satisfy 0 < dt <= t_final, got {dt}"
        )));
    }
    Ok(())
}

/// dS/dt = 2γ·tr(R†Rρ² − ρRρR†) for the linear entropy S = 1 − tr ρ².
/// The Hamiltonian part never changes tr ρ², so only the dissipator enters.
pub fn entropy_rate(gen: &LindbladGenerator, rho: &DensityMatrix) -> Result<f64> {
    check_dim(gen, rho)?;
    let r = gen.jump();
    let rd = &gen.jump_dagger;
    let p = rho.matrix();
    let rho2 = p * p;
    let first = (rd * r).trace_product(&rho2);
    let second = (&(p * r) * p).trace_product(rd);
    let value: C64 = (first - second) * (2.0 * gen.rate());
    Ok(value.re)
}

/// Both sides of the Cauchy–Schwarz step behind entropy monotonicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbsReport {
    /// tr(RR†ρ²)·tr(R†Rρ²)
    pub lhs: f64,
    /// [tr(ρRρR†)]²
    pub rhs: f64,
    /// lhs ≥ rhs − 1e-12
    pub holds: bool,
}

/// Tolerance on ‖[R, R†]‖ for `cbs_check`.
pub const TOL_NORMAL: f64 = 1e-10;

pub fn cbs_check(r: &ComplexMatrix, rho: &DensityMatrix) -> Result<CbsReport> {
    let rd = r.dagger();
    let norm = commutator(r, &rd)?.max_abs();
    if norm > TOL_NORMAL {
        return Err(Error::NotCommuting { norm });
    }
    if r.rows() != rho.dim() {
        return Err(Error::Dimension {
            context: "cbs_check",
            expected: r.rows(),
            found: rho.dim(),
        });
    }
    let p = rho.matrix();
    let rho2 = p * p;
    let lhs = (r * &rd).trace_product(&rho2).re * (&rd * r).trace_product(&rho2).re;
    let cross = (&(p * r) * p).trace_product(&rd).re;
    let rhs = cross * cross;
    Ok(CbsReport {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-12,
    })
}

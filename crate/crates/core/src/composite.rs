//! Two equal-dimension, non-interacting parts R (receiver) and S (sender)
//! under continuous measurement of the twisted swap observable
//! `O_C = (U† ⊗ U)·T`.
//!
//! Because `O_C² = 1` and `[O_C, H_C] = 0`, the interaction-picture state
//! obeys `dW/dt = O_C W O_C − W`, and its partial traces close on the pair
//!
//! ```text
//! dρ_R/dt = U†ρ_S U − ρ_R
//! dρ_S/dt = Uρ_R U† − ρ_S
//! ```
//!
//! for any W, correlated or not. The pair relaxes to the averages returned
//! by [`asymptotic_states`].

use crate::error::{Error, ObservableProperty, Result};
use crate::lindblad::{check_horizon, settle_state, MeasurementGenerator};
use crate::matrix::{commutator, tensor_product, ComplexMatrix, C64};
use crate::ode::{rk4_step, step_schedule};
use crate::state::{DensityMatrix, HermitianObservable, UnitaryMap};
use crate::trajectory::CsvTable;

/// Tolerance for the algebraic properties of `O_C`.
pub const TOL_PROPERTY: f64 = 1e-10;
/// Tolerance for `H_S = U H_R U†`.
pub const TOL_EQUIVALENCE: f64 = 1e-9;

/// T(|i⟩ ⊗ |j⟩) = |j⟩ ⊗ |i⟩ on `n²` dimensions.
pub fn swap_operator(n: usize) -> HermitianObservable {
    assert!(n >= 1, "swap_operator needs n >= 1");
    let mut t = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            t[(j * n + i, i * n + j)] = C64::new(1.0, 0.0);
        }
    }
    HermitianObservable::new(t).expect("permutation matrix is symmetric")
}

/// The measured observable with the residuals of its three properties.
#[derive(Debug, Clone)]
pub struct MeasuredObservable {
    pub observable: HermitianObservable,
    /// max of hermiticity deviation and |O − T(U ⊗ U†)|
    pub hermitian_residual: f64,
    /// |O² − 1|
    pub involution_residual: f64,
    /// |[O, H_C]|
    pub commutation_residual: f64,
}

#[derive(Debug, Clone)]
pub struct CompositeSystem {
    n: usize,
    h_r: HermitianObservable,
    h_s: HermitianObservable,
    u: UnitaryMap,
    measured: MeasuredObservable,
}

impl CompositeSystem {
    /// Takes H_R and U and derives H_S = U H_R U†.
    pub fn new(h_r: HermitianObservable, u: UnitaryMap) -> Result<Self> {
        check_same_dim(&h_r, &u)?;
        let h_s = HermitianObservable::new(h_r.matrix().conjugate_by(u.matrix()))?;
        Self::build(h_r, h_s, u)
    }

    /// Takes all three and verifies the unitary equivalence.
    pub fn with_hamiltonians(
        h_r: HermitianObservable,
        h_s: HermitianObservable,
        u: UnitaryMap,
    ) -> Result<Self> {
        check_same_dim(&h_r, &u)?;
        if h_s.dim() != h_r.dim() {
            return Err(Error::Dimension {
                context: "H_S vs H_R",
                expected: h_r.dim(),
                found: h_s.dim(),
            });
        }
        let deviation = h_s.matrix().max_abs_diff(&h_r.matrix().conjugate_by(u.matrix()));
        if deviation >= TOL_EQUIVALENCE {
            return Err(Error::NotEquivalent { deviation });
        }
        Self::build(h_r, h_s, u)
    }

    fn build(h_r: HermitianObservable, h_s: HermitianObservable, u: UnitaryMap) -> Result<Self> {
        let n = h_r.dim();
        let measured = compute_measured(n, &h_r, &h_s, &u)?;
        Ok(Self {
            n,
            h_r,
            h_s,
            u,
            measured,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_r(&self) -> &HermitianObservable {
        &self.h_r
    }

    pub fn h_s(&self) -> &HermitianObservable {
        &self.h_s
    }

    pub fn u(&self) -> &UnitaryMap {
        &self.u
    }

    /// H_C = H_R ⊗ 1 + 1 ⊗ H_S.
    pub fn h_c(&self) -> HermitianObservable {
        composite_hamiltonian(&self.h_r, &self.h_s)
    }

    /// The same system with both Hamiltonians shifted to zero trace, and the
    /// shift tr(H_R)/N that was removed.
    pub fn traceless_shifted(&self) -> (Self, f64) {
        let (h_r, shift) = self.h_r.traceless_shifted();
        let (h_s, _) = self.h_s.traceless_shifted();
        let sys = Self::build(h_r, h_s, self.u.clone()).expect("shift by identity keeps every property");
        (sys, shift)
    }

    /// Continuous measurement of O_C in dimensionless time, acting on the
    /// full `N²`-dimensional interaction-picture state.
    pub fn full_space_generator(&self) -> MeasurementGenerator {
        MeasurementGenerator::new(self.measured.observable.clone(), 1.0).expect("unit rate")
    }

    fn u_dag_rho_u(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        rho.conjugate_by(&self.u.matrix().dagger())
    }

    fn u_rho_u_dag(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        rho.conjugate_by(self.u.matrix())
    }

    fn pair_rhs(&self, pair: &(ComplexMatrix, ComplexMatrix)) -> (ComplexMatrix, ComplexMatrix) {
        let (r, s) = pair;
        (&self.u_dag_rho_u(s) - r, &self.u_rho_u_dag(r) - s)
    }
}

fn check_same_dim(h_r: &HermitianObservable, u: &UnitaryMap) -> Result<()> {
    if u.dim() != h_r.dim() {
        return Err(Error::Dimension {
            context: "U vs H_R",
            expected: h_r.dim(),
            found: u.dim(),
        });
    }
    Ok(())
}

fn composite_hamiltonian(h_r: &HermitianObservable, h_s: &HermitianObservable) -> HermitianObservable {
    let id_r = ComplexMatrix::identity(h_r.dim());
    let id_s = ComplexMatrix::identity(h_s.dim());
    let h = &tensor_product(h_r.matrix(), &id_s) + &tensor_product(&id_r, h_s.matrix());
    HermitianObservable::new(h).expect("sum of Hermitian tensor products")
}

fn compute_measured(
    n: usize,
    h_r: &HermitianObservable,
    h_s: &HermitianObservable,
    u: &UnitaryMap,
) -> Result<MeasuredObservable> {
    let t = swap_operator(n);
    let um = u.matrix();
    let ud = um.dagger();
    let o = &tensor_product(&ud, um) * t.matrix();
    let alt = t.matrix() * &tensor_product(um, &ud);

    let hermitian_residual = o.hermiticity_deviation().max(o.max_abs_diff(&alt));
    if hermitian_residual > TOL_PROPERTY {
        return Err(Error::PropertyViolated {
            property: ObservableProperty::Hermitian,
            residual: hermitian_residual,
        });
    }
    let involution_residual = (&o * &o).max_abs_diff(&ComplexMatrix::identity(n * n));
    if involution_residual > TOL_PROPERTY {
        return Err(Error::PropertyViolated {
            property: ObservableProperty::Involution,
            residual: involution_residual,
        });
    }
    let h_c = composite_hamiltonian(h_r, h_s);
    let commutation_residual = commutator(&o, h_c.matrix())?.max_abs();
    if commutation_residual > TOL_PROPERTY {
        return Err(Error::PropertyViolated {
            property: ObservableProperty::ConservesEnergy,
            residual: commutation_residual,
        });
    }
    Ok(MeasuredObservable {
        observable: HermitianObservable::new(o)?,
        hermitian_residual,
        involution_residual,
        commutation_residual,
    })
}

/// O_C = (U† ⊗ U)·T together with its verified property residuals.
pub fn measured_observable(sys: &CompositeSystem) -> &MeasuredObservable {
    &sys.measured
}

/// Receiver and sender states, both N×N.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPair {
    pub rho_r: DensityMatrix,
    pub rho_s: DensityMatrix,
}

impl ReducedPair {
    pub fn new(rho_r: DensityMatrix, rho_s: DensityMatrix) -> Result<Self> {
        if rho_r.dim() != rho_s.dim() {
            return Err(Error::Dimension {
                context: "reduced pair",
                expected: rho_r.dim(),
                found: rho_s.dim(),
            });
        }
        Ok(Self { rho_r, rho_s })
    }

    /// ρ_R ⊗ ρ_S.
    pub fn product_state(&self) -> DensityMatrix {
        self.rho_r.tensor(&self.rho_s)
    }
}

fn check_pair(sys: &CompositeSystem, pair: &ReducedPair) -> Result<()> {
    for d in [pair.rho_r.dim(), pair.rho_s.dim()] {
        if d != sys.n {
            return Err(Error::Dimension {
                context: "reduced pair vs composite system",
                expected: sys.n,
                found: d,
            });
        }
    }
    Ok(())
}

/// (U†ρ_S U − ρ_R, Uρ_R U† − ρ_S).
pub fn reduced_rhs(sys: &CompositeSystem, pair: &ReducedPair) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_pair(sys, pair)?;
    Ok(sys.pair_rhs(&(pair.rho_r.matrix().clone(), pair.rho_s.matrix().clone())))
}

/// t → ∞ limit: ((ρ_R + U†ρ_S U)/2, (ρ_S + Uρ_R U†)/2).
pub fn asymptotic_states(sys: &CompositeSystem, pair0: &ReducedPair) -> Result<ReducedPair> {
    check_pair(sys, pair0)?;
    let r = pair0.rho_r.matrix();
    let s = pair0.rho_s.matrix();
    let r_inf = (r + &sys.u_dag_rho_u(s)).scale_real(0.5).hermitian_part();
    let s_inf = (s + &sys.u_rho_u_dag(r)).scale_real(0.5).hermitian_part();
    Ok(ReducedPair {
        rho_r: DensityMatrix::from_trusted(r_inf),
        rho_s: DensityMatrix::from_trusted(s_inf),
    })
}

#[derive(Debug, Clone)]
pub struct PairSample {
    pub t: f64,
    pub pair: ReducedPair,
    pub s_r: f64,
    pub s_s: f64,
    pub e_r: f64,
    pub e_s: f64,
    /// von Neumann entropy of the receiver, for reference only.
    pub s_vn_r: f64,
}

#[derive(Debug, Clone, Default)]
pub struct PairedTrajectory {
    samples: Vec<PairSample>,
}

impl PairedTrajectory {
    pub fn samples(&self) -> &[PairSample] {
        &self.samples
    }

    pub fn first(&self) -> Option<&PairSample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&PairSample> {
        self.samples.last()
    }

    /// Base columns describe the receiver; `dI` is the running −ΔS_R.
    pub fn to_table(&self) -> CsvTable {
        let mut table = CsvTable::new(&["t", "purity", "S_lin", "S_vn", "E_R", "E_S", "S_R", "S_S", "dI"]);
        let s_r0 = self.samples.first().map_or(0.0, |s| s.s_r);
        for s in &self.samples {
            table.push_row(vec![
                s.t,
                1.0 - s.s_r,
                s.s_r,
                s.s_vn_r,
                s.e_r,
                s.e_s,
                s.s_r,
                s.s_s,
                s_r0 - s.s_r,
            ]);
        }
        table
    }
}

fn pair_sample(sys: &CompositeSystem, t: f64, pair: ReducedPair, spectrum_r: &[f64]) -> PairSample {
    PairSample {
        t,
        s_r: 1.0 - pair.rho_r.purity(),
        s_s: 1.0 - pair.rho_s.purity(),
        e_r: pair.rho_r.expectation(sys.h_r.matrix()),
        e_s: pair.rho_s.expectation(sys.h_s.matrix()),
        s_vn_r: crate::state::von_neumann_from_spectrum(spectrum_r),
        pair,
    }
}

/// RK4 on the coupled pair in dimensionless time.
pub fn evolve_reduced(
    sys: &CompositeSystem,
    pair0: &ReducedPair,
    t_final: f64,
    dt: f64,
) -> Result<PairedTrajectory> {
    check_pair(sys, pair0)?;
    check_horizon(t_final, dt)?;
    let steps = step_schedule(t_final, dt);
    let mut samples = Vec::with_capacity(steps.len() + 1);
    samples.push(pair_sample(sys, 0.0, pair0.clone(), &pair0.rho_r.eigenvalues()));

    let mut y = (pair0.rho_r.matrix().clone(), pair0.rho_s.matrix().clone());
    for (k, h) in steps.iter().enumerate() {
        let next = rk4_step(&y, *h, |p| sys.pair_rhs(p));
        let t = if k + 1 == steps.len() {
            t_final
        } else {
            (k + 1) as f64 * dt
        };
        let (rho_r, spectrum_r) = settle_state(next.0, t)?;
        let (rho_s, _) = settle_state(next.1, t)?;
        y = (rho_r.matrix().clone(), rho_s.matrix().clone());
        samples.push(pair_sample(sys, t, ReducedPair { rho_r, rho_s }, &spectrum_r));
    }
    Ok(PairedTrajectory { samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    /// Schrödinger picture ρ_C → interaction picture W_C.
    ToW,
    /// W_C → ρ_C = e^{−iH_C t} W_C e^{iH_C t}.
    FromW,
}

pub fn interaction_frame(
    sys: &CompositeSystem,
    rho_c: &DensityMatrix,
    t: f64,
    direction: FrameDirection,
) -> Result<DensityMatrix> {
    let n2 = sys.n * sys.n;
    if rho_c.dim() != n2 {
        return Err(Error::Dimension {
            context: "interaction frame",
            expected: n2,
            found: rho_c.dim(),
        });
    }
    let forward = UnitaryMap::exp_i(&sys.h_c(), t);
    let u = match direction {
        FrameDirection::FromW => forward,
        FrameDirection::ToW => forward.dagger(),
    };
    rho_c.conjugated(&u)
}

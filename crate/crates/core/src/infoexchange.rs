//! Information transfer from sender S to receiver R under the swap
//! measurement, measured with linear entropy.
//!
//! The receiver's gain `ΔI = tr ρ_R(∞)² − tr ρ_R(0)²` is a concave quadratic
//! in ρ_R(0). Maximizing it with a Lagrange multiplier for the trace (and a
//! second one for the energy in the isoenergetic regime) gives the closed
//! forms implemented here; the tests check them against the asymptotic
//! states and against perturbations of the optimum.

use serde::Serialize;

use crate::composite::{asymptotic_states, CompositeSystem, ReducedPair};
use crate::error::{Error, Result};
use crate::literal::{to_literal, MatrixLiteral};
use crate::matrix::ComplexMatrix;
use crate::state::{DensityMatrix, TOL_PSD};

/// Max |tr H_R| accepted by the isoenergetic formulas.
pub const TOL_TRACELESS: f64 = 1e-10;
/// Sender entropy increments at or below this leave η undefined.
pub const ETA_FLOOR: f64 = 1e-12;

fn check_sender(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<()> {
    if rho_s0.dim() != sys.n() {
        return Err(Error::Dimension {
            context: "sender state vs composite system",
            expected: sys.n(),
            found: rho_s0.dim(),
        });
    }
    Ok(())
}

/// U†ρU
fn pulled_back(sys: &CompositeSystem, rho: &DensityMatrix) -> ComplexMatrix {
    rho.matrix().conjugate_by(&sys.u().matrix().dagger())
}

/// ΔI_R = −¾ tr ρ_R² + ¼ tr ρ_S² + ½ tr(ρ_R U†ρ_S U).
pub fn info_gain(sys: &CompositeSystem, pair0: &ReducedPair) -> Result<f64> {
    check_sender(sys, &pair0.rho_r)?;
    check_sender(sys, &pair0.rho_s)?;
    Ok(info_gain_matrix(sys, pair0.rho_r.matrix(), &pair0.rho_s))
}

/// [`info_gain`] for an arbitrary Hermitian receiver matrix; used when
/// probing the functional off the state space.
pub fn info_gain_matrix(sys: &CompositeSystem, rho_r0: &ComplexMatrix, rho_s0: &DensityMatrix) -> f64 {
    let back = pulled_back(sys, rho_s0);
    -0.75 * rho_r0.trace_product(rho_r0).re + 0.25 * rho_s0.purity() + 0.5 * rho_r0.trace_product(&back).re
}

/// ΔS_S = tr ρ_S(0)² − tr ρ_S(∞)² for any initial pair.
pub fn sender_entropy_change(sys: &CompositeSystem, pair0: &ReducedPair) -> Result<f64> {
    let inf = asymptotic_states(sys, pair0)?;
    Ok(pair0.rho_s.purity() - inf.rho_s.purity())
}

/// ρ̃_R(0) = ⅓ U†ρ_S(0)U + (2/3N)·1.
pub fn optimal_receiver_state(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<DensityMatrix> {
    check_sender(sys, rho_s0)?;
    let n = sys.n();
    let m = pulled_back(sys, rho_s0)
        .scale_real(1.0 / 3.0)
        .add_scaled(&ComplexMatrix::identity(n), 2.0 / (3.0 * n as f64));
    Ok(DensityMatrix::from_trusted(m.hermitian_part()))
}

fn excess_purity(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> f64 {
    rho_s0.purity() - 1.0 / sys.n() as f64
}

/// ⅓[tr ρ_S(0)² − 1/N].
pub fn max_info(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<f64> {
    check_sender(sys, rho_s0)?;
    Ok(excess_purity(sys, rho_s0) / 3.0)
}

/// 5/9[tr ρ_S(0)² − 1/N], the sender's entropy increase when the receiver
/// starts in [`optimal_receiver_state`].
pub fn sender_entropy_increment(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<f64> {
    check_sender(sys, rho_s0)?;
    Ok(5.0 / 9.0 * excess_purity(sys, rho_s0))
}

/// Mean energies of R and S at time `t`: both relax to their average at
/// rate 2, their sum never changes.
pub fn energy_flow(e_r0: f64, e_s0: f64, t: f64) -> Result<(f64, f64)> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "energy_flow needs t >= 0, got {t}"
        )));
    }
    let mean = 0.5 * (e_r0 + e_s0);
    let decay = (-2.0 * t).exp();
    let half_gap = 0.5 * (e_r0 - e_s0) * decay;
    Ok((mean + half_gap, mean - half_gap))
}

struct IsoTerms {
    energy_s0: f64,
    h_r_norm2: f64,
}

fn iso_terms(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<IsoTerms> {
    check_sender(sys, rho_s0)?;
    let trace = sys.h_r().trace();
    if trace.abs() > TOL_TRACELESS {
        return Err(Error::NotTraceless { trace });
    }
    let h = sys.h_r().matrix();
    let h_r_norm2 = h.trace_product(h).re;
    if h_r_norm2 <= 0.0 {
        return Err(Error::InvalidArgument(
            "isoenergetic regime needs a nonzero Hamiltonian".into(),
        ));
    }
    Ok(IsoTerms {
        energy_s0: rho_s0.expectation(sys.h_s().matrix()),
        h_r_norm2,
    })
}

/// Optimal receiver state under tr ρ = 1 and tr(ρH_R) = tr(ρ_S(0)H_S):
/// ⅓U†ρ_S U + (2/3N)·1 + ⅔ (E_S / tr H_R²)·H_R. Requires tr H_R = 0.
///
/// The multiplier term can push an eigenvalue negative for senders with large
/// energy; that case is reported as [`Error::Infeasible`].
pub fn isoenergetic_optimal_state(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<DensityMatrix> {
    let terms = iso_terms(sys, rho_s0)?;
    let base = optimal_receiver_state(sys, rho_s0)?;
    let m = base
        .matrix()
        .add_scaled(sys.h_r().matrix(), 2.0 / 3.0 * terms.energy_s0 / terms.h_r_norm2)
        .hermitian_part();
    let min_eigenvalue = crate::eigen::hermitian_eigenvalues(&m)?[0];
    if min_eigenvalue < -TOL_PSD {
        return Err(Error::Infeasible { min_eigenvalue });
    }
    Ok(DensityMatrix::from_trusted(m))
}

fn iso_excess(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<f64> {
    isoenergetic_optimal_state(sys, rho_s0)?;
    let terms = iso_terms(sys, rho_s0)?;
    Ok(excess_purity(sys, rho_s0) - terms.energy_s0 * terms.energy_s0 / terms.h_r_norm2)
}

/// ⅓[tr ρ_S² − 1/N − (tr ρ_S H_S)² / tr H_R²].
pub fn isoenergetic_max_info(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<f64> {
    Ok(iso_excess(sys, rho_s0)? / 3.0)
}

/// 5/9[tr ρ_S² − 1/N − (tr ρ_S H_S)² / tr H_R²].
pub fn isoenergetic_entropy_increment(sys: &CompositeSystem, rho_s0: &DensityMatrix) -> Result<f64> {
    Ok(5.0 / 9.0 * iso_excess(sys, rho_s0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Unconstrained,
    Isoenergetic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Unconstrained => "unconstrained",
            Self::Isoenergetic => "isoenergetic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExchangeReport {
    pub regime: Regime,
    pub n: usize,
    pub delta_i: f64,
    pub delta_s: f64,
    /// ΔI/ΔS, absent when ΔS ≤ [`ETA_FLOOR`].
    pub eta: Option<f64>,
    pub optimal_rho_r0: DensityMatrix,
    pub purity_s0: f64,
    /// tr(ρ_S(0)H_S) after any energy shift.
    pub energy_s0: f64,
    /// tr(H_R)/N removed before an isoenergetic evaluation; zero otherwise.
    pub energy_shift: f64,
}

/// Flat serialized form of [`ExchangeReport`].
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExchangeRecord {
    pub regime: Regime,
    #[serde(rename = "N")]
    pub n: usize,
    pub delta_i: f64,
    pub delta_s: f64,
    pub eta: Option<f64>,
    pub purity_s0: f64,
    pub energy_s0: f64,
    pub energy_shift: f64,
    pub optimal_rho_r0: MatrixLiteral,
}

impl ExchangeReport {
    pub fn to_record(&self) -> ExchangeRecord {
        ExchangeRecord {
            regime: self.regime,
            n: self.n,
            delta_i: self.delta_i,
            delta_s: self.delta_s,
            eta: self.eta,
            purity_s0: self.purity_s0,
            energy_s0: self.energy_s0,
            energy_shift: self.energy_shift,
            optimal_rho_r0: to_literal(self.optimal_rho_r0.matrix()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("record serializes")
    }
}

/// Optimal receiver state, ΔI, ΔS and η for the chosen regime. The
/// isoenergetic regime first shifts the Hamiltonians to zero trace.
pub fn exchange_report(
    sys: &CompositeSystem,
    rho_s0: &DensityMatrix,
    regime: Regime,
) -> Result<ExchangeReport> {
    check_sender(sys, rho_s0)?;
    let (optimal, delta_i, delta_s, energy_s0, energy_shift) = match regime {
        Regime::Unconstrained => (
            optimal_receiver_state(sys, rho_s0)?,
            max_info(sys, rho_s0)?,
            sender_entropy_increment(sys, rho_s0)?,
            rho_s0.expectation(sys.h_s().matrix()),
            0.0,
        ),
        Regime::Isoenergetic => {
            let (shifted, shift) = sys.traceless_shifted();
            (
                isoenergetic_optimal_state(&shifted, rho_s0)?,
                isoenergetic_max_info(&shifted, rho_s0)?,
                isoenergetic_entropy_increment(&shifted, rho_s0)?,
                rho_s0.expectation(shifted.h_s().matrix()),
                shift,
            )
        }
    };
    Ok(ExchangeReport {
        regime,
        n: sys.n(),
        delta_i,
        delta_s,
        eta: (delta_s > ETA_FLOOR).then(|| delta_i / delta_s),
        optimal_rho_r0: optimal,
        purity_s0: rho_s0.purity(),
        energy_s0,
        energy_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{pauli, C64};
    use crate::state::{HermitianObservable, UnitaryMap};

    fn qubit(h: ComplexMatrix) -> CompositeSystem {
        CompositeSystem::new(HermitianObservable::new(h).unwrap(), UnitaryMap::identity(2)).unwrap()
    }

    fn coherent(a: f64, c: C64) -> DensityMatrix {
        DensityMatrix::new(
            ComplexMatrix::from_vec(2, 2, vec![C64::new(a, 0.0), c, c.conj(), C64::new(1.0 - a, 0.0)])
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn fixed_point_gains_nothing() {
        let sys = qubit(pauli::z());
        let s = coherent(0.7, C64::new(0.1, 0.2));
        let pair = ReducedPair::new(s.clone(), s).unwrap();
        assert!(info_gain(&sys, &pair).unwrap().abs() < 1e-15);
    }

    #[test]
    fn mixed_receiver_pure_sender_gain() {
        let sys = qubit(pauli::z());
        let pair = ReducedPair::new(
            DensityMatrix::maximally_mixed(2),
            DensityMatrix::basis_state(2, 0).unwrap(),
        )
        .unwrap();
        assert!((info_gain(&sys, &pair).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn optimal_receiver_cases() {
        let sys = qubit(pauli::z());
        let mixed = DensityMatrix::maximally_mixed(2);
        let r = optimal_receiver_state(&sys, &mixed).unwrap();
        assert!(r.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
        let r = optimal_receiver_state(&sys, &DensityMatrix::basis_state(2, 0).unwrap()).unwrap();
        assert!(
            r.matrix()
                .max_abs_diff(&ComplexMatrix::real_diagonal(&[2.0 / 3.0, 1.0 / 3.0]))
                < 1e-15
        );
    }

    #[test]
    fn max_info_and_increment_cases() {
        let sys = qubit(pauli::z());
        let pure = DensityMatrix::basis_state(2, 1).unwrap();
        assert!((max_info(&sys, &pure).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((sender_entropy_increment(&sys, &pure).unwrap() - 5.0 / 18.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(max_info(&sys, &mixed).unwrap(), 0.0);
        assert_eq!(sender_entropy_increment(&sys, &mixed).unwrap(), 0.0);
        let d = DensityMatrix::new(ComplexMatrix::real_diagonal(&[0.75, 0.25])).unwrap();
        assert!((max_info(&sys, &d).unwrap() - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn energy_flow_cases() {
        assert_eq!(energy_flow(0.3, 0.3, 5.0).unwrap(), (0.3, 0.3));
        let (r, s) = energy_flow(1.0, -0.5, 50.0).unwrap();
        assert!((r - 0.25).abs() < 1e-15 && (s - 0.25).abs() < 1e-15);
        let (r, s) = energy_flow(1.0, -0.5, 0.37).unwrap();
        assert!((r + s - 0.5).abs() < 1e-15);
        assert!(energy_flow(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn isoenergetic_zero_energy_reduces_to_unconstrained() {
        let sys = qubit(pauli::z());
        let s = coherent(0.5, C64::new(0.2, -0.1));
        let iso = isoenergetic_optimal_state(&sys, &s).unwrap();
        let free = optimal_receiver_state(&sys, &s).unwrap();
        assert!(iso.matrix().max_abs_diff(free.matrix()) < 1e-15);
    }

    #[test]
    fn isoenergetic_qubit_law_and_constraints() {
        let delta0 = 0.7;
        let sys = qubit(pauli::z().scale_real(delta0));
        let c = C64::new(0.15, 0.25);
        let s = coherent(0.62, c);
        let opt = isoenergetic_optimal_state(&sys, &s).unwrap();
        assert!((opt.matrix().trace().re - 1.0).abs() < 1e-12);
        let e_s = s.expectation(sys.h_s().matrix());
        assert!((opt.expectation(sys.h_r().matrix()) - e_s).abs() < 1e-12);
        let gain = isoenergetic_max_info(&sys, &s).unwrap();
        assert!((gain - 2.0 / 3.0 * c.norm_sqr()).abs() < 1e-12);
        let pair = ReducedPair::new(opt, s.clone()).unwrap();
        assert!((info_gain(&sys, &pair).unwrap() - gain).abs() < 1e-12);

        let plus = coherent(0.5, C64::new(0.5, 0.0));
        assert!((isoenergetic_max_info(&sys, &plus).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((isoenergetic_entropy_increment(&sys, &plus).unwrap() - 5.0 / 18.0).abs() < 1e-15);
        let diag = coherent(0.8, C64::new(0.0, 0.0));
        assert!(isoenergetic_max_info(&sys, &diag).unwrap().abs() < 1e-15);
        assert!(isoenergetic_entropy_increment(&sys, &diag).unwrap().abs() < 1e-15);
    }

    #[test]
    fn isoenergetic_preconditions() {
        let shifted = qubit(ComplexMatrix::real_diagonal(&[1.0, 0.0]));
        let s = coherent(0.5, C64::new(0.1, 0.0));
        assert!(matches!(
            isoenergetic_max_info(&shifted, &s),
            Err(Error::NotTraceless { .. })
        ));
        let zero = qubit(ComplexMatrix::zeros(2, 2));
        assert!(matches!(
            isoenergetic_max_info(&zero, &s),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn isoenergetic_infeasible_for_energetic_qutrit() {
        // Three levels: a sender pinned in the top level has an energy the
        // receiver optimum can only match by going negative on the bottom.
        let h = HermitianObservable::new(ComplexMatrix::real_diagonal(&[-1.0, 0.0, 1.0])).unwrap();
        let sys = CompositeSystem::new(h, UnitaryMap::identity(3)).unwrap();
        let s = DensityMatrix::basis_state(3, 2).unwrap();
        let err = isoenergetic_optimal_state(&sys, &s).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }), "{err}");
    }

    #[test]
    fn reports() {
        let sys = qubit(pauli::z());
        let pure = DensityMatrix::basis_state(2, 0).unwrap();
        let rep = exchange_report(&sys, &pure, Regime::Unconstrained).unwrap();
        assert!((rep.delta_i - 1.0 / 6.0).abs() < 1e-15);
        assert!((rep.delta_s - 5.0 / 18.0).abs() < 1e-15);
        assert!((rep.eta.unwrap() - 0.6).abs() < 1e-15);

        let rep = exchange_report(&sys, &pure, Regime::Isoenergetic).unwrap();
        assert!(rep.delta_i.abs() < 1e-15 && rep.delta_s.abs() < 1e-15);
        assert!(rep.eta.is_none());
        let json = rep.to_json();
        assert!(json.contains("\"eta\": null"));
        assert!(json.contains("\"regime\": \"isoenergetic\""));
        assert!(json.contains("\"N\": 2"));
    }

    #[test]
    fn report_records_energy_shift() {
        let sys = qubit(ComplexMatrix::real_diagonal(&[3.0, 1.0]));
        let s = coherent(0.5, C64::new(0.3, 0.0));
        let rep = exchange_report(&sys, &s, Regime::Isoenergetic).unwrap();
        assert!((rep.energy_shift - 2.0).abs() < 1e-15);
        assert!((rep.delta_i - 2.0 / 3.0 * 0.09).abs() < 1e-12);
    }
}

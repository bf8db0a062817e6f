//! Exact solutions of `dρ/dt = −½[O, [O, ρ]]` for additive and
//! multiplicative composite observables.
//!
//! The Gaussian average `(2πt)^{−1/2} ∫ ds e^{−s²/2t} e^{−iOs} ρ e^{iOs}`
//! solves the equation; in the eigenbasis of O it multiplies element (k, l)
//! by `e^{−(λ_k − λ_l)² t/2}`. Every function here evaluates that factor
//! analytically instead of integrating.

use crate::eigen::HermitianEigen;
use crate::error::{Error, Result};
use crate::matrix::{tensor_product, ComplexMatrix, Subsystem};
use crate::state::{DensityMatrix, HermitianObservable};

/// Coefficient of the double commutator in the dimensionless equation.
const DECAY: f64 = 0.5;

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

fn dephase(eig: &HermitianEigen, rho: &DensityMatrix, t: f64) -> DensityMatrix {
    let mut m = eig.to_eigenbasis(rho.matrix());
    let n = m.rows();
    for k in 0..n {
        for l in 0..n {
            let gap = eig.values[k] - eig.values[l];
            m[(k, l)] *= (-DECAY * gap * gap * t).exp();
        }
    }
    DensityMatrix::from_trusted(eig.from_eigenbasis(&m).hermitian_part())
}

/// ρ(t) for continuous measurement of `o_c` at unit rate. At t = 0 this is
/// ρ(0), the continuous extension of the Gaussian kernel.
pub fn gaussian_solution(o_c: &HermitianObservable, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    if o_c.dim() != rho0.dim() {
        return Err(Error::Dimension {
            context: "observable vs state",
            expected: o_c.dim(),
            found: rho0.dim(),
        });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    Ok(dephase(&o_c.eigen(), rho0, t))
}

/// O_C = A_R ⊗ 1 + 1 ⊗ B_S.
#[derive(Debug, Clone)]
pub struct AdditiveObservable {
    pub a_r: HermitianObservable,
    pub b_s: HermitianObservable,
}

impl AdditiveObservable {
    pub fn new(a_r: HermitianObservable, b_s: HermitianObservable) -> Self {
        Self { a_r, b_s }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a_r.dim(), self.b_s.dim())
    }

    pub fn composite(&self) -> HermitianObservable {
        let (dr, ds) = self.dims();
        let m = &tensor_product(self.a_r.matrix(), &ComplexMatrix::identity(ds))
            + &tensor_product(&ComplexMatrix::identity(dr), self.b_s.matrix());
        HermitianObservable::new(m).expect("sum of Hermitian products")
    }
}

/// Reduced state of R under the additive measurement: only A_R acts, so the
/// receiver dephases in the A_R eigenbasis whatever B_S and the correlations
/// are.
pub fn additive_reduced_state(
    obs: &AdditiveObservable,
    rho_r0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    gaussian_solution(&obs.a_r, rho_r0, t)
}

/// O_C = A_R ⊗ B_S.
#[derive(Debug, Clone)]
pub struct MultiplicativeObservable {
    pub a_r: HermitianObservable,
    pub b_s: HermitianObservable,
    eig_a: HermitianEigen,
    eig_b: HermitianEigen,
}

impl MultiplicativeObservable {
    pub fn new(a_r: HermitianObservable, b_s: HermitianObservable) -> Self {
        let eig_a = a_r.eigen();
        let eig_b = b_s.eigen();
        Self {
            a_r,
            b_s,
            eig_a,
            eig_b,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a_r.dim(), self.b_s.dim())
    }

    pub fn composite(&self) -> HermitianObservable {
        HermitianObservable::new(tensor_product(self.a_r.matrix(), self.b_s.matrix()))
            .expect("product of Hermitian factors")
    }

    /// Eigenvalues A_i of A_R, ascending.
    pub fn a_values(&self) -> &[f64] {
        &self.eig_a.values
    }

    /// Eigenvalues B_α of B_S, ascending.
    pub fn b_values(&self) -> &[f64] {
        &self.eig_b.values
    }

    /// Joint eigenbasis V_A ⊗ V_B.
    pub fn joint_basis(&self) -> ComplexMatrix {
        tensor_product(&self.eig_a.vectors, &self.eig_b.vectors)
    }

    /// Decay factor of element ((iα), (jβ)) in the joint eigenbasis.
    pub fn factor(&self, (i, alpha): (usize, usize), (j, beta): (usize, usize), t: f64) -> f64 {
        let a = self.a_values();
        let b = self.b_values();
        let gap = a[i] * b[alpha] - a[j] * b[beta];
        (-DECAY * gap * gap * t).exp()
    }

    /// Expresses a composite matrix in the joint eigenbasis.
    pub fn to_joint_basis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let v = self.joint_basis();
        &(&v.dagger() * m) * &v
    }

    fn check(&self, rho_c0: &DensityMatrix) -> Result<()> {
        let (dr, ds) = self.dims();
        if rho_c0.dim() != dr * ds {
            return Err(Error::Dimension {
                context: "multiplicative observable vs composite state",
                expected: dr * ds,
                found: rho_c0.dim(),
            });
        }
        Ok(())
    }
}

/// ρ_C(t) under measurement of A_R ⊗ B_S, built element by element in the
/// joint eigenbasis and returned in the original basis.
pub fn multiplicative_elements(
    obs: &MultiplicativeObservable,
    rho_c0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    obs.check(rho_c0)?;
    let (dr, ds) = obs.dims();
    let mut m = obs.to_joint_basis(rho_c0.matrix());
    for i in 0..dr {
        for alpha in 0..ds {
            for j in 0..dr {
                for beta in 0..ds {
                    m[(i * ds + alpha, j * ds + beta)] *= obs.factor((i, alpha), (j, beta), t);
                }
            }
        }
    }
    let v = obs.joint_basis();
    Ok(DensityMatrix::from_trusted(m.conjugate_by(&v).hermitian_part()))
}

/// d S_keep / dt at time `t` from the general double sum over the joint
/// eigenbasis, valid for correlated initial states.
pub fn multiplicative_entropy_rate_of(
    obs: &MultiplicativeObservable,
    rho_c0: &DensityMatrix,
    t: f64,
    keep: Subsystem,
) -> Result<f64> {
    check_time(t)?;
    obs.check(rho_c0)?;
    let (dr, ds) = obs.dims();
    let m = obs.to_joint_basis(rho_c0.matrix());
    let at = |i: usize, alpha: usize, j: usize, beta: usize| m[(i * ds + alpha, j * ds + beta)];
    let (a, b) = (obs.a_values(), obs.b_values());
    let mut acc = 0.0;
    match keep {
        Subsystem::R => {
            for i in 0..dr {
                for j in 0..dr {
                    let da2 = (a[i] - a[j]).powi(2);
                    if da2 == 0.0 {
                        continue;
                    }
                    for alpha in 0..ds {
                        for beta in 0..ds {
                            let w = (-(b[alpha].powi(2) + b[beta].powi(2)) * da2 * DECAY * t).exp();
                            let prod = at(i, alpha, j, alpha) * at(j, beta, i, beta);
                            acc += da2 * b[beta].powi(2) * w * prod.re;
                        }
                    }
                }
            }
        }
        Subsystem::S => {
            for alpha in 0..ds {
                for beta in 0..ds {
                    let db2 = (b[alpha] - b[beta]).powi(2);
                    if db2 == 0.0 {
                        continue;
                    }
                    for i in 0..dr {
                        for j in 0..dr {
                            let w = (-(a[i].powi(2) + a[j].powi(2)) * db2 * DECAY * t).exp();
                            let prod = at(i, alpha, i, beta) * at(j, beta, j, alpha);
                            acc += db2 * a[j].powi(2) * w * prod.re;
                        }
                    }
                }
            }
        }
    }
    Ok(2.0 * DECAY * acc)
}

/// d S_R / dt, general double sum.
pub fn multiplicative_entropy_rate(
    obs: &MultiplicativeObservable,
    rho_c0: &DensityMatrix,
    t: f64,
) -> Result<f64> {
    multiplicative_entropy_rate_of(obs, rho_c0, t, Subsystem::R)
}

/// d S_R / dt for a product initial state ρ_R ⊗ ρ_S, in the manifestly
/// non-negative form Σ (A_i − A_j)² B_β² e^{…} |ρ^R_ij|² ρ^S_αα ρ^S_ββ.
pub fn multiplicative_entropy_rate_product(
    obs: &MultiplicativeObservable,
    rho_r0: &DensityMatrix,
    rho_s0: &DensityMatrix,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    let (dr, ds) = obs.dims();
    if rho_r0.dim() != dr || rho_s0.dim() != ds {
        return Err(Error::Dimension {
            context: "product state vs multiplicative observable",
            expected: dr * ds,
            found: rho_r0.dim() * rho_s0.dim(),
        });
    }
    let r = obs.eig_a.to_eigenbasis(rho_r0.matrix());
    let s = obs.eig_b.to_eigenbasis(rho_s0.matrix());
    let (a, b) = (obs.a_values(), obs.b_values());
    let mut acc = 0.0;
    for i in 0..dr {
        for j in 0..dr {
            let da2 = (a[i] - a[j]).powi(2);
            let coherence = r[(i, j)].norm_sqr();
            if da2 == 0.0 || coherence == 0.0 {
                continue;
            }
            for alpha in 0..ds {
                for beta in 0..ds {
                    let w = (-(b[alpha].powi(2) + b[beta].powi(2)) * da2 * DECAY * t).exp();
                    acc += da2 * b[beta].powi(2) * w * coherence * s[(alpha, alpha)].re * s[(beta, beta)].re;
                }
            }
        }
    }
    Ok(2.0 * DECAY * acc)
}

mod common;

use common::*;
use cqm::eigen::hermitian_eigen;
use cqm::matrix::{commutator, partial_trace_matrix, pauli, tensor_product, ComplexMatrix, Subsystem, C64};
use cqm::state::{linear_entropy, partial_trace, von_neumann_entropy, DensityMatrix};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_product_is_associative(
        a in matrix_strategy(2, 2),
        b in matrix_strategy(3, 3),
        c in matrix_strategy(2, 2),
    ) {
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < TOL);
    }

    #[test]
    fn tensor_product_is_bilinear(
        a in matrix_strategy(2, 2),
        a2 in matrix_strategy(2, 2),
        b in matrix_strategy(3, 3),
        re in -2.0..2.0f64,
        im in -2.0..2.0f64,
    ) {
        let s = C64::new(re, im);
        let lhs = tensor_product(&(&a.scale(s) + &a2), &b);
        let rhs = &tensor_product(&a, &b).scale(s) + &tensor_product(&a2, &b);
        prop_assert!(lhs.max_abs_diff(&rhs) < TOL);
        let lhs = tensor_product(&b, &(&a.scale(s) + &a2));
        let rhs = &tensor_product(&b, &a).scale(s) + &tensor_product(&b, &a2);
        prop_assert!(lhs.max_abs_diff(&rhs) < TOL);
    }

    #[test]
    fn tensor_product_entries_follow_basis_order(a in matrix_strategy(2, 3), b in matrix_strategy(3, 2)) {
        let t = tensor_product(&a, &b);
        prop_assert_eq!(t.shape(), (6, 6));
        for i in 0..2 { for j in 0..3 { for k in 0..3 { for l in 0..2 {
            prop_assert_eq!(t[(i * 3 + k, j * 2 + l)], a[(i, j)] * b[(k, l)]);
        }}}}
    }

    #[test]
    fn partial_trace_recovers_product_factors(r in state_strategy(3), s in state_strategy(2)) {
        let c = r.tensor(&s);
        let back_r = partial_trace(&c, Subsystem::R, (3, 2)).unwrap();
        let back_s = partial_trace(&c, Subsystem::S, (3, 2)).unwrap();
        prop_assert!(back_r.matrix().max_abs_diff(r.matrix()) < TOL);
        prop_assert!(back_s.matrix().max_abs_diff(s.matrix()) < TOL);
    }

    #[test]
    fn partial_trace_matches_index_sums_and_keeps_trace(m in matrix_strategy(6, 6)) {
        let r = partial_trace_matrix(&m, Subsystem::R, (2, 3)).unwrap();
        let s = partial_trace_matrix(&m, Subsystem::S, (2, 3)).unwrap();
        prop_assert!(r.max_abs_diff(&trace_out_s(&m, 2, 3)) < TOL);
        prop_assert!(s.max_abs_diff(&trace_out_r(&m, 2, 3)) < TOL);
        prop_assert!((r.trace() - m.trace()).norm() < TOL);
        prop_assert!((s.trace() - m.trace()).norm() < TOL);
    }

    #[test]
    fn linear_entropy_is_unitarily_invariant(rho in state_strategy(3), u in unitary_strategy(3)) {
        let moved = rho.conjugated(&u).unwrap();
        prop_assert!((linear_entropy(&moved) - linear_entropy(&rho)).abs() < TOL);
        prop_assert!((von_neumann_entropy(&moved) - von_neumann_entropy(&rho)).abs() < 1e-10);
    }

    #[test]
    fn linear_entropy_bounds(rho in state_strategy(4)) {
        let s = linear_entropy(&rho);
        prop_assert!((-TOL..=0.75 + TOL).contains(&s));
        let vn = von_neumann_entropy(&rho);
        prop_assert!(vn >= -TOL && vn <= 4.0f64.ln() + 1e-10);
    }

    #[test]
    fn eigen_decomposition_reconstructs(h in hermitian_strategy(4)) {
        let eig = hermitian_eigen(h.matrix()).unwrap();
        let back = eig.from_eigenbasis(&ComplexMatrix::real_diagonal(&eig.values));
        prop_assert!(back.max_abs_diff(h.matrix()) < 1e-12);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let v = &eig.vectors;
        prop_assert!(v.dagger().matmul(v).unwrap().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }
}

#[test]
fn bell_state_reduces_to_maximally_mixed() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(h, 0.0),
    ];
    let bell = DensityMatrix::pure(&psi).unwrap();
    for keep in [Subsystem::R, Subsystem::S] {
        let red = partial_trace(&bell, keep, (2, 2)).unwrap();
        assert!(
            red.matrix()
                .max_abs_diff(&ComplexMatrix::real_diagonal(&[0.5, 0.5]))
                < TOL
        );
    }
}

#[test]
fn pauli_commutators_and_daggers() {
    let xy = commutator(&pauli::x(), &pauli::y()).unwrap();
    assert!(xy.max_abs_diff(&pauli::z().scale(C64::new(0.0, 2.0))) < TOL);
    let a = pauli::y();
    assert!(commutator(&a, &a).unwrap().max_abs() == 0.0);
    let i_sy = pauli::y().scale(C64::new(0.0, 1.0));
    assert_eq!(i_sy.dagger(), i_sy.scale(C64::new(-1.0, 0.0)));
    // |g⟩⟨e|† = |e⟩⟨g|
    assert_eq!(
        ComplexMatrix::basis_projector(2, 0, 1).dagger(),
        ComplexMatrix::basis_projector(2, 1, 0)
    );
    assert!(commutator(&pauli::x(), &ComplexMatrix::identity(3)).is_err());
}

#[test]
fn entropy_reference_values() {
    let rho = DensityMatrix::new(ComplexMatrix::real_diagonal(&[0.75, 0.25])).unwrap();
    assert!((linear_entropy(&rho) - 0.375).abs() < TOL);
    let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
    assert!((von_neumann_entropy(&rho) - expected).abs() < TOL);
    assert!((expected - 0.5623).abs() < 1e-4);
    for n in 2..=5 {
        let mixed = DensityMatrix::maximally_mixed(n);
        assert!((linear_entropy(&mixed) - (1.0 - 1.0 / n as f64)).abs() < TOL);
    }
    let mut r = rng(7);
    assert!(linear_entropy(&random_pure(&mut r, 4)).abs() < 1e-12);
    assert!(von_neumann_entropy(&random_pure(&mut r, 4)).abs() < 1e-9);
}

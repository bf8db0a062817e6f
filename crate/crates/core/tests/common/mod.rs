#![allow(dead_code)]

use cqm::matrix::{ComplexMatrix, C64};
use cqm::state::{DensityMatrix, HermitianObservable, UnitaryMap};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).unwrap()
}

/// GG†/tr(GG†): full rank with probability one.
pub fn random_state(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let g = ginibre(rng, n, n);
    let m = g.matmul(&g.dagger()).unwrap();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

/// Rank-`k` state from a random n×k factor.
pub fn random_rank_state(rng: &mut impl Rng, n: usize, k: usize) -> DensityMatrix {
    let g = ginibre(rng, n, k);
    let m = g.matmul(&g.dagger()).unwrap();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

pub fn random_pure(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    random_rank_state(rng, n, 1)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianObservable {
    let g = ginibre(rng, n, n);
    HermitianObservable::new(g.hermitian_part()).unwrap()
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> UnitaryMap {
    UnitaryMap::exp_i(&random_hermitian(rng, n), 2.0)
}

/// Independent n²×n² swap: entry ((i,j),(j,i)) = 1.
pub fn swap_by_loops(n: usize) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            t[(j * n + i, i * n + j)] = C64::new(1.0, 0.0);
        }
    }
    t
}

/// Index-sum partial traces, written without the library routine.
pub fn trace_out_s(m: &ComplexMatrix, dr: usize, ds: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dr, dr);
    for i in 0..dr {
        for j in 0..dr {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..ds {
                acc += m[(i * ds + a, j * ds + a)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

pub fn trace_out_r(m: &ComplexMatrix, dr: usize, ds: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(ds, ds);
    for a in 0..ds {
        for b in 0..ds {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..dr {
                acc += m[(i * ds + a, i * ds + b)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Proptest strategy: a complex matrix with entries in the unit square.
pub fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        ComplexMatrix::from_vec(
            rows,
            cols,
            v.into_iter().map(|(re, im)| C64::new(re, im)).collect(),
        )
        .unwrap()
    })
}

pub fn state_strategy(n: usize) -> impl Strategy<Value = DensityMatrix> {
    matrix_strategy(n, n).prop_filter_map("degenerate factor", |g| {
        let m = g.matmul(&g.dagger()).unwrap();
        let tr = m.trace().re;
        (tr > 1e-3).then(|| DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap())
    })
}

pub fn hermitian_strategy(n: usize) -> impl Strategy<Value = HermitianObservable> {
    matrix_strategy(n, n).prop_map(|g| HermitianObservable::new(g.hermitian_part()).unwrap())
}

pub fn unitary_strategy(n: usize) -> impl Strategy<Value = UnitaryMap> {
    hermitian_strategy(n).prop_map(|h| UnitaryMap::exp_i(&h, 2.0))
}

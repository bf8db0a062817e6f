//! The matrix literal shared by config files and reports: a list of rows,
//! each entry a `[re, im]` pair.

use crate::error::Result;
use crate::matrix::{ComplexMatrix, C64};

pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

pub fn to_literal(m: &ComplexMatrix) -> MatrixLiteral {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn from_literal(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

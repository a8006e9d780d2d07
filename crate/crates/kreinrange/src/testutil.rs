//! Shared fixtures for unit tests: the three reference instances used
//! throughout the test suite.

use crate::linalg::{cx, CMatrix};
use crate::operator::{build_operator, KreinOperator};
use crate::space::build_space;

pub fn re_mat(rows: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(
        rows,
        rows,
        &data.iter().map(|&v| cx(v, 0.0)).collect::<Vec<_>>(),
    )
}

/// Flip Gram with a nilpotent Jordan block: `G = [[0,1],[1,0]]`,
/// `A = [[0,1],[0,0]]`.
pub fn e1() -> KreinOperator {
    let space = build_space(re_mat(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    build_operator(space, re_mat(2, &[0.0, 1.0, 0.0, 0.0])).unwrap()
}

/// `G = diag(1,-1)`, `A = diag(1,-1)`, so the witness is the identity.
pub fn e2() -> KreinOperator {
    let space = build_space(re_mat(2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
    build_operator(space, re_mat(2, &[1.0, 0.0, 0.0, -1.0])).unwrap()
}

/// `G = diag(1,1,-1)`, `A = diag(2,1,0)`.
pub fn e3() -> KreinOperator {
    let space = build_space(re_mat(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0])).unwrap();
    build_operator(space, re_mat(3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])).unwrap()
}

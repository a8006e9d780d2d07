//! Non-negative operators on a Gram space.
//!
//! `A` is selfadjoint with `[Ax, x] >= 0` exactly when the witness
//! `P = G * A` is Hermitian positive semidefinite; construction validates
//! both and caches `P`.

use num_complex::Complex64;

use crate::error::{KreinError, Result};
use crate::linalg::{
    condition_number, cx, herm_asymmetry, herm_eigen, hermitize, CMatrix, CVector,
};
use crate::space::{build_space_with, GramSpace};
use crate::tol::COND_CAP;

#[derive(Debug, Clone)]
pub struct KreinOperator {
    space: GramSpace,
    mat: CMatrix,
    /// Hermitian PSD witness `P = G * A`.
    psd_witness: CMatrix,
    /// Operator norm of `A` in the J-norm.
    j_norm: f64,
    /// Largest eigenvalue of `P`.
    witness_norm: f64,
}

impl KreinOperator {
    pub fn space(&self) -> &GramSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn witness(&self) -> &CMatrix {
        &self.psd_witness
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn j_norm(&self) -> f64 {
        self.j_norm
    }

    pub fn witness_norm(&self) -> f64 {
        self.witness_norm
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.mat * x
    }

    /// `[Ax, x] = x^* P x`; non-negative up to roundoff.
    pub fn form(&self, x: &CVector) -> f64 {
        (x.adjoint() * &self.psd_witness * x)[(0, 0)].re
    }

    /// `[Ax, y]`.
    pub fn form_pair(&self, x: &CVector, y: &CVector) -> Complex64 {
        (y.adjoint() * &self.psd_witness * x)[(0, 0)]
    }

    /// `A - t` and whether the shift is still non-negative.
    ///
    /// The slack is relative to the input magnitudes, not to the shifted
    /// witness itself, which can vanish identically (for instance at
    /// `A = t * I`).
    pub fn shifted(&self, t: f64) -> (CMatrix, bool) {
        let dim = self.dim();
        let shifted = &self.mat - CMatrix::identity(dim, dim) * cx(t, 0.0);
        let witness = &self.psd_witness - self.space.gram() * cx(t, 0.0);
        let (vals, _) = herm_eigen(&witness);
        let scale = self.witness_norm + t.abs() * self.space.gram_norm();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let ok = min >= -self.space.tolerances().psd_rel * scale.max(f64::MIN_POSITIVE);
        (shifted, ok)
    }

    /// Transported operator on the space with Gram matrix `S^* G S` and
    /// matrix `S^{-1} A S`. Spectrum and predicted ranges are unchanged.
    pub fn congruence_transform(&self, s: &CMatrix) -> Result<KreinOperator> {
        let dim = self.dim();
        if s.nrows() != dim || s.ncols() != dim {
            return Err(KreinError::DimensionMismatch {
                expected: dim,
                got: s.nrows(),
            });
        }
        let cond = condition_number(s);
        if !cond.is_finite() || cond > COND_CAP {
            return Err(KreinError::IllConditioned {
                cond,
                cap: COND_CAP,
            });
        }
        let gram = hermitize(&(s.adjoint() * self.space.gram() * s));
        let witness = clip_psd(&hermitize(&(s.adjoint() * &self.psd_witness * s)));
        let space = build_space_with(gram, *self.space.tolerances())?;
        let mat = space.solve_gram(&witness);
        build_operator(space, mat)
    }
}

/// Clip tiny negative eigenvalues of a near-PSD Hermitian matrix to exactly
/// zero so validation after a congruence is deterministic. Eigenvalues below
/// `-1e-8 * scale` are kept and will fail validation downstream.
pub(crate) fn clip_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = herm_eigen(m);
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let clip = 1e-8 * scale;
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let v = if vals[i] < 0.0 && vals[i] >= -clip {
            0.0
        } else {
            vals[i]
        };
        if v != 0.0 {
            let q = vecs.column(i);
            out += &q * q.adjoint() * cx(v, 0.0);
        }
    }
    out
}

/// Krein-space adjoint `G^{-1} M^* G`.
pub fn krein_adjoint(space: &GramSpace, m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != space.dim() || m.ncols() != space.dim() {
        return Err(KreinError::DimensionMismatch {
            expected: space.dim(),
            got: m.nrows(),
        });
    }
    Ok(space.gram_inv() * m.adjoint() * space.gram())
}

/// Validate `A` as a non-negative operator on `space`.
pub fn build_operator(space: GramSpace, a: CMatrix) -> Result<KreinOperator> {
    let dim = space.dim();
    if a.nrows() != dim || a.ncols() != dim {
        return Err(KreinError::DimensionMismatch {
            expected: dim,
            got: a.nrows(),
        });
    }
    let raw = space.gram() * &a;
    let witness = hermitize(&raw);
    let (vals, _) = herm_eigen(&witness);
    let witness_norm = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let asymmetry = herm_asymmetry(&raw);
    let herm_tol =
        crate::tol::TAU_HERM * witness_norm.max(space.gram_norm() * f64::MIN_POSITIVE.max(1e-300));
    if asymmetry > herm_tol.max(f64::MIN_POSITIVE) {
        return Err(KreinError::NotSelfadjoint {
            asymmetry,
            tolerance: herm_tol,
        });
    }
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let psd_tol = space.tolerances().psd_rel * witness_norm;
    if min < -psd_tol {
        return Err(KreinError::NotNonNegative {
            eigenvalue: min,
            tolerance: psd_tol,
        });
    }
    let j_norm = space.j_norm_op(&a);
    Ok(KreinOperator {
        space,
        mat: a,
        psd_witness: witness,
        j_norm,
        witness_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_space;
    use crate::testutil::{e1, e2, e3, re_mat};
    use nalgebra::dvector;

    #[test]
    fn paper_example_is_accepted() {
        let op = e1();
        let expect = re_mat(2, &[0.0, 0.0, 0.0, 1.0]);
        assert!((op.witness() - expect).norm() < 1e-14);
    }

    #[test]
    fn indefinite_identity_rejected() {
        let space = build_space(re_mat(2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        let err = build_operator(space, CMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, KreinError::NotNonNegative { .. }));
    }

    #[test]
    fn diagonal_reference_accepted() {
        let op = e2();
        assert!((op.witness() - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn non_selfadjoint_rejected() {
        let space = build_space(CMatrix::identity(2, 2)).unwrap();
        let a = re_mat(2, &[0.0, 1.0, 0.0, 0.0]);
        let err = build_operator(space, a).unwrap_err();
        assert!(matches!(err, KreinError::NotSelfadjoint { .. }));
    }

    #[test]
    fn krein_adjoint_examples() {
        let op = e1();
        let adj = krein_adjoint(op.space(), op.matrix()).unwrap();
        assert!((adj - op.matrix()).norm() < 1e-14, "A is selfadjoint");

        let id_space = build_space(CMatrix::identity(2, 2)).unwrap();
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[cx(1.0, 2.0), cx(0.0, -1.0), cx(3.0, 0.0), cx(0.5, 0.5)],
        );
        let adj = krein_adjoint(&id_space, &m).unwrap();
        assert!((adj - m.adjoint()).norm() < 1e-14);

        let eye = krein_adjoint(&id_space, &CMatrix::identity(2, 2)).unwrap();
        assert!((eye - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn krein_adjoint_is_involutive() {
        let op = e3();
        let m = re_mat(3, &[1.0, 2.0, 0.0, 0.5, 0.0, 1.0, 0.0, 3.0, 2.0]);
        let twice = krein_adjoint(op.space(), &krein_adjoint(op.space(), &m).unwrap()).unwrap();
        assert!((twice - m).norm() < 1e-12);
    }

    #[test]
    fn shifted_reference() {
        let op = e3();
        assert!(op.shifted(0.5).1, "shift inside [0, mu_plus]");
        assert!(!op.shifted(1.5).1, "shift past mu_plus");
        assert!(op.shifted(0.0).1);
    }

    #[test]
    fn congruence_identity_is_identity() {
        let op = e2();
        let moved = op.congruence_transform(&CMatrix::identity(2, 2)).unwrap();
        assert!((moved.matrix() - op.matrix()).norm() < 1e-12);
        assert!((moved.space().gram() - op.space().gram()).norm() < 1e-12);
    }

    #[test]
    fn congruence_diagonal_scaling() {
        let op = e2();
        let s = re_mat(2, &[2.0, 0.0, 0.0, 1.0]);
        let moved = op.congruence_transform(&s).unwrap();
        let expect_g = re_mat(2, &[4.0, 0.0, 0.0, -1.0]);
        let expect_a = re_mat(2, &[1.0, 0.0, 0.0, -1.0]);
        assert!((moved.space().gram() - expect_g).norm() < 1e-12);
        assert!((moved.matrix() - expect_a).norm() < 1e-12);
    }

    #[test]
    fn ill_conditioned_rejected() {
        let op = e2();
        let s = re_mat(2, &[1.0, 0.0, 0.0, 1e-9]);
        assert!(matches!(
            op.congruence_transform(&s),
            Err(KreinError::IllConditioned { .. })
        ));
    }

    #[test]
    fn kernel_vectors_have_zero_form() {
        let op = e3();
        let e3v = dvector![cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)];
        assert_eq!(op.form(&e3v), 0.0);
        assert!(op.apply(&e3v).norm() < 1e-15);
    }
}

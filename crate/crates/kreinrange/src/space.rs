//! Indefinite inner-product spaces.
//!
//! A `GramSpace` is `C^n` equipped with the sesquilinear form
//! `[x, y] = y^* G x` for an invertible Hermitian `G`. The constructor
//! computes the inertia and a canonical congruence `S^* G S = diag(+1..,-1..)`
//! together with the induced fundamental symmetry `J`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::linalg::{cx, herm_asymmetry, herm_eigen, hermitize, CMatrix, CVector};
use crate::tol::{Tolerances, TAU_HERM, TAU_NEUTRAL};

/// Sign class of a single vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorClass {
    Positive,
    Negative,
    Neutral,
    Zero,
}

/// Inertia-based class of a subspace.
///
/// `Positive`/`Negative` are the definite classes; everything except those
/// two (and the trivial `Zero`) counts as "not definite".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubspaceClass {
    Zero,
    Positive,
    Negative,
    Neutral,
    NonNegDegenerate,
    NonPosDegenerate,
    Indefinite,
}

impl SubspaceClass {
    pub fn is_definite(self) -> bool {
        matches!(self, SubspaceClass::Positive | SubspaceClass::Negative)
    }

    /// The paper's "indefinite" (= not definite), excluding the trivial
    /// subspace.
    pub fn is_not_definite(self) -> bool {
        matches!(
            self,
            SubspaceClass::Neutral
                | SubspaceClass::NonNegDegenerate
                | SubspaceClass::NonPosDegenerate
                | SubspaceClass::Indefinite
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SubspaceClass::Zero => "Zero",
            SubspaceClass::Positive => "Positive",
            SubspaceClass::Negative => "Negative",
            SubspaceClass::Neutral => "Neutral",
            SubspaceClass::NonNegDegenerate => "NonNegDegenerate",
            SubspaceClass::NonPosDegenerate => "NonPosDegenerate",
            SubspaceClass::Indefinite => "Indefinite",
        }
    }

    pub fn parse(s: &str) -> Option<SubspaceClass> {
        let all = [
            SubspaceClass::Zero,
            SubspaceClass::Positive,
            SubspaceClass::Negative,
            SubspaceClass::Neutral,
            SubspaceClass::NonNegDegenerate,
            SubspaceClass::NonPosDegenerate,
            SubspaceClass::Indefinite,
        ];
        all.into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
    }
}

impl std::fmt::Display for SubspaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An indefinite inner-product space with cached canonical data.
#[derive(Debug, Clone)]
pub struct GramSpace {
    dim: usize,
    gram: CMatrix,
    gram_inv: CMatrix,
    inertia: (usize, usize),
    /// `S` with `S^* G S = diag(+1 x n_plus, -1 x n_minus)`.
    canon: CMatrix,
    canon_inv: CMatrix,
    /// Fundamental symmetry `J = S D S^{-1}`; Hermitian involution with
    /// `[Jx, x] >= 0`.
    fund_sym: CMatrix,
    gram_norm: f64,
    tol: Tolerances,
}

impl GramSpace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn gram_inv(&self) -> &CMatrix {
        &self.gram_inv
    }

    pub fn inertia(&self) -> (usize, usize) {
        self.inertia
    }

    pub fn canon(&self) -> &CMatrix {
        &self.canon
    }

    pub fn canon_inv(&self) -> &CMatrix {
        &self.canon_inv
    }

    pub fn fund_sym(&self) -> &CMatrix {
        &self.fund_sym
    }

    /// Largest eigenvalue magnitude of `G`.
    pub fn gram_norm(&self) -> f64 {
        self.gram_norm
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// True when the form has both positive and negative squares.
    pub fn is_indefinite(&self) -> bool {
        self.inertia.0 > 0 && self.inertia.1 > 0
    }

    fn check_dim(&self, x: &CVector) -> Result<()> {
        if x.len() != self.dim {
            return Err(KreinError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `[x, y] = y^* G x`.
    pub fn inner(&self, x: &CVector, y: &CVector) -> Result<Complex64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok((y.adjoint() * &self.gram * x)[(0, 0)])
    }

    /// `[x, x]`, which is real for Hermitian `G`.
    pub fn self_inner(&self, x: &CVector) -> Result<f64> {
        Ok(self.inner(x, x)?.re)
    }

    pub fn classify_vector(&self, x: &CVector) -> Result<VectorClass> {
        self.check_dim(x)?;
        let norm_sq = x.norm_squared();
        if norm_sq == 0.0 {
            return Ok(VectorClass::Zero);
        }
        let s = self.self_inner(x)?;
        let cut = TAU_NEUTRAL * norm_sq * self.gram_norm;
        Ok(if s > cut {
            VectorClass::Positive
        } else if s < -cut {
            VectorClass::Negative
        } else {
            VectorClass::Neutral
        })
    }

    /// Classify the span of the given basis by the inertia of the compressed
    /// Gram matrix. The basis must have full column rank.
    pub fn classify_subspace(&self, basis: &[CVector]) -> Result<SubspaceClass> {
        if basis.is_empty() {
            return Ok(SubspaceClass::Zero);
        }
        for v in basis {
            self.check_dim(v)?;
        }
        let k = basis.len();
        let mut b = CMatrix::zeros(self.dim, k);
        for (c, v) in basis.iter().enumerate() {
            b.set_column(c, v);
        }
        // Orthonormalize first so the inertia cut is scale free.
        let svd = b.clone().svd(true, false);
        let smax = svd.singular_values.max();
        let cut = self.tol.rank_cut(self.dim.max(k), smax);
        let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
        if rank < k {
            return Err(KreinError::RankDeficientBasis { rank, count: k });
        }
        let u = svd.u.as_ref().expect("svd with u");
        let q = u.columns(0, k).into_owned();
        let compressed = q.adjoint() * &self.gram * &q;
        let (vals, _) = herm_eigen(&compressed);
        let cut = TAU_NEUTRAL * self.gram_norm;
        let p = vals.iter().filter(|&&v| v > cut).count();
        let n = vals.iter().filter(|&&v| v < -cut).count();
        let z = k - p - n;
        Ok(match (p > 0, n > 0, z > 0) {
            (true, false, false) => SubspaceClass::Positive,
            (false, true, false) => SubspaceClass::Negative,
            (false, false, true) => SubspaceClass::Neutral,
            (true, false, true) => SubspaceClass::NonNegDegenerate,
            (false, true, true) => SubspaceClass::NonPosDegenerate,
            (true, true, _) => SubspaceClass::Indefinite,
            (false, false, false) => unreachable!("k > 0"),
        })
    }

    /// The fundamental symmetry and the canonicalizing congruence `(J, S)`.
    pub fn fundamental_decomposition(&self) -> (CMatrix, CMatrix) {
        (self.fund_sym.clone(), self.canon.clone())
    }

    /// Positive inner product `(x, y)_J = [Jx, y]`.
    pub fn j_inner(&self, x: &CVector, y: &CVector) -> Result<Complex64> {
        let sx = &self.canon_inv * x;
        let sy = &self.canon_inv * y;
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok((sy.adjoint() * sx)[(0, 0)])
    }

    /// `|x|_J = [Jx, x]^{1/2}`.
    pub fn j_norm_vec(&self, x: &CVector) -> f64 {
        (&self.canon_inv * x).norm()
    }

    /// Operator norm of `M` with respect to the J-norm
    /// (`= |S^{-1} M S|_2`).
    pub fn j_norm_op(&self, m: &CMatrix) -> f64 {
        crate::linalg::spectral_norm(&(&self.canon_inv * m * &self.canon))
    }

    /// `G^{-1} rhs` through the cached Hermitian inverse.
    pub fn solve_gram(&self, rhs: &CMatrix) -> CMatrix {
        &self.gram_inv * rhs
    }
}

/// Validate `G` and build the space.
pub fn build_space(gram: CMatrix) -> Result<GramSpace> {
    build_space_with(gram, Tolerances::default())
}

pub fn build_space_with(gram: CMatrix, tol: Tolerances) -> Result<GramSpace> {
    let dim = gram.nrows();
    if dim == 0 || gram.ncols() != dim {
        return Err(KreinError::InvalidInput(format!(
            "Gram matrix must be square and non-empty, got {}x{}",
            gram.nrows(),
            gram.ncols()
        )));
    }
    let g_herm = hermitize(&gram);
    let (vals, vecs) = herm_eigen(&g_herm);
    let gram_norm = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let asymmetry = herm_asymmetry(&gram);
    let herm_tol = TAU_HERM * gram_norm.max(f64::MIN_POSITIVE);
    if asymmetry > herm_tol {
        return Err(KreinError::NotHermitian {
            asymmetry,
            tolerance: herm_tol,
        });
    }
    let cut = tol.rank_cut(dim, gram_norm);
    let smallest = vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if smallest <= cut {
        return Err(KreinError::Singular {
            smallest,
            tolerance: cut,
        });
    }

    // Order eigenpairs with positive eigenvalues first (descending), then
    // negative ones (descending, i.e. closest to zero first).
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let n_plus = vals.iter().filter(|&&v| v > 0.0).count();
    let n_minus = dim - n_plus;

    let mut canon = CMatrix::zeros(dim, dim);
    let mut canon_inv = CMatrix::zeros(dim, dim);
    let mut fund_sym = CMatrix::zeros(dim, dim);
    let mut gram_inv = CMatrix::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        let lam = vals[i];
        let scale = lam.abs().sqrt();
        let q = vecs.column(i);
        canon.set_column(col, &(q / cx(scale, 0.0)));
        canon_inv.set_row(col, &(q.adjoint() * cx(scale, 0.0)));
    }
    // J = Q D Q^* and G^{-1} = Q Lambda^{-1} Q^* over the same eigenbasis.
    for &i in &order {
        let q = vecs.column(i);
        let outer = &q * q.adjoint();
        let sign = if vals[i] > 0.0 { 1.0 } else { -1.0 };
        fund_sym += &outer * cx(sign, 0.0);
        gram_inv += &outer * cx(1.0 / vals[i], 0.0);
    }

    Ok(GramSpace {
        dim,
        gram: g_herm,
        gram_inv,
        inertia: (n_plus, n_minus),
        canon,
        canon_inv,
        fund_sym,
        gram_norm,
        tol,
    })
}

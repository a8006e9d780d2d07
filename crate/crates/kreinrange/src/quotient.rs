//! The operator induced on the quotient by the kernel.
//!
//! On `K / ker A` with inner product `<[x],[y]> = [Ax, y]` the induced
//! operator becomes an honest Hermitian matrix once coordinates are chosen
//! isometrically: with `P = C^* C` the map `x -> Cx` sends the quotient
//! inner product to the standard one, and the induced matrix is
//! `A~ = C G^{-1} C^*` with `A~ C = C A`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::linalg::{
    dense_eigenvalues, herm_eigen, hermitize, psd_factor, CMatrix, CVector,
};
use crate::operator::KreinOperator;
use crate::spectral::SpectralData;

#[derive(Debug, Clone)]
pub struct QuotientModel {
    /// `rank A`; the dimension of the quotient.
    pub rank: usize,
    /// `rank x dim` isometric coordinate map with `P = C^* C`.
    pub coord_map: CMatrix,
    /// The induced Hermitian matrix.
    pub a_tilde: CMatrix,
    /// Its eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
}

impl QuotientModel {
    /// Quotient coordinates of a vector.
    pub fn project(&self, x: &CVector) -> CVector {
        &self.coord_map * x
    }
}

pub fn build_quotient(op: &KreinOperator) -> Result<QuotientModel> {
    let cut = op
        .space()
        .tolerances()
        .rank_cut(op.dim(), op.witness_norm());
    let factor = psd_factor(op.witness(), cut);
    if factor.rank == 0 {
        return Err(KreinError::ZeroOperator);
    }
    let a_tilde = hermitize(&(&factor.coord_map * op.space().gram_inv() * factor.coord_map.adjoint()));
    let (eigenvalues, _) = herm_eigen(&a_tilde);
    Ok(QuotientModel {
        rank: factor.rank,
        coord_map: factor.coord_map,
        a_tilde,
        eigenvalues,
    })
}

/// Comparison of the nonzero spectra of the induced matrix and of `A`
/// itself, the latter computed by a general-purpose dense eigensolver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaMatchReport {
    /// Nonzero eigenvalues of `A` (real parts after the imaginary check).
    pub operator_side: Vec<f64>,
    /// Nonzero eigenvalues of the induced matrix.
    pub quotient_side: Vec<f64>,
    pub max_relative_gap: f64,
    pub max_imaginary_part: f64,
    pub matched: bool,
}

pub fn verify_sigma_match(op: &KreinOperator, qm: &QuotientModel) -> Result<SigmaMatchReport> {
    let tau = crate::tol::TAU_CLUSTER_REL * op.j_norm().max(1.0);
    let raw: Vec<Complex64> = dense_eigenvalues(op.matrix()).ok_or_else(|| {
        KreinError::NumericalBreakdown("dense eigensolver did not converge".into())
    })?;
    let mut quotient_side: Vec<f64> = qm
        .eigenvalues
        .iter()
        .copied()
        .filter(|v| v.abs() > tau)
        .collect();
    quotient_side.sort_by(f64::total_cmp);

    // Greedy multiset pairing at 1e-9 relative. Whatever the pairing leaves
    // on the operator side must be the zero group; a defective zero splits
    // under a dense eigensolver into spurious values of order sqrt(eps), so
    // the leftover slack is much wider than the pairing tolerance.
    let mut remaining = raw.clone();
    let mut max_relative_gap = 0.0f64;
    let mut matched = true;
    for &q in &quotient_side {
        let target = Complex64::new(q, 0.0);
        let nearest = remaining
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (**a - target).norm().total_cmp(&(**b - target).norm()))
            .map(|(i, _)| i);
        match nearest {
            Some(i) => {
                let gap = (remaining[i] - target).norm() / q.abs().max(1.0);
                max_relative_gap = max_relative_gap.max(gap);
                if gap > 1e-9 {
                    matched = false;
                }
                remaining.swap_remove(i);
            }
            None => matched = false,
        }
    }
    let zero_slack = 1e-5 * op.j_norm().max(1.0);
    if remaining.iter().any(|z| z.norm() > zero_slack) {
        matched = false;
    }
    let max_imaginary_part = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut operator_side: Vec<f64> = raw
        .iter()
        .filter(|z| z.norm() > tau)
        .map(|z| z.re)
        .collect();
    operator_side.sort_by(f64::total_cmp);

    Ok(SigmaMatchReport {
        operator_side,
        quotient_side,
        max_relative_gap,
        max_imaginary_part,
        matched,
    })
}

/// Invertibility criterion: zero is a resolvent point of the induced matrix
/// exactly when `A` is invertible or zero is an eigenvalue with
/// `ker A = ker A^2`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZeroResolvent {
    pub predicted: bool,
    pub observed: bool,
}

impl ZeroResolvent {
    pub fn agree(&self) -> bool {
        self.predicted == self.observed
    }
}

pub fn zero_resolvent_criterion(op: &KreinOperator, qm: &QuotientModel) -> ZeroResolvent {
    let dim = op.dim();
    // ker A^2 from the explicit square, independent of the reduction path.
    // Column-pivoted QR keeps the noise floor at machine precision; the cut
    // is structural (1e-9 of the top pivot) because the entries of A already
    // carry roundoff of order eps times the Gram condition number.
    let a_sq = op.matrix() * op.matrix();
    let qr = a_sq.clone().col_piv_qr();
    let r = qr.r();
    let top = r[(0, 0)].norm();
    let cut = 1e-9 * top.max(1.0);
    let rank_sq = (0..dim).filter(|&i| r[(i, i)].norm() > cut).count();

    let invertible = qm.rank == dim;
    let kernel_stable = (dim - qm.rank) == (dim - rank_sq);
    let tau = crate::tol::TAU_CLUSTER_REL * op.j_norm().max(1.0);
    let observed = qm
        .eigenvalues
        .iter()
        .all(|v| v.abs() > tau);
    ZeroResolvent {
        predicted: invertible || kernel_stable,
        observed,
    }
}

/// Which case of the closure characterization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WcoClosureCase {
    /// Zero is absent or not isolated, or spectrum on both sides: the
    /// endpoints equal the extreme eigenvalues of `A`.
    TwoSided,
    /// Isolated zero with no positive spectrum.
    NegativeSide,
    /// Isolated zero with no negative spectrum.
    PositiveSide,
    /// Spectrum is `{0}` alone.
    ZeroOnly,
}

/// Endpoints of the closure of the co-numerical range together with the
/// applicable case tag.
pub fn wco_closure_endpoints(
    qm: &QuotientModel,
    sd: &SpectralData,
) -> (f64, f64, WcoClosureCase) {
    let lo = qm.eigenvalues.first().copied().unwrap_or(0.0);
    let hi = qm.eigenvalues.last().copied().unwrap_or(0.0);
    let has_neg = sd.eigs.iter().any(|e| e.value < 0.0);
    let has_pos = sd.eigs.iter().any(|e| e.value > 0.0);
    let case = if !sd.has_zero_eigenvalue() || (has_neg && has_pos) {
        WcoClosureCase::TwoSided
    } else if has_neg {
        WcoClosureCase::NegativeSide
    } else if has_pos {
        WcoClosureCase::PositiveSide
    } else {
        WcoClosureCase::ZeroOnly
    };
    (lo, hi, case)
}

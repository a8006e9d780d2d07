//! Spectral analysis of a non-negative operator.
//!
//! The nonzero spectrum of `A = G^{-1} P` is computed as the nonzero
//! spectrum of the Hermitian matrix `M = C G^{-1} C^*`, where `P = C^* C`
//! is the rank-revealing factorization of the witness. This keeps every
//! eigenvalue real by construction; eigenvectors of `A` are recovered as
//! `v = G^{-1} C^* u / lambda`. The zero structure comes from `ker P` and
//! the rank of `M` (= rank of `A^2`).

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::linalg::{cx, herm_eigen, hermitize, psd_factor, CMatrix, CVector};
use crate::operator::KreinOperator;
use crate::realset::RealSet;
use crate::space::SubspaceClass;
use crate::tol::TAU_CLUSTER_REL;

/// Sign type attached to an eigenvalue entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignType {
    PlusType,
    MinusType,
    ZeroPoint,
}

/// Classification of a single spectral point, with `Critical` possible only
/// at zero (mixed root subspace).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointType {
    PlusType,
    MinusType,
    Critical,
}

/// One entry of the spectrum summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub sign_type: SignType,
}

/// A nonzero eigenvalue cluster with its recovered eigenvectors.
#[derive(Debug, Clone)]
pub struct EigCluster {
    pub value: f64,
    pub sign_type: SignType,
    pub vectors: Vec<CVector>,
}

impl EigCluster {
    pub fn multiplicity(&self) -> usize {
        self.vectors.len()
    }
}

/// Structure of the root subspace at zero.
#[derive(Debug, Clone)]
pub struct ZeroStructure {
    /// Orthonormal basis of `ker A`.
    pub ker_basis: Vec<CVector>,
    /// Basis of `ker A^2` (kernel basis plus one representative per chain).
    pub ker2_basis: Vec<CVector>,
    /// `dim ker A^2 - dim ker A`; the number of length-two Jordan chains.
    pub chain_count: usize,
    pub kernel_class: SubspaceClass,
    /// `dim ker A^2`, the algebraic multiplicity of zero.
    pub s0_dim: usize,
    /// Dimension of the span of eigenvectors for positive eigenvalues.
    pub s0_plus_dim: usize,
    /// Dimension of the span of eigenvectors for negative eigenvalues.
    pub s0_minus_dim: usize,
}

/// The four spectral constants; empty intersections use the sentinel values
/// `-inf`/`+inf` for `mu` and `0` for `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConstants {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Spectrum summary, ascending by value, multiplicities summing to dim.
    pub eigs: Vec<EigEntry>,
    pub zero: ZeroStructure,
    pub constants: SpectralConstants,
    /// Nonzero clusters with eigenvectors, ascending by value.
    pub clusters: Vec<EigCluster>,
    /// `rank A` (= rank of the witness).
    pub rank: usize,
    /// `rank A^2` (= rank of the reduced matrix).
    pub rank_sq: usize,
    pub tau_cluster: f64,
    pub range_class: SubspaceClass,
    /// Basis of `ran A`.
    pub range_basis: Vec<CVector>,
    /// Representatives of `ker A^2 \ ker A`, one per chain.
    pub chain_vectors: Vec<CVector>,
}

impl SpectralData {
    pub fn has_zero_eigenvalue(&self) -> bool {
        self.zero.s0_dim > 0
    }

    /// Distinct eigenvalues, including zero when present.
    pub fn values(&self) -> Vec<f64> {
        self.eigs.iter().map(|e| e.value).collect()
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.eigs.first().map(|e| e.value)
    }

    pub fn max_eigenvalue(&self) -> Option<f64> {
        self.eigs.last().map(|e| e.value)
    }

    /// `ker A = ker A^2`.
    pub fn kernel_equals_square_kernel(&self) -> bool {
        self.zero.chain_count == 0
    }
}

/// Spectral constants from a spectrum summary.
pub fn spectral_constants(eigs: &[EigEntry]) -> SpectralConstants {
    let neg: Vec<f64> = eigs.iter().map(|e| e.value).filter(|&v| v < 0.0).collect();
    let pos: Vec<f64> = eigs.iter().map(|e| e.value).filter(|&v| v > 0.0).collect();
    SpectralConstants {
        mu_minus: neg.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mu_plus: if pos.is_empty() {
            f64::INFINITY
        } else {
            pos.iter().copied().fold(f64::INFINITY, f64::min)
        },
        nu_minus: if neg.is_empty() {
            0.0
        } else {
            neg.iter().copied().fold(f64::INFINITY, f64::min)
        },
        nu_plus: pos.iter().copied().fold(0.0, f64::max),
    }
}

/// Full structured spectral analysis.
pub fn compute_spectrum(op: &KreinOperator) -> Result<SpectralData> {
    let dim = op.dim();
    let space = op.space();
    let tol = space.tolerances();
    let cut = tol.rank_cut(dim, op.witness_norm());
    let factor = psd_factor(op.witness(), cut);
    let rank = factor.rank;
    let tau_cluster = TAU_CLUSTER_REL * op.j_norm().max(1.0);

    let ker_basis: Vec<CVector> = (0..dim - rank)
        .map(|c| factor.kernel_basis.column(c).into_owned())
        .collect();
    let kernel_class = space.classify_subspace(&ker_basis)?;

    if rank == 0 {
        // A = 0: the kernel is the whole space.
        let constants = SpectralConstants {
            mu_minus: f64::NEG_INFINITY,
            mu_plus: f64::INFINITY,
            nu_minus: 0.0,
            nu_plus: 0.0,
        };
        return Ok(SpectralData {
            eigs: vec![EigEntry {
                value: 0.0,
                multiplicity: dim,
                sign_type: SignType::ZeroPoint,
            }],
            zero: ZeroStructure {
                ker2_basis: ker_basis.clone(),
                ker_basis,
                chain_count: 0,
                kernel_class,
                s0_dim: dim,
                s0_plus_dim: 0,
                s0_minus_dim: 0,
            },
            constants,
            clusters: Vec::new(),
            rank: 0,
            rank_sq: 0,
            tau_cluster,
            range_class: SubspaceClass::Zero,
            range_basis: Vec::new(),
            chain_vectors: Vec::new(),
        });
    }

    // Reduced Hermitian matrix; its nonzero spectrum is the nonzero
    // spectrum of A with matching multiplicities.
    let reduced = hermitize(&(&factor.coord_map * space.gram_inv() * factor.coord_map.adjoint()));
    let (m_vals, m_vecs) = herm_eigen(&reduced);

    // Zero cut inside the reduced matrix; a value in the gray zone makes
    // the multiplicity of zero ambiguous.
    for &v in &m_vals {
        if v.abs() > tau_cluster && v.abs() <= 10.0 * tau_cluster {
            return Err(KreinError::NumericalBreakdown(format!(
                "reduced eigenvalue {v:e} sits in the gray zone of the zero cut {tau_cluster:e}"
            )));
        }
    }
    let zero_idx: Vec<usize> = (0..rank).filter(|&i| m_vals[i].abs() <= tau_cluster).collect();
    let nonzero_idx: Vec<usize> = (0..rank).filter(|&i| m_vals[i].abs() > tau_cluster).collect();
    let rank_sq = nonzero_idx.len();

    // Cluster the nonzero values (already ascending).
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &nonzero_idx {
        match groups.last_mut() {
            Some(g) if m_vals[i] - m_vals[*g.last().unwrap()] <= tau_cluster => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    for pair in groups.windows(2) {
        let gap = m_vals[pair[1][0]] - m_vals[*pair[0].last().unwrap()];
        if gap <= 10.0 * tau_cluster {
            return Err(KreinError::NumericalBreakdown(format!(
                "cluster gap {gap:e} is too close to the clustering tolerance {tau_cluster:e}"
            )));
        }
    }

    // Recover eigenvectors of A per cluster and classify the eigenspace.
    let pullback = space.gram_inv() * factor.coord_map.adjoint();
    let mut clusters = Vec::with_capacity(groups.len());
    for group in &groups {
        let value = group.iter().map(|&i| m_vals[i]).sum::<f64>() / group.len() as f64;
        let vectors: Vec<CVector> = group
            .iter()
            .map(|&i| {
                let u = m_vecs.column(i).into_owned();
                (&pullback * u) / cx(m_vals[i], 0.0)
            })
            .collect();
        let class = space.classify_subspace(&vectors)?;
        let sign_type = match class {
            SubspaceClass::Positive => SignType::PlusType,
            SubspaceClass::Negative => SignType::MinusType,
            other => {
                return Err(KreinError::NumericalBreakdown(format!(
                    "eigenspace at {value} classifies as {other}; nonzero eigenvalues of a \
                     non-negative operator must have definite eigenspaces"
                )))
            }
        };
        clusters.push(EigCluster {
            value,
            sign_type,
            vectors,
        });
    }

    // Jordan structure at zero: chains have length at most two and the
    // representatives are pre-images of the zero modes of the reduction.
    let mut chain_vectors = Vec::with_capacity(zero_idx.len());
    for &i in &zero_idx {
        let w = m_vecs.column(i);
        let mut x = CVector::zeros(dim);
        for (col, s) in factor.sigma.iter().enumerate() {
            let coeff = w[col] / cx(s.sqrt(), 0.0);
            x += factor.range_basis.column(col) * coeff;
        }
        chain_vectors.push(x);
    }
    let mut ker2_basis = ker_basis.clone();
    ker2_basis.extend(chain_vectors.iter().cloned());
    let chain_count = chain_vectors.len();
    let s0_dim = dim - rank_sq;

    let s0_plus_dim: usize = clusters
        .iter()
        .filter(|c| c.value > 0.0)
        .map(|c| c.multiplicity())
        .sum();
    let s0_minus_dim: usize = clusters
        .iter()
        .filter(|c| c.value < 0.0)
        .map(|c| c.multiplicity())
        .sum();

    // ran A = G^{-1} ran P.
    let range_basis: Vec<CVector> = (0..rank)
        .map(|c| space.gram_inv() * factor.range_basis.column(c).into_owned())
        .collect();
    let range_class = space.classify_subspace(&range_basis)?;

    let mut eigs: Vec<EigEntry> = clusters
        .iter()
        .map(|c| EigEntry {
            value: c.value,
            multiplicity: c.multiplicity(),
            sign_type: c.sign_type,
        })
        .collect();
    if s0_dim > 0 {
        eigs.push(EigEntry {
            value: 0.0,
            multiplicity: s0_dim,
            sign_type: SignType::ZeroPoint,
        });
    }
    eigs.sort_by(|a, b| a.value.total_cmp(&b.value));
    debug_assert_eq!(eigs.iter().map(|e| e.multiplicity).sum::<usize>(), dim);

    let constants = spectral_constants(&eigs);

    Ok(SpectralData {
        eigs,
        zero: ZeroStructure {
            ker_basis,
            ker2_basis,
            chain_count,
            kernel_class,
            s0_dim,
            s0_plus_dim,
            s0_minus_dim,
        },
        constants,
        clusters,
        rank,
        rank_sq,
        tau_cluster,
        range_class,
        range_basis,
        chain_vectors,
    })
}

/// Krein-orthogonal eigenprojection onto a definite eigenspace:
/// `E = eps * V' V'^* G` with `V'^* G V' = eps * I`.
fn eigenprojection(op: &KreinOperator, cluster: &EigCluster) -> CMatrix {
    let dim = op.dim();
    let m = cluster.vectors.len();
    let mut v = CMatrix::zeros(dim, m);
    for (c, vec) in cluster.vectors.iter().enumerate() {
        v.set_column(c, vec);
    }
    let compressed = v.adjoint() * op.space().gram() * &v;
    let (theta, w) = herm_eigen(&compressed);
    let eps = if cluster.sign_type == SignType::PlusType {
        1.0
    } else {
        -1.0
    };
    let mut scaled = &v * w;
    for c in 0..m {
        let f = cx(1.0 / theta[c].abs().sqrt(), 0.0);
        for r in 0..dim {
            scaled[(r, c)] *= f;
        }
    }
    &scaled * scaled.adjoint() * op.space().gram() * cx(eps, 0.0)
}

/// The spectral projection `E(delta)`: the sum of eigenprojections for the
/// eigenvalues inside `delta`, with the zero projection defined by
/// complementation.
pub fn spectral_projector(
    op: &KreinOperator,
    sd: &SpectralData,
    delta: &RealSet,
) -> Result<CMatrix> {
    // No eigenvalue may straddle the boundary of delta.
    let mut boundary: Vec<f64> = Vec::new();
    for iv in delta.intervals() {
        if iv.lo.0.is_finite() {
            boundary.push(iv.lo.0);
        }
        if iv.hi.0.is_finite() {
            boundary.push(iv.hi.0);
        }
    }
    boundary.extend_from_slice(delta.punctures());
    for entry in &sd.eigs {
        for &b in &boundary {
            if (entry.value - b).abs() <= sd.tau_cluster {
                return Err(KreinError::BoundaryEigenvalue {
                    eigenvalue: entry.value,
                    boundary: b,
                });
            }
        }
    }

    let dim = op.dim();
    let mut total = CMatrix::zeros(dim, dim);
    let mut nonzero_sum = CMatrix::zeros(dim, dim);
    for cluster in &sd.clusters {
        let proj = eigenprojection(op, cluster);
        if delta.membership(cluster.value) {
            total += &proj;
        }
        nonzero_sum += &proj;
    }
    if sd.has_zero_eigenvalue() && delta.membership(0.0) {
        total += CMatrix::identity(dim, dim) - nonzero_sum;
    }
    Ok(total)
}

/// Sign type of a spectral point, decided by the class of its spectral
/// subspace. Only zero can be critical.
pub fn sign_type(op: &KreinOperator, sd: &SpectralData, lambda: f64) -> Result<PointType> {
    if lambda.abs() <= sd.tau_cluster {
        if !sd.has_zero_eigenvalue() {
            return Err(KreinError::NotAnEigenvalue(lambda));
        }
        let class = op.space().classify_subspace(&sd.zero.ker2_basis)?;
        return Ok(match class {
            SubspaceClass::Positive => PointType::PlusType,
            SubspaceClass::Negative => PointType::MinusType,
            _ => PointType::Critical,
        });
    }
    for cluster in &sd.clusters {
        if (cluster.value - lambda).abs() <= sd.tau_cluster {
            return Ok(match cluster.sign_type {
                SignType::PlusType => PointType::PlusType,
                SignType::MinusType => PointType::MinusType,
                SignType::ZeroPoint => PointType::Critical,
            });
        }
    }
    Err(KreinError::NotAnEigenvalue(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_operator;
    use crate::space::build_space;
    use crate::testutil::{e1, e2, e3, re_mat};

    fn spectrum_of(op: &KreinOperator) -> SpectralData {
        compute_spectrum(op).unwrap()
    }

    #[test]
    fn nilpotent_reference_spectrum() {
        let sd = spectrum_of(&e1());
        assert_eq!(sd.eigs.len(), 1);
        assert_eq!(sd.eigs[0].value, 0.0);
        assert_eq!(sd.eigs[0].multiplicity, 2);
        assert_eq!(sd.zero.chain_count, 1);
        assert_eq!(sd.zero.kernel_class, SubspaceClass::Neutral);
        assert_eq!(sd.rank, 1);
        assert_eq!(sd.rank_sq, 0);
        assert_eq!(sd.range_class, SubspaceClass::Neutral);
    }

    #[test]
    fn diagonal_reference_spectrum() {
        let sd = spectrum_of(&e2());
        let summary: Vec<(f64, usize, SignType)> = sd
            .eigs
            .iter()
            .map(|e| (e.value, e.multiplicity, e.sign_type))
            .collect();
        assert_eq!(
            summary,
            vec![
                (-1.0, 1, SignType::MinusType),
                (1.0, 1, SignType::PlusType)
            ]
        );
        assert!(sd.zero.ker_basis.is_empty());
        assert_eq!(sd.zero.kernel_class, SubspaceClass::Zero);
        assert_eq!(sd.range_class, SubspaceClass::Indefinite);
    }

    #[test]
    fn three_dim_reference_spectrum() {
        let sd = spectrum_of(&e3());
        let expect = [
            (0.0, 1, SignType::ZeroPoint),
            (1.0, 1, SignType::PlusType),
            (2.0, 1, SignType::PlusType),
        ];
        assert_eq!(sd.eigs.len(), expect.len());
        for (got, want) in sd.eigs.iter().zip(expect) {
            assert!((got.value - want.0).abs() < 1e-12);
            assert_eq!(got.multiplicity, want.1);
            assert_eq!(got.sign_type, want.2);
        }
        assert_eq!(sd.zero.kernel_class, SubspaceClass::Negative);
        assert_eq!(sd.zero.chain_count, 0);
        assert_eq!(sd.range_class, SubspaceClass::Positive);
    }

    #[test]
    fn constants_for_references() {
        let c1 = spectrum_of(&e1()).constants;
        assert_eq!(c1.mu_minus, f64::NEG_INFINITY);
        assert_eq!(c1.mu_plus, f64::INFINITY);
        assert_eq!(c1.nu_minus, 0.0);
        assert_eq!(c1.nu_plus, 0.0);

        let c2 = spectrum_of(&e2()).constants;
        for (got, want) in [
            (c2.mu_minus, -1.0),
            (c2.mu_plus, 1.0),
            (c2.nu_minus, -1.0),
            (c2.nu_plus, 1.0),
        ] {
            assert!((got - want).abs() < 1e-12);
        }

        let c3 = spectrum_of(&e3()).constants;
        assert_eq!(c3.mu_minus, f64::NEG_INFINITY);
        assert!((c3.mu_plus - 1.0).abs() < 1e-12);
        assert_eq!(c3.nu_minus, 0.0);
        assert!((c3.nu_plus - 2.0).abs() < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let op = e3();
        let sd = spectrum_of(&op);
        let proj = spectral_projector(&op, &sd, &RealSet::interval(0.5, 3.0, true, true)).unwrap();
        let expect = re_mat(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((proj - expect).norm() < 1e-10);

        let all = spectral_projector(&op, &sd, &RealSet::full()).unwrap();
        assert!((all - CMatrix::identity(3, 3)).norm() < 1e-10);

        let op2 = e2();
        let sd2 = spectrum_of(&op2);
        let pos = spectral_projector(
            &op2,
            &sd2,
            &RealSet::interval(0.0, f64::INFINITY, false, false),
        )
        .unwrap();
        let expect = re_mat(2, &[1.0, 0.0, 0.0, 0.0]);
        assert!((pos - expect).norm() < 1e-10);
    }

    #[test]
    fn projector_boundary_eigenvalue_rejected() {
        let op = e3();
        let sd = spectrum_of(&op);
        let err = spectral_projector(&op, &sd, &RealSet::interval(1.0, 3.0, true, true)).unwrap_err();
        assert!(matches!(err, KreinError::BoundaryEigenvalue { .. }));
    }

    #[test]
    fn sign_type_examples() {
        let op2 = e2();
        let sd2 = spectrum_of(&op2);
        assert_eq!(sign_type(&op2, &sd2, 1.0).unwrap(), PointType::PlusType);

        let op3 = e3();
        let sd3 = spectrum_of(&op3);
        assert_eq!(sign_type(&op3, &sd3, 0.0).unwrap(), PointType::MinusType);

        let op1 = e1();
        let sd1 = spectrum_of(&op1);
        assert_eq!(sign_type(&op1, &sd1, 0.0).unwrap(), PointType::Critical);

        assert!(matches!(
            sign_type(&op2, &sd2, 0.5),
            Err(KreinError::NotAnEigenvalue(_))
        ));
    }

    #[test]
    fn gray_zone_reports_breakdown() {
        let space = build_space(CMatrix::identity(2, 2)).unwrap();
        let a = re_mat(2, &[1.0, 0.0, 0.0, 5e-7]);
        let op = build_operator(space, a).unwrap();
        assert!(matches!(
            compute_spectrum(&op),
            Err(KreinError::NumericalBreakdown(_))
        ));

        let space = build_space(CMatrix::identity(2, 2)).unwrap();
        let a = re_mat(2, &[1.0, 0.0, 0.0, 1.0 + 3e-7]);
        let op = build_operator(space, a).unwrap();
        assert!(matches!(
            compute_spectrum(&op),
            Err(KreinError::NumericalBreakdown(_))
        ));
    }

    #[test]
    fn zero_operator_spectrum() {
        let space = build_space(re_mat(2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        let op = build_operator(space, CMatrix::zeros(2, 2)).unwrap();
        let sd = spectrum_of(&op);
        assert_eq!(sd.rank, 0);
        assert_eq!(sd.eigs[0].multiplicity, 2);
        assert_eq!(sd.range_class, SubspaceClass::Zero);
        assert_eq!(sd.zero.kernel_class, SubspaceClass::Indefinite);
    }
}

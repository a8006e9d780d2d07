//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(M + M*)/2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Largest absolute entry of `M - M*`.
pub fn herm_asymmetry(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian
/// matrix, by cyclic Jacobi sweeps. The input is symmetrized first so tiny
/// drift cannot leak in.
///
/// Jacobi is preferred over the tridiagonal QL path here: at these small
/// dimensions it is effectively free and it converges to entrywise machine
/// precision regardless of the spectrum's sign pattern.
pub fn herm_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let mut a = hermitize(m);
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let target = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= target {
            break;
        }
        // Entries this small cannot push the off-diagonal mass back over
        // the target, and dividing by them underflows.
        let skip_cut = target / (10.0 * (n * n) as f64);
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= skip_cut {
                    continue;
                }
                // Unitary rotation V1 with V1[p,p]=c, V1[p,q]=-sigma,
                // V1[q,p]=conj(sigma), V1[q,q]=c annihilating a[p,q].
                // Componentwise division; complex division squares `mag`
                // internally and underflows for subnormal entries.
                let phase = cx(apq.re / mag, apq.im / mag);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Small-magnitude root of t^2 - 2*tau*t - 1 = 0.
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sigma = phase * cx(s, 0.0);

                // Columns p, q of A <- A * V1.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cx(c, 0.0) + akq * sigma.conj();
                    a[(k, q)] = akq * cx(c, 0.0) - akp * sigma;
                }
                // Rows p, q of A <- V1^* A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cx(c, 0.0) + aqk * sigma;
                    a[(q, k)] = aqk * cx(c, 0.0) - apk * sigma.conj();
                }
                a[(p, q)] = cx(0.0, 0.0);
                a[(q, p)] = cx(0.0, 0.0);
                a[(p, p)] = cx(a[(p, p)].re, 0.0);
                a[(q, q)] = cx(a[(q, q)].re, 0.0);
                // Eigenvector accumulator <- V * V1.
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cx(c, 0.0) + vkq * sigma.conj();
                    v[(k, q)] = vkq * cx(c, 0.0) - vkp * sigma;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a_i, &b_i| a[(a_i, a_i)].re.total_cmp(&a[(b_i, b_i)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &v.column(i));
    }
    (values, vectors)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
pub fn herm_norm(m: &CMatrix) -> f64 {
    let (vals, _) = herm_eigen(m);
    vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Condition number via SVD; `inf` when numerically singular.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Rank-revealing factorization of a Hermitian PSD matrix:
/// `P = U_r * diag(sigma) * U_r^*` with `sigma > cut`, plus the coordinate
/// map `C = diag(sigma)^{1/2} * U_r^*` so that `P = C^* C`.
pub struct PsdFactor {
    pub rank: usize,
    /// Positive eigenvalues, ascending.
    pub sigma: Vec<f64>,
    /// `dim x rank`, orthonormal columns spanning `ran P`.
    pub range_basis: CMatrix,
    /// `dim x (dim - rank)`, orthonormal columns spanning `ker P`.
    pub kernel_basis: CMatrix,
    /// `rank x dim` map with `P = C^* C`.
    pub coord_map: CMatrix,
}

pub fn psd_factor(p: &CMatrix, cut: f64) -> PsdFactor {
    let n = p.nrows();
    let (vals, vecs) = herm_eigen(p);
    let kept: Vec<usize> = (0..n).filter(|&i| vals[i] > cut).collect();
    let dropped: Vec<usize> = (0..n).filter(|&i| vals[i] <= cut).collect();
    let rank = kept.len();
    let mut range_basis = CMatrix::zeros(n, rank);
    let mut sigma = Vec::with_capacity(rank);
    for (col, &i) in kept.iter().enumerate() {
        range_basis.set_column(col, &vecs.column(i));
        sigma.push(vals[i]);
    }
    let mut kernel_basis = CMatrix::zeros(n, n - rank);
    for (col, &i) in dropped.iter().enumerate() {
        kernel_basis.set_column(col, &vecs.column(i));
    }
    let mut coord_map = range_basis.adjoint();
    for (row, s) in sigma.iter().enumerate() {
        let f = cx(s.sqrt(), 0.0);
        for c in 0..n {
            coord_map[(row, c)] *= f;
        }
    }
    PsdFactor {
        rank,
        sigma,
        range_basis,
        kernel_basis,
        coord_map,
    }
}

/// Eigenvalues of a general complex matrix via the Schur form. The QR
/// iteration occasionally refuses the tightest tolerance on clustered
/// spectra, so the tolerance relaxes in steps well below any consumer's
/// matching threshold.
pub fn dense_eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    if m.norm() == 0.0 {
        return Some(vec![Complex64::new(0.0, 0.0); n]);
    }
    for eps in [1e-14, 1e-12, 1e-11] {
        if let Some(schur) = m.clone().try_schur(eps, 50_000) {
            let (_, t) = schur.unpack();
            return Some((0..n).map(|i| t[(i, i)]).collect());
        }
    }
    None
}

/// Complex vector with independent standard-normal real and imaginary parts.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| {
        cx(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Complex matrix with independent standard-normal entries.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, m: usize) -> CMatrix {
    CMatrix::from_fn(n, m, |_, _| {
        cx(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Unit vector draw.
pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = random_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / cx(norm, 0.0);
        }
    }
}

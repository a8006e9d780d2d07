//! Structural invariants checked across a generated corpus: quadratic-form
//! inequalities, sign-type rules, Jordan structure, projector algebra, and
//! prediction invariance under congruence.

use kreinrange::generate::{achievable_combos, generate_case};
use kreinrange::linalg::{cx, dense_eigenvalues, random_matrix, random_vector, CMatrix, CVector};
use kreinrange::operator::KreinOperator;
use kreinrange::ranges::{predict_w, predict_wco, sample_range, RangeKind};
use kreinrange::realset::RealSet;
use kreinrange::space::SubspaceClass;
use kreinrange::spectral::{compute_spectrum, spectral_projector, SignType, SpectralData};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic corpus sweeping the achievable class combinations.
fn corpus(dims: &[usize], per_combo: usize, seed: u64) -> Vec<KreinOperator> {
    let mut out = Vec::new();
    for &dim in dims {
        for (kernel, range) in achievable_combos(dim) {
            for k in 0..per_combo {
                let s = seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add((dim as u64) << 32)
                    .wrapping_add(k as u64);
                out.push(generate_case(dim, kernel, range, s).unwrap());
            }
        }
    }
    out
}

fn spectra(ops: &[KreinOperator]) -> Vec<(usize, SpectralData)> {
    ops.iter()
        .enumerate()
        .map(|(i, op)| (i, compute_spectrum(op).unwrap()))
        .collect()
}

#[test]
fn cauchy_schwarz_for_the_operator_form() {
    let ops = corpus(&[2, 3, 4, 5], 1, 101);
    let mut rng = ChaCha8Rng::seed_from_u64(2101);
    for op in &ops {
        for _ in 0..20 {
            let x = random_vector(&mut rng, op.dim());
            let y = random_vector(&mut rng, op.dim());
            let cross = op.form_pair(&x, &y).norm();
            let fx = op.form(&x).max(0.0);
            let fy = op.form(&y).max(0.0);
            let scale = op.witness_norm() * x.norm_squared().max(y.norm_squared());
            assert!(
                cross * cross <= fx * fy + 1e-10 * scale * scale,
                "Cauchy-Schwarz violated: {} vs {}",
                cross * cross,
                fx * fy
            );
        }
    }
}

#[test]
fn kernel_characterization_of_the_form() {
    let ops = corpus(&[3, 4], 2, 103);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        for k in &sd.zero.ker_basis {
            // Exact direction: kernel vectors annihilate the form.
            assert!(op.form(k).abs() <= 1e-10 * op.witness_norm());
            assert!(op.apply(k).norm() <= 1e-8 * op.j_norm().max(1.0));
        }
    }
}

#[test]
fn quantitative_kernel_bound() {
    // |Ax|_J^4 <= [Ax,x] * [A(JAx), JAx] for every vector.
    let ops = corpus(&[2, 3, 4, 5], 1, 107);
    let mut rng = ChaCha8Rng::seed_from_u64(2107);
    for op in &ops {
        let j = op.space().fund_sym().clone();
        for _ in 0..20 {
            let x = random_vector(&mut rng, op.dim());
            let ax = op.apply(&x);
            let jax = &j * &ax;
            let lhs = op.space().j_norm_vec(&ax).powi(4);
            let rhs = op.form(&x) * op.form(&jax);
            let scale = (op.j_norm().max(1.0) * x.norm_squared()).powi(2);
            assert!(lhs <= rhs + 1e-9 * scale, "lhs {lhs} rhs {rhs}");
        }
    }
}

#[test]
fn reid_type_bound() {
    // [A^3 x, x] <= |A^2|_J [Ax, x].
    let ops = corpus(&[2, 3, 4, 5], 1, 109);
    let mut rng = ChaCha8Rng::seed_from_u64(2109);
    for op in &ops {
        let a = op.matrix();
        let a2 = a * a;
        let a2_norm = op.space().j_norm_op(&a2);
        for _ in 0..20 {
            let x = random_vector(&mut rng, op.dim());
            let a3x = &a2 * (a * &x);
            let lhs = op.space().inner(&a3x, &x).unwrap().re;
            let rhs = a2_norm * op.form(&x);
            let scale = op.j_norm().max(1.0).powi(3) * x.norm_squared();
            assert!(lhs <= rhs + 1e-9 * scale, "lhs {lhs} rhs {rhs}");
        }
    }
}

#[test]
fn generated_classes_reproduce_over_many_seeds() {
    for dim in [2usize, 3, 4] {
        for (kernel, range) in achievable_combos(dim) {
            for seed in 0..100u64 {
                let op = generate_case(dim, kernel, range, seed).unwrap();
                let sd = compute_spectrum(&op).unwrap();
                assert_eq!(sd.zero.kernel_class, kernel);
                assert_eq!(sd.range_class, range);
            }
        }
    }
}

#[test]
fn eigenvalues_match_dense_oracle() {
    // The reduction-path spectrum agrees with a general-purpose dense
    // eigensolver on the explicit matrix. A defective zero splits under the
    // dense solver into values of order sqrt(eps), so zero entries get a
    // wider slack than the 1e-8 relative tolerance of the nonzero part.
    let ops = corpus(&[2, 3, 4, 5, 6, 7, 8], 2, 113);
    assert!(ops.len() >= 200, "corpus has {} operators", ops.len());
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let mut dense = dense_eigenvalues(op.matrix()).unwrap();
        for entry in &sd.eigs {
            for _ in 0..entry.multiplicity {
                let target = cx(entry.value, 0.0);
                let (idx, gap) = dense
                    .iter()
                    .enumerate()
                    .map(|(i, z)| (i, (z - target).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("dense spectrum exhausted");
                let tol = if entry.value == 0.0 {
                    1e-5 * op.j_norm().max(1.0)
                } else {
                    1e-8 * entry.value.abs().max(1.0)
                };
                assert!(
                    gap <= tol,
                    "eigenvalue {} unmatched (gap {gap:e})",
                    entry.value
                );
                dense.swap_remove(idx);
            }
        }
        assert!(dense.is_empty());
    }
}

#[test]
fn sign_types_follow_the_real_axis() {
    // Positive spectrum has positive type, negative spectrum negative type.
    let ops = corpus(&[2, 3, 4, 5, 6], 1, 127);
    for (_, sd) in spectra(&ops) {
        for entry in &sd.eigs {
            if entry.value > 0.0 {
                assert_eq!(entry.sign_type, SignType::PlusType);
            } else if entry.value < 0.0 {
                assert_eq!(entry.sign_type, SignType::MinusType);
            } else {
                assert_eq!(entry.sign_type, SignType::ZeroPoint);
            }
        }
    }
}

#[test]
fn shifts_inside_the_spectral_gap_stay_non_negative() {
    let ops = corpus(&[2, 3, 4, 5], 2, 131);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let c = &sd.constants;
        let kernel = sd.zero.kernel_class;
        // Shifting down through [0, mu_plus] when the kernel is negative or
        // trivial; mirrored through [mu_minus, 0] when positive or trivial.
        if matches!(kernel, SubspaceClass::Negative | SubspaceClass::Zero)
            && c.mu_plus.is_finite()
        {
            for k in 0..=10 {
                let t = c.mu_plus * k as f64 / 10.0;
                let (_, ok) = op.shifted(t);
                assert!(ok, "shift by {t} lost non-negativity");
            }
        }
        if matches!(kernel, SubspaceClass::Positive | SubspaceClass::Zero)
            && c.mu_minus.is_finite()
        {
            for k in 0..=10 {
                let t = c.mu_minus * k as f64 / 10.0;
                let (_, ok) = op.shifted(t);
                assert!(ok, "shift by {t} lost non-negativity");
            }
        }
    }
}

#[test]
fn jordan_structure_at_zero() {
    let ops = corpus(&[2, 3, 4, 5, 6], 1, 137);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let ker = sd.zero.ker_basis.len();
        let ker2 = sd.zero.ker2_basis.len();
        assert!(ker2 <= 2 * ker, "chain length exceeded two");
        assert_eq!(sd.zero.chain_count, ker2 - ker);
        assert_eq!(sd.zero.chain_count, sd.rank - sd.rank_sq);
        // The image of a chain representative is a neutral eigenvector.
        for chain in &sd.chain_vectors {
            let image = op.apply(chain);
            assert!(op.apply(&image).norm() <= 1e-7 * op.j_norm().max(1.0));
            let class = op.space().classify_vector(&image).unwrap();
            assert_eq!(class, kreinrange::VectorClass::Neutral);
        }
    }
}

#[test]
fn root_subspace_is_orthogonal_to_nonzero_eigenvectors() {
    let ops = corpus(&[3, 4, 5, 6], 1, 139);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let gram = op.space().gram();
        for k in &sd.zero.ker2_basis {
            for cluster in &sd.clusters {
                for v in &cluster.vectors {
                    let ip = (v.adjoint() * gram * k)[(0, 0)].norm();
                    let scale = op.space().gram_norm() * k.norm() * v.norm();
                    assert!(ip <= 1e-9 * scale, "orthogonality residual {ip:e}");
                }
            }
        }
    }
}

#[test]
fn projector_algebra() {
    let ops = corpus(&[2, 3, 4, 5], 1, 149);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let dim = op.dim();
        let identity = CMatrix::identity(dim, dim);
        let full = spectral_projector(op, &sd, &RealSet::full()).unwrap();
        assert!((&full - &identity).norm() <= 1e-9 * dim as f64);

        // Split at a midpoint clear of every eigenvalue.
        let values = sd.values();
        let split = if values.len() >= 2 {
            (values[0] + values[1]) / 2.0
        } else {
            values[0] + 1.0
        };
        let left = RealSet::interval(f64::NEG_INFINITY, split, false, false);
        let right = RealSet::interval(split, f64::INFINITY, false, false);
        let overlap = RealSet::interval(values[0] - 1.0, f64::INFINITY, true, false);

        let e_left = spectral_projector(op, &sd, &left).unwrap();
        let e_right = spectral_projector(op, &sd, &right).unwrap();
        let e_overlap = spectral_projector(op, &sd, &overlap).unwrap();
        let scale = 1.0 + op.space().gram_norm();

        for e in [&e_left, &e_right, &e_overlap] {
            assert!((e * e - e).norm() <= 1e-9 * scale, "not idempotent");
            let ge = op.space().gram() * e;
            assert!(
                (&ge - ge.adjoint()).norm() <= 1e-9 * scale,
                "not selfadjoint in the indefinite product"
            );
        }
        // Additivity on the disjoint split and the intersection identity.
        assert!((&e_left + &e_right - &identity).norm() <= 1e-9 * scale);
        let inter = spectral_projector(op, &sd, &left.intersect(&overlap)).unwrap();
        assert!((&e_left * &e_overlap - inter).norm() <= 1e-9 * scale);
    }
}

#[test]
fn sampling_is_sound_for_both_ranges() {
    let ops = corpus(&[2, 3, 4, 5], 1, 151);
    for (i, op) in ops.iter().enumerate() {
        let sd = compute_spectrum(op).unwrap();
        for kind in [RangeKind::W, RangeKind::Wco] {
            let report = sample_range(op, &sd, kind, 2_000, 1000 + i as u64).unwrap();
            assert!(
                report.violations.is_empty(),
                "{kind:?} violations on instance {i}: {:?}",
                report.violations.first()
            );
        }
    }
}

#[test]
fn predicted_w_pieces_are_intervals_unbounded_when_nonempty() {
    let ops = corpus(&[2, 3, 4, 5, 6], 1, 157);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let w = predict_w(op, &sd, false).unwrap();
        if sd.rank == 0 || !op.space().is_indefinite() {
            continue;
        }
        let pos = w.intersect(&RealSet::interval(0.0, f64::INFINITY, false, false));
        let neg = w.intersect(&RealSet::interval(f64::NEG_INFINITY, 0.0, false, false));
        for piece in [&pos, &neg] {
            assert!(piece.intervals().len() <= 1, "piece is not convex");
            if let Some(iv) = piece.intervals().first() {
                assert!(
                    iv.lo.0 == f64::NEG_INFINITY || iv.hi.0 == f64::INFINITY,
                    "nonempty piece must be unbounded"
                );
            }
        }
        // Eigenvalues live in the closure of the prediction.
        let closure = w.closure();
        for entry in &sd.eigs {
            assert!(
                closure.distance(entry.value) <= 1e-9,
                "eigenvalue {} outside the closed range",
                entry.value
            );
        }
        // Degenerate constants force the closure onto the whole line.
        if sd.constants.mu_plus == 0.0 && sd.constants.mu_minus == 0.0 {
            assert_eq!(closure, RealSet::full());
        }
    }
}

#[test]
fn predictions_are_congruence_invariant() {
    let ops = corpus(&[2, 3, 4], 1, 163);
    let mut rng = ChaCha8Rng::seed_from_u64(2163);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let w = predict_w(op, &sd, false).unwrap();
        let wco = predict_wco(op, &sd, false).unwrap();
        let s = loop {
            let cand = random_matrix(&mut rng, op.dim(), op.dim());
            if kreinrange::linalg::condition_number(&cand) <= 20.0 {
                break cand;
            }
        };
        let moved = op.congruence_transform(&s).unwrap();
        let sd2 = compute_spectrum(&moved).unwrap();
        let w2 = predict_w(&moved, &sd2, false).unwrap();
        let wco2 = predict_wco(&moved, &sd2, false).unwrap();
        assert!(w.eq_approx(&w2, 1e-7), "W changed under congruence:\n{w}\n{w2}");
        assert!(
            wco.eq_approx(&wco2, 1e-7),
            "W_co changed under congruence:\n{wco}\n{wco2}"
        );
    }
}

#[test]
fn inner_interval_lies_in_both_ranges_when_range_not_negative() {
    let ops = corpus(&[2, 3, 4, 5], 1, 167);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        if sd.rank == 0 || sd.range_class == SubspaceClass::Negative {
            continue;
        }
        let c = &sd.constants;
        if !c.mu_plus.is_finite() || c.mu_plus >= c.nu_plus {
            continue;
        }
        let inner = RealSet::interval(c.mu_plus, c.nu_plus, false, false);
        let both = predict_w(op, &sd, false)
            .unwrap()
            .intersect(&predict_wco(op, &sd, false).unwrap());
        assert!(
            inner.intersect(&both).eq_approx(&inner, 1e-12),
            "inner interval escapes the intersection"
        );
    }
}

#[test]
fn classify_subspace_is_basis_independent() {
    let ops = corpus(&[3, 4, 5], 1, 173);
    let mut rng = ChaCha8Rng::seed_from_u64(2173);
    for op in &ops {
        let sd = compute_spectrum(op).unwrap();
        let basis = &sd.zero.ker2_basis;
        if basis.len() < 2 {
            continue;
        }
        let space = op.space();
        let class = space.classify_subspace(basis).unwrap();
        // Re-mix the basis by a random invertible coefficient matrix.
        for _ in 0..5 {
            let k = basis.len();
            let coeffs = loop {
                let cand = random_matrix(&mut rng, k, k);
                if kreinrange::linalg::condition_number(&cand) <= 50.0 {
                    break cand;
                }
            };
            let mixed: Vec<CVector> = (0..k)
                .map(|j| {
                    let mut v = CVector::zeros(op.dim());
                    for (i, b) in basis.iter().enumerate() {
                        v += b * coeffs[(i, j)];
                    }
                    v
                })
                .collect();
            assert_eq!(space.classify_subspace(&mixed).unwrap(), class);
        }
    }
}

//! Closed-form predictions of the numerical range `W(A)` and the
//! co-numerical range `W_co(A)`, plus the oracles that check them.
//!
//! Predictions branch on the class of `ker A` (for `W`) and of `ran A`
//! (for `W_co`). In finite dimension every finite endpoint other than zero
//! is an eigenvalue and therefore attained; the memberships at zero follow
//! the endpoint rules exactly. The oracles never look at the spectrum: they
//! only evaluate the defining quotients on sampled vectors and run a local
//! optimizer over the admissible cones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::linalg::{cx, hermitize, random_unit_vector, CMatrix, CVector};
use crate::operator::KreinOperator;
use crate::realset::{Interval, RealSet};
use crate::space::SubspaceClass;
use crate::spectral::SpectralData;
use crate::tol::{MAX_STRATIFICATION, SAMPLE_NEUTRAL_REJECT, TAU_NEUTRAL};

/// Which range is being predicted or sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeKind {
    W,
    Wco,
}

/// Endpoint requests: the inner endpoints of the two unbounded pieces of
/// `W`, or the outer endpoints of the bounded `W_co`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointSide {
    /// `inf (W intersect [0, inf))`.
    PosMin,
    /// `sup (W intersect (-inf, 0])`.
    NegMax,
    /// `min W_co`.
    Min,
    /// `max W_co`.
    Max,
}

/// Whether the instance falls outside the indefinite, nonzero hypotheses of
/// the closed-form characterizations (the predictions then fall back to
/// classical Hilbert-space behavior and reports carry this flag).
pub fn outside_theorem(op: &KreinOperator, sd: &SpectralData) -> bool {
    !op.space().is_indefinite() || sd.rank == 0
}

/// `[Ax, x] / [x, x]`.
pub fn w_value(op: &KreinOperator, x: &CVector) -> Result<f64> {
    let denom = op.space().self_inner(x)?;
    let cut = TAU_NEUTRAL * x.norm_squared() * op.space().gram_norm();
    if denom.abs() <= cut {
        return Err(KreinError::NeutralVector);
    }
    Ok(op.form(x) / denom)
}

/// `[Ax, Ax] / [Ax, x]`.
pub fn wco_value(op: &KreinOperator, x: &CVector) -> Result<f64> {
    let ax = op.apply(x);
    let space = op.space();
    if space.j_norm_vec(&ax) <= 1e-12 * op.j_norm() * space.j_norm_vec(x) {
        return Err(KreinError::KernelVector);
    }
    let num = space.self_inner(&ax)?;
    let denom = op.form(x);
    Ok(num / denom)
}

/// Closed-form `W(A)`.
///
/// In strict mode the theorem hypotheses are enforced; otherwise the zero
/// operator yields `{0}` and a definite space yields the classical convex
/// hull of the spectrum.
pub fn predict_w(op: &KreinOperator, sd: &SpectralData, strict: bool) -> Result<RealSet> {
    if sd.rank == 0 {
        if strict {
            return Err(KreinError::ZeroOperator);
        }
        return Ok(RealSet::point(0.0));
    }
    if !op.space().is_indefinite() {
        if strict {
            return Err(KreinError::DefiniteSpace);
        }
        let lo = sd.min_eigenvalue().expect("nonempty spectrum");
        let hi = sd.max_eigenvalue().expect("nonempty spectrum");
        return Ok(RealSet::interval(lo, hi, true, true));
    }
    let c = &sd.constants;
    Ok(match sd.zero.kernel_class {
        SubspaceClass::Zero => RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, c.mu_minus, false, true),
            Interval::new(c.mu_plus, f64::INFINITY, true, false),
        ]),
        SubspaceClass::Positive => RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, c.mu_minus, false, true),
            Interval::new(0.0, f64::INFINITY, true, false),
        ]),
        SubspaceClass::Negative => RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, 0.0, false, true),
            Interval::new(c.mu_plus, f64::INFINITY, true, false),
        ]),
        SubspaceClass::Neutral => {
            RealSet::from_parts(
                vec![Interval::new(f64::NEG_INFINITY, f64::INFINITY, false, false)],
                vec![0.0],
            )
        }
        _ => RealSet::full(),
    })
}

/// Closed-form `W_co(A)`.
pub fn predict_wco(op: &KreinOperator, sd: &SpectralData, strict: bool) -> Result<RealSet> {
    if sd.rank == 0 {
        if strict {
            return Err(KreinError::ZeroOperator);
        }
        return Ok(RealSet::empty());
    }
    if strict && !op.space().is_indefinite() {
        return Err(KreinError::DefiniteSpace);
    }
    let c = &sd.constants;
    Ok(match sd.range_class {
        SubspaceClass::Zero => RealSet::empty(),
        SubspaceClass::Negative => RealSet::interval(c.nu_minus, c.mu_minus, true, true),
        SubspaceClass::Positive => RealSet::interval(c.mu_plus, c.nu_plus, true, true),
        // Not definite: the interval between the outer constants; zero is a
        // member by the endpoint rule, and any finite nonzero endpoint is an
        // eigenvalue, so the interval closes on both sides.
        _ => RealSet::interval(c.nu_minus, c.nu_plus, true, true),
    })
}

/// One rejected-or-accepted sample value that landed outside the prediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub value: f64,
    pub distance: f64,
    /// Interleaved re/im coordinates of the witness vector.
    pub vector: Vec<f64>,
}

/// Outcome of a sampling run against a prediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeReport {
    pub predicted: RealSet,
    pub samples: Vec<f64>,
    pub violations: Vec<Violation>,
    pub rejected: usize,
}

impl RangeReport {
    pub fn min_sample(&self) -> Option<f64> {
        self.samples.iter().copied().reduce(f64::min)
    }

    pub fn max_sample(&self) -> Option<f64> {
        self.samples.iter().copied().reduce(f64::max)
    }
}

fn flatten(x: &CVector) -> Vec<f64> {
    x.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Draw admissible vectors, evaluate the requested quotient, and compare
/// every value against the prediction at tolerance `1e-8`.
///
/// Strategy (a) samples uniform directions with rejection of near-neutral or
/// near-kernel vectors; strategy (b) walks the hyperbolic strata
/// `x = cosh(s) x_+ + sinh(s) x_-` of the fundamental decomposition so the
/// relative-neutrality region (where `|W|` blows up) is reached.
pub fn sample_range(
    op: &KreinOperator,
    sd: &SpectralData,
    which: RangeKind,
    n: usize,
    seed: u64,
) -> Result<RangeReport> {
    let predicted = match which {
        RangeKind::W => predict_w(op, sd, false)?,
        RangeKind::Wco => predict_wco(op, sd, false)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7361_6d70_6c65_0000);
    let dim = op.dim();
    let space = op.space();
    let (n_plus, n_minus) = space.inertia();
    let stratify = n_plus > 0 && n_minus > 0;

    let mut samples = Vec::with_capacity(n);
    let mut violations = Vec::new();
    let mut rejected = 0usize;
    let mut attempts = 0usize;
    let budget = 50 * n.max(1);

    while samples.len() < n && attempts < budget {
        attempts += 1;
        let use_strata = stratify && attempts % 2 == 0;
        let x = if use_strata {
            let s_param = rng.gen_range(0.0..MAX_STRATIFICATION);
            let u = random_unit_vector(&mut rng, n_plus);
            let v = random_unit_vector(&mut rng, n_minus);
            let (cu, cv) = if rng.gen_bool(0.5) {
                (s_param.cosh(), s_param.sinh())
            } else {
                (s_param.sinh(), s_param.cosh())
            };
            let mut coords = CVector::zeros(dim);
            for i in 0..n_plus {
                coords[i] = u[i] * cx(cu, 0.0);
            }
            for i in 0..n_minus {
                coords[n_plus + i] = v[i] * cx(cv, 0.0);
            }
            space.canon() * coords
        } else {
            random_unit_vector(&mut rng, dim)
        };

        let value = match which {
            RangeKind::W => {
                let denom = space.self_inner(&x)?;
                if denom.abs() <= SAMPLE_NEUTRAL_REJECT * x.norm_squared() * space.gram_norm() {
                    rejected += 1;
                    continue;
                }
                op.form(&x) / denom
            }
            RangeKind::Wco => {
                let ax = op.apply(&x);
                if space.j_norm_vec(&ax)
                    <= SAMPLE_NEUTRAL_REJECT * op.j_norm().max(1e-300) * space.j_norm_vec(&x)
                {
                    rejected += 1;
                    continue;
                }
                space.self_inner(&ax)? / op.form(&x)
            }
        };
        if !predicted.membership_tol(value, 1e-8) {
            violations.push(Violation {
                value,
                distance: predicted.distance(value),
                vector: flatten(&x),
            });
        }
        samples.push(value);
    }

    Ok(RangeReport {
        predicted,
        samples,
        violations,
        rejected,
    })
}

/// Ratio-of-quadratics minimizer with exact line searches.
///
/// Minimizes `r(x) = (x^* N x) / (x^* D x)` over the cone `x^* D x > 0`,
/// where `N`, `D` are Hermitian. Steepest-descent directions are polished by
/// solving the one-dimensional restriction (a ratio of two real quadratics
/// in the step) in closed form, subject to a feasibility margin on the
/// denominator.
struct RatioProblem<'a> {
    num: &'a CMatrix,
    den: &'a CMatrix,
    den_margin: f64,
    den_norm: f64,
}

impl RatioProblem<'_> {
    fn den_value(&self, x: &CVector) -> f64 {
        (x.adjoint() * self.den * x)[(0, 0)].re
    }

    fn num_value(&self, x: &CVector) -> f64 {
        (x.adjoint() * self.num * x)[(0, 0)].re
    }

    fn feasible(&self, x: &CVector) -> bool {
        self.den_value(x) > self.den_margin * x.norm_squared() * self.den_norm
    }

    fn value(&self, x: &CVector) -> f64 {
        self.num_value(x) / self.den_value(x)
    }

    /// Exact minimization of the quotient along the line `x + eta * d`:
    /// the restriction is a ratio of two real quadratics in `eta`, so the
    /// stationary steps solve a quadratic. Returns the best feasible point.
    ///
    /// `r(eta) = (a0 + 2 a1 eta + a2 eta^2) / (b0 + 2 b1 eta + b2 eta^2)`
    fn line_min(&self, x: &CVector, d: &CVector) -> Option<(f64, CVector)> {
        let nx = self.num * x;
        let dx = self.den * x;
        let nd = self.num * d;
        let dd = self.den * d;
        let a0 = (x.adjoint() * &nx)[(0, 0)].re;
        let a1 = (d.adjoint() * &nx)[(0, 0)].re;
        let a2 = (d.adjoint() * &nd)[(0, 0)].re;
        let b0 = (x.adjoint() * &dx)[(0, 0)].re;
        let b1 = (d.adjoint() * &dx)[(0, 0)].re;
        let b2 = (d.adjoint() * &dd)[(0, 0)].re;

        // Stationary steps: (a1 + a2 eta)(b0 + 2 b1 eta + b2 eta^2)
        //                 = (a0 + 2 a1 eta + a2 eta^2)(b1 + b2 eta)
        // which collapses to alpha eta^2 + beta eta + gamma = 0.
        let alpha = a2 * b1 - a1 * b2;
        let beta = a2 * b0 - a0 * b2;
        let gamma = a1 * b0 - a0 * b1;
        let mut candidates: Vec<f64> = Vec::with_capacity(4);
        if alpha.abs() > 1e-300 {
            let disc = beta * beta - 4.0 * alpha * gamma;
            if disc >= 0.0 {
                let root = disc.sqrt();
                candidates.push((-beta + root) / (2.0 * alpha));
                candidates.push((-beta - root) / (2.0 * alpha));
            }
        } else if beta.abs() > 1e-300 {
            candidates.push(-gamma / beta);
        }
        // The infimum may sit at infinity along an escape direction; a large
        // finite step is then the best available move.
        candidates.push(1e9);
        candidates.push(-1e9);

        let mut best: Option<(f64, CVector)> = None;
        for eta in candidates {
            if !eta.is_finite() {
                continue;
            }
            let y = x + d * cx(eta, 0.0);
            let norm = y.norm();
            if norm < 1e-12 {
                continue;
            }
            let y = y / cx(norm, 0.0);
            if !self.feasible(&y) {
                continue;
            }
            let v = self.value(&y);
            if v.is_finite() && best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                best = Some((v, y));
            }
        }
        best
    }

    /// Steepest-descent direction of the quotient at `x` (up to scale), or
    /// `None` at a stationary point.
    fn gradient_direction(&self, x: &CVector) -> Option<CVector> {
        let nx = self.num * x;
        let dx = self.den * x;
        let den = (x.adjoint() * &dx)[(0, 0)].re;
        let num = (x.adjoint() * &nx)[(0, 0)].re;
        let r = num / den;
        let g = &nx - &dx * cx(r, 0.0);
        let gnorm = g.norm();
        if gnorm <= 1e-16 * (nx.norm() + dx.norm()).max(1e-300) {
            return None;
        }
        Some(-g / cx(gnorm, 0.0))
    }

    /// Multistart descent: exact line searches along the gradient, plus a
    /// momentum search along the previous displacement. The momentum pass
    /// restores fast convergence through clustered spectra, where plain
    /// steepest descent stalls at a rate of one minus the eigenvalue gap.
    fn minimize(&self, starts: &[CVector], max_iter: usize) -> Option<f64> {
        let mut best: Option<f64> = None;
        for start in starts {
            if !self.feasible(start) {
                continue;
            }
            let mut x = start.clone() / cx(start.norm(), 0.0);
            let mut value = self.value(&x);
            let mut previous: Option<CVector> = None;
            let mut stalls = 0;
            for _ in 0..max_iter {
                let anchor = x.clone();
                let value_before = value;
                let mut improved = false;
                if let Some(d) = self.gradient_direction(&x) {
                    if let Some((v, y)) = self.line_min(&x, &d) {
                        if v < value {
                            x = y;
                            value = v;
                            improved = true;
                        }
                    }
                }
                if let Some(p) = &previous {
                    let dir = &x - p;
                    if dir.norm() > 1e-14 {
                        if let Some((v, y)) = self.line_min(&x, &dir) {
                            if v < value {
                                x = y;
                                value = v;
                                improved = true;
                            }
                        }
                    }
                }
                previous = Some(anchor);
                if !improved {
                    break;
                }
                if value_before - value <= 1e-16 * (1.0 + value.abs()) {
                    stalls += 1;
                    if stalls >= 6 {
                        break;
                    }
                } else {
                    stalls = 0;
                }
            }
            if value.is_finite() && best.map_or(true, |b| value < b) {
                best = Some(value);
            }
        }
        best
    }
}

/// Collect feasible starting vectors from a draw strategy, keeping the best
/// few of a sampling pre-pass as extra starts. The draw must produce
/// feasible vectors at least generically; thin cones are handled by the
/// cone-aware draws below, never by plain rejection.
fn gather_starts(
    problem: &RatioProblem<'_>,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> CVector,
    seed: u64,
    count: usize,
) -> Vec<CVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x656e_6470_6f69_6e74);
    let mut starts = Vec::with_capacity(count + 4);
    let mut ranked: Vec<(f64, CVector)> = Vec::new();
    let mut attempts = 0;
    while starts.len() < count && attempts < 200 * count {
        attempts += 1;
        let x = draw(&mut rng);
        if problem.feasible(&x) {
            let v = problem.value(&x);
            if v.is_finite() {
                ranked.push((v, x.clone()));
            }
            starts.push(x);
        }
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, x) in ranked.into_iter().take(4) {
        starts.push(x);
    }
    starts
}

/// Draw inside the requested sign cone through the canonical decomposition:
/// `x = S (u (+) t v)` has `[x, x] = |u|^2 - t^2 |v|^2 > 0` for `t < 1`, and
/// the mirrored mix lands in the negative cone.
fn cone_draw<'a>(
    op: &'a KreinOperator,
    positive: bool,
) -> impl FnMut(&mut ChaCha8Rng) -> CVector + 'a {
    let (n_plus, n_minus) = op.space().inertia();
    let dim = op.dim();
    move |rng| {
        let t = rng.gen_range(0.0..0.95);
        let mut coords = CVector::zeros(dim);
        let (major, minor) = if positive { (1.0, t) } else { (t, 1.0) };
        if n_plus > 0 {
            let u = random_unit_vector(rng, n_plus);
            for i in 0..n_plus {
                coords[i] = u[i] * cx(major, 0.0);
            }
        }
        if n_minus > 0 {
            let v = random_unit_vector(rng, n_minus);
            for i in 0..n_minus {
                coords[n_plus + i] = v[i] * cx(minor, 0.0);
            }
        }
        op.space().canon() * coords
    }
}

/// Draw inside the range of the witness, where its quadratic form is
/// bounded below by the smallest positive eigenvalue.
fn witness_range_draw<'a>(op: &'a KreinOperator) -> impl FnMut(&mut ChaCha8Rng) -> CVector + 'a {
    let dim = op.dim();
    move |rng| {
        let y = random_unit_vector(rng, dim);
        let mut x = op.witness() * y;
        let norm = x.norm();
        if norm > 1e-12 * op.witness_norm().max(1e-300) {
            x /= cx(norm, 0.0);
            x
        } else {
            random_unit_vector(rng, dim)
        }
    }
}

/// Refine an endpoint of the requested range piece by multistart descent on
/// the defining quotient. Returns a value within optimization tolerance of
/// the true endpoint; the piece must be non-empty per the prediction.
pub fn estimate_endpoint(
    op: &KreinOperator,
    sd: &SpectralData,
    which: RangeKind,
    side: EndpointSide,
) -> Result<f64> {
    let space = op.space();
    let dim = op.dim();
    let (n_plus, n_minus) = space.inertia();
    let seed = 0x5eed ^ ((dim as u64) << 8);
    let starts_count = 8 + 2 * dim;
    let max_iter = 500;

    match (which, side) {
        (RangeKind::W, EndpointSide::PosMin) | (RangeKind::W, EndpointSide::NegMax) => {
            let predicted = predict_w(op, sd, false)?;
            let positive_side = side == EndpointSide::PosMin;
            let piece = if positive_side {
                predicted.intersect(&RealSet::interval(0.0, f64::INFINITY, true, false))
            } else {
                predicted.intersect(&RealSet::interval(f64::NEG_INFINITY, 0.0, false, true))
            };
            if piece.is_empty() {
                return Err(KreinError::EmptyPiece);
            }
            // The cone [x,x] > 0 carries W intersect [0, inf); the opposite
            // cone carries the non-positive piece. An empty cone can only
            // happen in a definite space where the piece is {0}, attained on
            // the kernel.
            let cone_empty = if positive_side { n_plus == 0 } else { n_minus == 0 };
            if cone_empty {
                return if !sd.zero.ker_basis.is_empty() && piece.membership_tol(0.0, 1e-12) {
                    Ok(w_value(op, &sd.zero.ker_basis[0])?)
                } else {
                    Err(KreinError::EmptyPiece)
                };
            }
            let den_owned;
            let den = if positive_side {
                space.gram()
            } else {
                den_owned = space.gram().map(|z| -z);
                &den_owned
            };
            // The quotient diverges at the cone boundary, so interior
            // minima are safe under a thin margin; a thin margin is also
            // what lets the iterates chase an unattained infimum at zero
            // along near-neutral directions.
            let problem = RatioProblem {
                num: op.witness(),
                den,
                den_margin: 1e-9,
                den_norm: space.gram_norm(),
            };
            let starts = gather_starts(
                &problem,
                cone_draw(op, positive_side),
                seed,
                starts_count,
            );
            let best = problem
                .minimize(&starts, max_iter)
                .ok_or(KreinError::EmptyPiece)?;
            // On the negative cone the quotient value is the negated ratio.
            Ok(if positive_side { best } else { -best })
        }
        (RangeKind::Wco, EndpointSide::Min) | (RangeKind::Wco, EndpointSide::Max) => {
            let predicted = predict_wco(op, sd, false)?;
            if predicted.is_empty() {
                return Err(KreinError::EmptyPiece);
            }
            let q = hermitize(&(op.matrix().adjoint() * space.gram() * op.matrix()));
            let negated;
            let num = if side == EndpointSide::Min {
                &q
            } else {
                negated = q.map(|z| -z);
                &negated
            };
            // Near the kernel the evaluated quotient carries roundoff of
            // order eps over the margin, which would fake values beyond the
            // true extremum; the extrema of this range are attained well
            // inside the cone, so a wide margin costs nothing.
            let problem = RatioProblem {
                num,
                den: op.witness(),
                den_margin: 1e-6,
                den_norm: op.witness_norm(),
            };
            let starts = gather_starts(&problem, witness_range_draw(op), seed, starts_count);
            let best = problem
                .minimize(&starts, max_iter)
                .ok_or(KreinError::EmptyPiece)?;
            Ok(if side == EndpointSide::Min { best } else { -best })
        }
        _ => Err(KreinError::InvalidInput(format!(
            "endpoint side {side:?} does not apply to {which:?}"
        ))),
    }
}

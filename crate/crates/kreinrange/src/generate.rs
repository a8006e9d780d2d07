//! Seeded generation of non-negative operators with prescribed kernel and
//! range classes.
//!
//! Every achievable pair of classes is realized by a block-diagonal model in
//! canonical coordinates and then hidden behind a random congruence:
//! one-dimensional eigenblocks `(g, a) = (+1, lambda>0)` or `(-1, lambda<0)`,
//! one-dimensional kernel blocks `(+/-1, 0)`, and the two-dimensional
//! nilpotent block `g = [[0,1],[1,0]]`, `a = [[0,1],[0,0]]` for each neutral
//! Jordan chain at zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KreinError, Result};
use crate::linalg::{condition_number, cx, hermitize, random_matrix, CMatrix};
use crate::operator::{build_operator, clip_psd, KreinOperator};
use crate::space::{build_space, SubspaceClass};

/// Block inventory realizing a (kernel, range) class pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Blocks {
    jordan: usize,
    ker_pos: usize,
    ker_neg: usize,
    eig_pos: usize,
    eig_neg: usize,
}

impl Blocks {
    fn dim(&self) -> usize {
        2 * self.jordan + self.ker_pos + self.ker_neg + self.eig_pos + self.eig_neg
    }
}

fn kernel_requirements(class: SubspaceClass) -> (usize, usize, usize) {
    // (jordan_min, ker_pos_min, ker_neg_min)
    match class {
        SubspaceClass::Zero => (0, 0, 0),
        SubspaceClass::Positive => (0, 1, 0),
        SubspaceClass::Negative => (0, 0, 1),
        SubspaceClass::Neutral => (1, 0, 0),
        SubspaceClass::NonNegDegenerate => (1, 1, 0),
        SubspaceClass::NonPosDegenerate => (1, 0, 1),
        SubspaceClass::Indefinite => (0, 1, 1),
    }
}

fn range_requirements(class: SubspaceClass) -> (usize, usize, usize) {
    // (jordan_min, eig_pos_min, eig_neg_min)
    match class {
        SubspaceClass::Zero => (0, 0, 0),
        SubspaceClass::Positive => (0, 1, 0),
        SubspaceClass::Negative => (0, 0, 1),
        SubspaceClass::Neutral => (1, 0, 0),
        SubspaceClass::NonNegDegenerate => (1, 1, 0),
        SubspaceClass::NonPosDegenerate => (1, 0, 1),
        SubspaceClass::Indefinite => (0, 1, 1),
    }
}

fn jordan_allowed(kernel: SubspaceClass, range: SubspaceClass) -> bool {
    let kernel_ok = matches!(
        kernel,
        SubspaceClass::Neutral
            | SubspaceClass::NonNegDegenerate
            | SubspaceClass::NonPosDegenerate
            | SubspaceClass::Indefinite
    );
    let range_ok = matches!(
        range,
        SubspaceClass::Neutral
            | SubspaceClass::NonNegDegenerate
            | SubspaceClass::NonPosDegenerate
            | SubspaceClass::Indefinite
    );
    kernel_ok && range_ok
}

/// Minimal block inventory for a class pair, or `None` when the combination
/// is structurally impossible at any dimension.
fn minimal_blocks(kernel: SubspaceClass, range: SubspaceClass) -> Option<Blocks> {
    let (kj, kp, kn) = kernel_requirements(kernel);
    let (rj, ep, en) = range_requirements(range);
    let jordan = kj.max(rj);
    if jordan > 0 && !jordan_allowed(kernel, range) {
        return None;
    }
    // A Jordan block plants neutral vectors in both the kernel and the range;
    // classes without a neutral part cannot absorb them.
    if kj > 0 && matches!(range, SubspaceClass::Zero | SubspaceClass::Positive | SubspaceClass::Negative) {
        return None;
    }
    if rj > 0
        && matches!(
            kernel,
            SubspaceClass::Zero | SubspaceClass::Positive | SubspaceClass::Negative
        )
    {
        return None;
    }
    // range Zero means A = 0, so the kernel is the whole space; an invertible
    // Gram matrix leaves no room for a degenerate or neutral total space.
    if range == SubspaceClass::Zero
        && !matches!(
            kernel,
            SubspaceClass::Positive | SubspaceClass::Negative | SubspaceClass::Indefinite
        )
    {
        return None;
    }
    // kernel Zero means ran A is the whole space, which cannot be degenerate.
    if kernel == SubspaceClass::Zero
        && !matches!(
            range,
            SubspaceClass::Positive | SubspaceClass::Negative | SubspaceClass::Indefinite
        )
    {
        return None;
    }
    if range == SubspaceClass::Zero && (ep > 0 || en > 0 || jordan > 0) {
        return None;
    }
    Some(Blocks {
        jordan,
        ker_pos: kp,
        ker_neg: kn,
        eig_pos: if range == SubspaceClass::Zero { 0 } else { ep },
        eig_neg: if range == SubspaceClass::Zero { 0 } else { en },
    })
}

/// Filler block kinds that keep both classes intact.
fn fillers(kernel: SubspaceClass, range: SubspaceClass) -> Vec<(usize, fn(&mut Blocks))> {
    let mut out: Vec<(usize, fn(&mut Blocks))> = Vec::new();
    if jordan_allowed(kernel, range) {
        out.push((2, |b| b.jordan += 1));
    }
    if matches!(
        kernel,
        SubspaceClass::Positive | SubspaceClass::NonNegDegenerate | SubspaceClass::Indefinite
    ) {
        out.push((1, |b| b.ker_pos += 1));
    }
    if matches!(
        kernel,
        SubspaceClass::Negative | SubspaceClass::NonPosDegenerate | SubspaceClass::Indefinite
    ) {
        out.push((1, |b| b.ker_neg += 1));
    }
    if range != SubspaceClass::Zero {
        if matches!(
            range,
            SubspaceClass::Positive | SubspaceClass::NonNegDegenerate | SubspaceClass::Indefinite
        ) {
            out.push((1, |b| b.eig_pos += 1));
        }
        if matches!(
            range,
            SubspaceClass::Negative | SubspaceClass::NonPosDegenerate | SubspaceClass::Indefinite
        ) {
            out.push((1, |b| b.eig_neg += 1));
        }
    }
    out
}

/// Whether the class pair is realizable at the given dimension.
pub fn achievable(dim: usize, kernel: SubspaceClass, range: SubspaceClass) -> bool {
    let Some(min) = minimal_blocks(kernel, range) else {
        return false;
    };
    if kernel == SubspaceClass::Zero && range == SubspaceClass::Zero {
        return false;
    }
    let base = min.dim();
    if base == 0 {
        // Only Zero/Zero reaches here, which is excluded above.
        return false;
    }
    if dim < base {
        return false;
    }
    let rest = dim - base;
    if rest == 0 {
        return true;
    }
    let kinds = fillers(kernel, range);
    if kinds.iter().any(|&(sz, _)| sz == 1) {
        return true;
    }
    if kinds.iter().any(|&(sz, _)| sz == 2) {
        return rest % 2 == 0;
    }
    false
}

/// All achievable class pairs at a dimension, in a fixed enumeration order.
pub fn achievable_combos(dim: usize) -> Vec<(SubspaceClass, SubspaceClass)> {
    const ALL: [SubspaceClass; 7] = [
        SubspaceClass::Zero,
        SubspaceClass::Positive,
        SubspaceClass::Negative,
        SubspaceClass::Neutral,
        SubspaceClass::NonNegDegenerate,
        SubspaceClass::NonPosDegenerate,
        SubspaceClass::Indefinite,
    ];
    let mut out = Vec::new();
    for kernel in ALL {
        for range in ALL {
            if achievable(dim, kernel, range) {
                out.push((kernel, range));
            }
        }
    }
    out
}

/// Distinct eigenvalue magnitudes, well separated so clustering stays
/// unambiguous; an occasional duplicate plants a genuine multiplicity.
fn draw_eigenvalues(rng: &mut ChaCha8Rng, count: usize, negative: bool) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..count).map(|_| rng.gen_range(0.3..3.0)).collect();
    vals.sort_by(f64::total_cmp);
    for i in 1..vals.len() {
        if vals[i] - vals[i - 1] < 1e-2 {
            vals[i] = vals[i - 1] + 1e-2;
        }
    }
    if vals.len() >= 2 && rng.gen_bool(0.25) {
        let i = rng.gen_range(1..vals.len());
        vals[i] = vals[i - 1];
    }
    if negative {
        vals.iter_mut().for_each(|v| *v = -*v);
    }
    vals
}

/// Build the canonical-coordinates model pair `(G0, A0)` for an inventory.
fn assemble(rng: &mut ChaCha8Rng, blocks: &Blocks) -> (CMatrix, CMatrix) {
    let dim = blocks.dim();
    let mut g = CMatrix::zeros(dim, dim);
    let mut a = CMatrix::zeros(dim, dim);
    let mut at = 0usize;
    for _ in 0..blocks.jordan {
        g[(at, at + 1)] = cx(1.0, 0.0);
        g[(at + 1, at)] = cx(1.0, 0.0);
        a[(at, at + 1)] = cx(1.0, 0.0);
        at += 2;
    }
    for _ in 0..blocks.ker_pos {
        g[(at, at)] = cx(1.0, 0.0);
        at += 1;
    }
    for _ in 0..blocks.ker_neg {
        g[(at, at)] = cx(-1.0, 0.0);
        at += 1;
    }
    for lam in draw_eigenvalues(rng, blocks.eig_pos, false) {
        g[(at, at)] = cx(1.0, 0.0);
        a[(at, at)] = cx(lam, 0.0);
        at += 1;
    }
    for lam in draw_eigenvalues(rng, blocks.eig_neg, true) {
        g[(at, at)] = cx(-1.0, 0.0);
        a[(at, at)] = cx(lam, 0.0);
        at += 1;
    }
    debug_assert_eq!(at, dim);
    (g, a)
}

/// Deterministic generation of an operator whose kernel and range classify
/// as requested.
pub fn generate_case(
    dim: usize,
    kernel: SubspaceClass,
    range: SubspaceClass,
    seed: u64,
) -> Result<KreinOperator> {
    if dim == 0 {
        return Err(KreinError::InvalidInput("dimension must be positive".into()));
    }
    if !achievable(dim, kernel, range) {
        return Err(KreinError::Unachievable(format!(
            "kernel {kernel} with range {range} at dimension {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b72_6569_6e00_0000);
    let mut blocks = minimal_blocks(kernel, range).expect("achievable implies a minimal model");
    let mut rest = dim - blocks.dim();
    let kinds = fillers(kernel, range);
    while rest > 0 {
        let feasible: Vec<&(usize, fn(&mut Blocks))> =
            kinds.iter().filter(|&&(sz, _)| sz <= rest).collect();
        let pick = feasible[rng.gen_range(0..feasible.len())];
        pick.1(&mut blocks);
        rest -= pick.0;
    }

    let (g0, a0) = assemble(&mut rng, &blocks);
    let p0 = &g0 * &a0;

    // Hide the model behind a modest congruence; a tight condition cap keeps
    // the 1e-8 sampling tolerances honest downstream.
    let s = loop {
        let cand = random_matrix(&mut rng, dim, dim);
        if condition_number(&cand) <= 30.0 {
            break cand;
        }
    };
    let gram = hermitize(&(s.adjoint() * &g0 * &s));
    let witness = clip_psd(&hermitize(&(s.adjoint() * &p0 * &s)));
    let space = build_space(gram)?;
    let a = space.solve_gram(&witness);
    build_operator(space, a)
}

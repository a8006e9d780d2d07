//! Tolerance policy.
//!
//! All thresholds are relative to a norm of the data so the library behaves
//! the same under rescaling.

/// Relative neutrality threshold: `|[x,x]| <= TAU_NEUTRAL * |x|^2 * |G|`
/// classifies a vector as neutral.
pub const TAU_NEUTRAL: f64 = 1e-10;

/// Relative positive-semidefiniteness slack for the witness `P = G*A`.
pub const TAU_PSD: f64 = 1e-10;

/// Hermitian-asymmetry slack, relative to the matrix norm.
pub const TAU_HERM: f64 = 1e-10;

/// Condition-number cap for congruence transforms.
pub const COND_CAP: f64 = 1e8;

/// Eigenvalue clustering scale; the actual tolerance is
/// `TAU_CLUSTER_REL * max(1, |A|_J)`.
pub const TAU_CLUSTER_REL: f64 = 1e-7;

/// Rejection threshold for near-neutral vectors while sampling.
pub const SAMPLE_NEUTRAL_REJECT: f64 = 1e-8;

/// Upper bound for the hyperbolic stratification parameter.
pub const MAX_STRATIFICATION: f64 = 10.0;

/// Tunable tolerances threaded through construction and analysis.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Multiplier in the rank cut `rank_factor * eps * dim * sigma_max`.
    pub rank_factor: f64,
    /// Relative PSD slack for validation.
    pub psd_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_factor: 64.0,
            psd_rel: TAU_PSD,
        }
    }
}

impl Tolerances {
    /// Rank cut for a matrix of the given dimension and largest singular value.
    pub fn rank_cut(&self, dim: usize, sigma_max: f64) -> f64 {
        self.rank_factor * f64::EPSILON * dim as f64 * sigma_max
    }
}

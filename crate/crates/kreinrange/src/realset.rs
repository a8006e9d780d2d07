//! Finite unions of extended-real intervals with punctured points.
//!
//! The canonical form keeps maximal closure-connected components and records
//! interior points removed from them as punctures, so `(-inf,0) U (0,inf)`
//! and "the reals without zero" normalize to the same value.

use serde::{Deserialize, Serialize};

/// Extended real endpoint; serialized as a JSON number when finite and as
/// the strings `"inf"` / `"-inf"` otherwise (JSON has no infinities).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(ExtReal)
                .ok_or_else(|| D::Error::custom("endpoint out of range")),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" | "+inf" => Ok(ExtReal(f64::INFINITY)),
                "-inf" => Ok(ExtReal(f64::NEG_INFINITY)),
                other => Err(D::Error::custom(format!("bad endpoint {other:?}"))),
            },
            _ => Err(D::Error::custom("endpoint must be a number or inf string")),
        }
    }
}

fn fmt_endpoint(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// One extended-real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: ExtReal,
    pub hi: ExtReal,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Interval {
        Interval {
            lo: ExtReal(lo),
            hi: ExtReal(hi),
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    fn is_empty(&self) -> bool {
        let (lo, hi) = (self.lo.0, self.hi.0);
        lo > hi || (lo == hi && !(self.lo_closed && self.hi_closed)) || lo.is_nan() || hi.is_nan()
    }

    fn contains(&self, t: f64) -> bool {
        let lo_ok = t > self.lo.0 || (self.lo_closed && t == self.lo.0);
        let hi_ok = t < self.hi.0 || (self.hi_closed && t == self.hi.0);
        lo_ok && hi_ok
    }

    fn distance(&self, t: f64) -> f64 {
        if t < self.lo.0 {
            self.lo.0 - t
        } else if t > self.hi.0 {
            t - self.hi.0
        } else {
            0.0
        }
    }
}

/// Canonicalized union of intervals minus a finite puncture set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RealSet {
    intervals: Vec<Interval>,
    punctures: Vec<f64>,
}

impl RealSet {
    pub fn empty() -> RealSet {
        RealSet::default()
    }

    pub fn full() -> RealSet {
        RealSet::from_intervals(vec![Interval::new(
            f64::NEG_INFINITY,
            f64::INFINITY,
            false,
            false,
        )])
    }

    pub fn point(p: f64) -> RealSet {
        RealSet::from_intervals(vec![Interval::new(p, p, true, true)])
    }

    pub fn interval(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> RealSet {
        RealSet::from_intervals(vec![Interval::new(lo, hi, lo_closed, hi_closed)])
    }

    pub fn from_intervals(intervals: Vec<Interval>) -> RealSet {
        RealSet::from_parts(intervals, Vec::new())
    }

    pub fn from_parts(intervals: Vec<Interval>, punctures: Vec<f64>) -> RealSet {
        normalize(intervals, punctures)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn punctures(&self) -> &[f64] {
        &self.punctures
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn membership(&self, t: f64) -> bool {
        if self.punctures.contains(&t) {
            return false;
        }
        self.intervals.iter().any(|iv| iv.contains(t))
    }

    /// Distance from `t` to the closure of the set (`inf` when empty).
    pub fn distance(&self, t: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| iv.distance(t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership up to a tolerance on the closure, except that a value
    /// landing exactly on a puncture stays excluded.
    pub fn membership_tol(&self, t: f64, tol: f64) -> bool {
        if self.punctures.contains(&t) {
            return false;
        }
        self.distance(t) <= tol
    }

    /// Pure-interval pieces after splitting at punctures; used by the set
    /// operations and by the display form.
    fn pieces(&self) -> Vec<Interval> {
        let mut out = Vec::with_capacity(self.intervals.len() + self.punctures.len());
        for iv in &self.intervals {
            let inside: Vec<f64> = self
                .punctures
                .iter()
                .copied()
                .filter(|&p| iv.contains(p))
                .collect();
            let mut lo = iv.lo.0;
            let mut lo_closed = iv.lo_closed;
            for p in inside {
                out.push(Interval::new(lo, p, lo_closed, false));
                lo = p;
                lo_closed = false;
            }
            out.push(Interval::new(lo, iv.hi.0, lo_closed, iv.hi_closed));
        }
        out.retain(|iv| !iv.is_empty());
        out
    }

    pub fn union(&self, other: &RealSet) -> RealSet {
        let mut pieces = self.pieces();
        pieces.extend(other.pieces());
        normalize(pieces, Vec::new())
    }

    pub fn intersect(&self, other: &RealSet) -> RealSet {
        let mut pieces = Vec::new();
        for a in self.pieces() {
            for b in other.pieces() {
                let (lo, lo_closed) = if a.lo.0 > b.lo.0 {
                    (a.lo.0, a.lo_closed)
                } else if b.lo.0 > a.lo.0 {
                    (b.lo.0, b.lo_closed)
                } else {
                    (a.lo.0, a.lo_closed && b.lo_closed)
                };
                let (hi, hi_closed) = if a.hi.0 < b.hi.0 {
                    (a.hi.0, a.hi_closed)
                } else if b.hi.0 < a.hi.0 {
                    (b.hi.0, b.hi_closed)
                } else {
                    (a.hi.0, a.hi_closed && b.hi_closed)
                };
                let iv = Interval::new(lo, hi, lo_closed, hi_closed);
                if !iv.is_empty() {
                    pieces.push(iv);
                }
            }
        }
        normalize(pieces, Vec::new())
    }

    /// Close finite endpoints and drop punctures.
    pub fn closure(&self) -> RealSet {
        let intervals = self
            .intervals
            .iter()
            .map(|iv| Interval::new(iv.lo.0, iv.hi.0, true, true))
            .collect();
        normalize(intervals, Vec::new())
    }

    pub fn is_subset_of(&self, other: &RealSet) -> bool {
        self.intersect(other) == *self
    }

    /// Structural equality with endpoint slack: same shape, endpoints and
    /// punctures within `tol`.
    pub fn eq_approx(&self, other: &RealSet, tol: f64) -> bool {
        if self.intervals.len() != other.intervals.len()
            || self.punctures.len() != other.punctures.len()
        {
            return false;
        }
        let close = |a: f64, b: f64| {
            (a == b) || (a.is_finite() && b.is_finite() && (a - b).abs() <= tol)
        };
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|(a, b)| {
                close(a.lo.0, b.lo.0)
                    && close(a.hi.0, b.hi.0)
                    && a.lo_closed == b.lo_closed
                    && a.hi_closed == b.hi_closed
            })
            && self
                .punctures
                .iter()
                .zip(&other.punctures)
                .all(|(&a, &b)| close(a, b))
    }

    /// Finite endpoints of the puncture-split pieces, with their side.
    /// Used by endpoint-recovery checks.
    pub fn finite_edges(&self) -> Vec<(f64, EdgeSide)> {
        let mut out = Vec::new();
        for p in self.pieces() {
            if p.lo.0.is_finite() {
                out.push((p.lo.0, EdgeSide::Lower));
            }
            if p.hi.0.is_finite() {
                out.push((p.hi.0, EdgeSide::Upper));
            }
        }
        out
    }
}

/// Which side of a piece a finite edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSide {
    Lower,
    Upper,
}

fn normalize(intervals: Vec<Interval>, punctures: Vec<f64>) -> RealSet {
    // Split incoming punctures into the interval list first.
    let raw = RealSet {
        intervals: intervals.into_iter().filter(|iv| !iv.is_empty()).collect(),
        punctures,
    };
    let mut pieces = raw.pieces();
    pieces.sort_by(|a, b| {
        a.lo.0
            .total_cmp(&b.lo.0)
            .then_with(|| b.lo_closed.cmp(&a.lo_closed))
    });

    let mut merged: Vec<Interval> = Vec::new();
    let mut punctures: Vec<f64> = Vec::new();
    for piece in pieces {
        let Some(last) = merged.last_mut() else {
            merged.push(piece);
            continue;
        };
        if piece.lo.0 < last.hi.0
            || (piece.lo.0 == last.hi.0 && (piece.lo_closed || last.hi_closed))
        {
            // Overlap or touching with at least one closed side: merge.
            if piece.hi.0 > last.hi.0 || (piece.hi.0 == last.hi.0 && piece.hi_closed) {
                last.hi = piece.hi;
                last.hi_closed = piece.hi_closed;
            }
        } else if piece.lo.0 == last.hi.0 && !piece.lo_closed && !last.hi_closed {
            // Two open pieces kissing: a puncture in a single component.
            punctures.push(piece.lo.0);
            last.hi = piece.hi;
            last.hi_closed = piece.hi_closed;
        } else {
            merged.push(piece);
        }
    }
    punctures.sort_by(f64::total_cmp);
    punctures.dedup();
    RealSet {
        intervals: merged,
        punctures,
    }
}

impl std::fmt::Display for RealSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pieces = self.pieces();
        if pieces.is_empty() {
            return f.write_str("{}");
        }
        let rendered: Vec<String> = pieces
            .iter()
            .map(|iv| {
                if iv.lo.0 == iv.hi.0 {
                    format!("{{{}}}", fmt_endpoint(iv.lo.0))
                } else {
                    format!(
                        "{}{},{}{}",
                        if iv.lo_closed { '[' } else { '(' },
                        fmt_endpoint(iv.lo.0),
                        fmt_endpoint(iv.hi.0),
                        if iv.hi_closed { ']' } else { ')' },
                    )
                }
            })
            .collect();
        f.write_str(&rendered.join("∪"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reals_without_zero() -> RealSet {
        RealSet::from_parts(
            vec![Interval::new(f64::NEG_INFINITY, f64::INFINITY, false, false)],
            vec![0.0],
        )
    }

    #[test]
    fn closure_restores_punctured_reals() {
        assert_eq!(reals_without_zero().closure(), RealSet::full());
    }

    #[test]
    fn split_form_normalizes_to_punctured_reals() {
        let split = RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, 0.0, false, false),
            Interval::new(0.0, f64::INFINITY, false, false),
        ]);
        assert_eq!(split, reals_without_zero());
        assert_eq!(split.to_string(), "(-inf,0)∪(0,inf)");
    }

    #[test]
    fn third_reference_intersection() {
        let w = RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, 0.0, false, true),
            Interval::new(1.0, f64::INFINITY, true, false),
        ]);
        let wco = RealSet::interval(1.0, 2.0, true, true);
        assert_eq!(w.intersect(&wco), RealSet::interval(1.0, 2.0, true, true));
    }

    #[test]
    fn membership_examples() {
        let s = RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, -1.0, false, true),
            Interval::new(1.0, f64::INFINITY, true, false),
        ]);
        assert!(s.membership(1.0));
        assert!(s.membership(-1.0));
        assert!(!s.membership(0.0));
        assert!(!reals_without_zero().membership(0.0));
        assert!(reals_without_zero().membership(1e-300));
    }

    #[test]
    fn singleton_and_empty() {
        assert_eq!(RealSet::point(0.0).to_string(), "{0}");
        assert!(RealSet::empty().is_empty());
        assert_eq!(RealSet::empty().to_string(), "{}");
        assert_eq!(RealSet::interval(1.0, 0.0, true, true), RealSet::empty());
        // A punctured singleton vanishes.
        assert_eq!(
            RealSet::from_parts(vec![Interval::new(0.0, 0.0, true, true)], vec![0.0]),
            RealSet::empty()
        );
    }

    #[test]
    fn union_fills_punctures() {
        let u = reals_without_zero().union(&RealSet::point(0.0));
        assert_eq!(u, RealSet::full());
    }

    #[test]
    fn distance_and_tolerant_membership() {
        let s = RealSet::interval(1.0, 2.0, true, true);
        assert_eq!(s.distance(1.5), 0.0);
        assert_eq!(s.distance(0.5), 0.5);
        assert!(s.membership_tol(1.0 - 1e-10, 1e-8));
        assert!(!s.membership_tol(0.9, 1e-8));
        assert!(!reals_without_zero().membership_tol(0.0, 1e-8));
        assert_eq!(RealSet::empty().distance(0.0), f64::INFINITY);
    }

    #[test]
    fn intersection_produces_singletons() {
        let a = RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, -1.0, false, true),
            Interval::new(1.0, f64::INFINITY, true, false),
        ]);
        let b = RealSet::interval(-1.0, 1.0, true, true);
        let both = a.intersect(&b);
        assert_eq!(both.intervals().len(), 2);
        assert_eq!(both.to_string(), "{-1}∪{1}");
    }

    #[test]
    fn display_forms() {
        let w = RealSet::from_intervals(vec![
            Interval::new(f64::NEG_INFINITY, -1.0, false, true),
            Interval::new(1.0, f64::INFINITY, true, false),
        ]);
        assert_eq!(w.to_string(), "(-inf,-1]∪[1,inf)");
    }

    #[test]
    fn serde_roundtrip_with_infinities() {
        let s = RealSet::from_parts(
            vec![Interval::new(f64::NEG_INFINITY, 2.5, false, true)],
            vec![0.0],
        );
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"-inf\""));
        let back: RealSet = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (
            prop_oneof![Just(f64::NEG_INFINITY), (-5i32..5).prop_map(|v| v as f64)],
            prop_oneof![Just(f64::INFINITY), (-5i32..5).prop_map(|v| v as f64)],
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(|(lo, hi, lc, hc)| Interval::new(lo, hi, lc, hc))
    }

    fn arb_set() -> impl Strategy<Value = RealSet> {
        (
            prop::collection::vec(arb_interval(), 0..4),
            prop::collection::vec(-5i32..5, 0..3),
        )
            .prop_map(|(ivs, ps)| {
                RealSet::from_parts(ivs, ps.into_iter().map(|p| p as f64).collect())
            })
    }

    /// Sample points that often land exactly on endpoints.
    fn arb_probe() -> impl Strategy<Value = f64> {
        prop_oneof![
            (-6.0f64..6.0),
            (-5i32..5).prop_map(|v| v as f64),
        ]
    }

    proptest! {
        #[test]
        fn union_matches_pointwise(a in arb_set(), b in arb_set(), t in arb_probe()) {
            let u = a.union(&b);
            prop_assert_eq!(u.membership(t), a.membership(t) || b.membership(t));
        }

        #[test]
        fn intersection_matches_pointwise(a in arb_set(), b in arb_set(), t in arb_probe()) {
            let i = a.intersect(&b);
            prop_assert_eq!(i.membership(t), a.membership(t) && b.membership(t));
        }

        #[test]
        fn normalization_is_idempotent(a in arb_set()) {
            let again = RealSet::from_parts(a.intervals().to_vec(), a.punctures().to_vec());
            prop_assert_eq!(again, a);
        }

        #[test]
        fn closure_contains(a in arb_set(), t in arb_probe()) {
            if a.membership(t) {
                prop_assert!(a.closure().membership(t));
            }
        }
    }
}

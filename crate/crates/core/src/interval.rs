//! Finite unions of intervals on the extended real line.
//!
//! [`IntervalSet`] is the canonical form used for all Borel sets in the
//! crate: components are sorted, pairwise disjoint and separated by strict
//! gaps, and degenerate (single-point) components are dropped. The algebra
//! is exact — no tolerances — because endpoints only ever come from exact
//! arithmetic or a single root-find.

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]`, possibly unbounded on either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::construction(format!(
                "invalid interval [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }
}

/// A canonical finite disjoint union of intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    components: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn real_line() -> Self {
        IntervalSet {
            components: vec![Interval::real_line()],
        }
    }

    /// `(-∞, x]`.
    pub fn half_line_left(x: f64) -> Self {
        IntervalSet {
            components: vec![Interval {
                lo: f64::NEG_INFINITY,
                hi: x,
            }],
        }
    }

    /// `[x, ∞)`.
    pub fn half_line_right(x: f64) -> Self {
        IntervalSet {
            components: vec![Interval {
                lo: x,
                hi: f64::INFINITY,
            }],
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(IntervalSet::from_intervals(vec![Interval::new(lo, hi)?]))
    }

    /// Canonicalize an arbitrary collection: sort, merge overlapping or
    /// touching components, drop degenerate ones.
    pub fn from_intervals(mut parts: Vec<Interval>) -> Self {
        parts.retain(|c| !c.is_degenerate());
        parts.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap()
                .then(a.hi.partial_cmp(&b.hi).unwrap())
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for part in parts {
            match merged.last_mut() {
                Some(last) if part.lo <= last.hi => {
                    last.hi = last.hi.max(part.hi);
                }
                _ => merged.push(part),
            }
        }
        merged.retain(|c| !c.is_degenerate());
        IntervalSet { components: merged }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.components.iter().any(|c| c.contains(x))
    }

    /// Complement within the real line. Component endpoints become the
    /// endpoints of the complement, so boundary sets agree exactly.
    pub fn complement(&self) -> Self {
        if self.components.is_empty() {
            return IntervalSet::real_line();
        }
        let mut out = Vec::with_capacity(self.components.len() + 1);
        let mut cursor = f64::NEG_INFINITY;
        for c in &self.components {
            if c.lo > cursor || (c.lo == cursor && cursor.is_finite()) {
                out.push(Interval {
                    lo: cursor,
                    hi: c.lo,
                });
            }
            cursor = c.hi;
        }
        if cursor < f64::INFINITY {
            out.push(Interval {
                lo: cursor,
                hi: f64::INFINITY,
            });
        }
        IntervalSet::from_intervals(out)
    }

    pub fn union(&self, other: &IntervalSet) -> Self {
        let mut parts = self.components.clone();
        parts.extend_from_slice(&other.components);
        IntervalSet::from_intervals(parts)
    }

    pub fn intersection(&self, other: &IntervalSet) -> Self {
        let mut parts = Vec::new();
        for a in &self.components {
            for b in &other.components {
                if let Some(c) = a.intersect(b) {
                    parts.push(c);
                }
            }
        }
        IntervalSet::from_intervals(parts)
    }

    pub fn difference(&self, other: &IntervalSet) -> Self {
        self.intersection(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &IntervalSet) -> Self {
        self.difference(other).union(&other.difference(self))
    }

    /// Clip to a single interval (typically a measure's domain).
    pub fn clip(&self, window: &Interval) -> Self {
        let mut parts = Vec::new();
        for c in &self.components {
            if let Some(i) = c.intersect(window) {
                parts.push(i);
            }
        }
        IntervalSet::from_intervals(parts)
    }

    /// Open ε-neighborhood (represented closed; the boundary is null).
    pub fn neighborhood(&self, eps: f64) -> Self {
        let parts = self
            .components
            .iter()
            .map(|c| Interval {
                lo: if c.lo.is_finite() { c.lo - eps } else { c.lo },
                hi: if c.hi.is_finite() { c.hi + eps } else { c.hi },
            })
            .collect();
        IntervalSet::from_intervals(parts)
    }

    pub fn translate(&self, dx: f64) -> Self {
        IntervalSet {
            components: self
                .components
                .iter()
                .map(|c| Interval {
                    lo: if c.lo.is_finite() { c.lo + dx } else { c.lo },
                    hi: if c.hi.is_finite() { c.hi + dx } else { c.hi },
                })
                .collect(),
        }
    }

    /// Mirror image `{-x : x ∈ A}`.
    pub fn reflect(&self) -> Self {
        let parts = self
            .components
            .iter()
            .map(|c| Interval {
                lo: -c.hi,
                hi: -c.lo,
            })
            .collect();
        IntervalSet::from_intervals(parts)
    }

    /// Finite boundary points lying strictly inside `(window.lo, window.hi)`.
    pub fn interior_boundary(&self, window: &Interval) -> Vec<f64> {
        let mut pts = Vec::new();
        for c in &self.components {
            for x in [c.lo, c.hi] {
                if x.is_finite() && x > window.lo && x < window.hi {
                    pts.push(x);
                }
            }
        }
        pts
    }
}

/// Union, intersection and symmetric difference in one call.
pub fn set_algebra(a: &IntervalSet, b: &IntervalSet) -> (IntervalSet, IntervalSet, IntervalSet) {
    (a.union(b), a.intersection(b), a.symmetric_difference(b))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle values keep all digits
mod tests {
    use super::*;

    fn set(parts: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::from_intervals(
            parts
                .iter()
                .map(|&(lo, hi)| Interval::new(lo, hi).unwrap())
                .collect(),
        )
    }

    #[test]
    fn canonicalization_merges_and_sorts() {
        let s = set(&[(5.0, 6.0), (1.0, 2.0), (1.5, 3.0), (3.0, 4.0)]);
        assert_eq!(s.components().len(), 2);
        assert_eq!(s.components()[0], Interval { lo: 1.0, hi: 4.0 });
        assert_eq!(s.components()[1], Interval { lo: 5.0, hi: 6.0 });
    }

    #[test]
    fn degenerate_components_drop() {
        let s = set(&[(1.0, 1.0), (2.0, 3.0)]);
        assert_eq!(s.components().len(), 1);
    }

    #[test]
    fn symdiff_half_lines() {
        let a = IntervalSet::half_line_left(0.1);
        let b = IntervalSet::half_line_left(0.0);
        let d = a.symmetric_difference(&b);
        assert_eq!(d.components().len(), 1);
        assert_eq!(d.components()[0], Interval { lo: 0.0, hi: 0.1 });
    }

    #[test]
    fn symdiff_identities() {
        let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert!(a.symmetric_difference(&a).is_empty());
        let empty = IntervalSet::empty();
        assert_eq!(empty.symmetric_difference(&a), a);
    }

    #[test]
    fn complement_round_trip() {
        let a = set(&[(-1.0, 0.5), (2.0, 3.0)]);
        let c = a.complement();
        assert_eq!(c.components().len(), 3);
        assert_eq!(c.complement(), a);
        assert!(a.intersection(&c).is_empty());
        assert_eq!(a.union(&c), IntervalSet::real_line());
    }

    #[test]
    fn complement_of_half_line() {
        let a = IntervalSet::half_line_left(1.0);
        let c = a.complement();
        assert_eq!(c, IntervalSet::half_line_right(1.0));
    }

    #[test]
    fn interior_boundary_respects_window() {
        let a = set(&[(-1.0, 0.5), (2.0, 3.0)]);
        let w = Interval::new(-1.0, 2.5).unwrap();
        let pts = a.interior_boundary(&w);
        assert_eq!(pts, vec![0.5, 2.0]);
    }

    #[test]
    fn reflect_is_involution() {
        let a = set(&[(-2.0, -1.0), (0.0, 5.0)]);
        assert_eq!(a.reflect().reflect(), a);
        let h = IntervalSet::half_line_left(1.5).reflect();
        assert_eq!(h, IntervalSet::half_line_right(-1.5));
    }

    #[test]
    fn neighborhood_merges_close_components() {
        let a = set(&[(0.0, 1.0), (1.1, 2.0)]);
        let n = a.neighborhood(0.1);
        assert_eq!(n.components().len(), 1);
    }
}

//! 1-convex weight functions, represented exactly.
//!
//! A weight is `ψ(x) = x²/2 + c(x) + offset` where the correction `c` is a
//! convex piecewise-linear function: knots `(position, value)` with
//! nondecreasing slopes, plus end slopes on either side. Since `c` is
//! convex, `ψ - x²/2` is convex and the `K = 1` midpoint inequality holds
//! *exactly by construction* — there is no verification gap. On each piece
//! where `c` is affine the density `e^{-ψ}` is a scaled, shifted Gaussian,
//! so masses and moments reduce to closed forms in the error function.

use crate::error::{Error, Result};

/// ψ value plus one-sided derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightEval {
    pub value: f64,
    pub left_slope: f64,
    pub right_slope: f64,
}

/// A maximal interval on which the correction is affine:
/// `c(x) = slope·x + intercept` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct AffinePiece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

/// A 1-convex weight `x²/2 + (convex piecewise linear) + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexWeight {
    /// Correction knots, strictly increasing positions.
    knots: Vec<(f64, f64)>,
    /// Correction slope left of the first knot.
    left_slope: f64,
    /// Correction slope right of the last knot.
    right_slope: f64,
    /// Additive constant (normalization lives here).
    offset: f64,
}

impl ConvexWeight {
    /// Build from a knot list and end slopes; offset starts at 0.
    ///
    /// With no knots the correction is the line `left_slope · x` and both
    /// end slopes must agree. Convexity (nondecreasing slopes across the
    /// pieces) is a hard construction requirement.
    pub fn new(knots: Vec<(f64, f64)>, left_slope: f64, right_slope: f64) -> Result<Self> {
        for &(k, v) in &knots {
            if !k.is_finite() || !v.is_finite() {
                return Err(Error::construction(format!(
                    "knot ({k}, {v}) is not finite"
                )));
            }
        }
        if !left_slope.is_finite() || !right_slope.is_finite() {
            return Err(Error::construction("end slopes must be finite"));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::construction(format!(
                    "knot positions must be strictly increasing: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if knots.is_empty() && left_slope != right_slope {
            return Err(Error::construction(
                "a knot-free correction is a single line; end slopes must agree",
            ));
        }
        // slope sequence: left, interior secants, right — must be nondecreasing
        let mut prev = left_slope;
        for w in knots.windows(2) {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if s < prev {
                return Err(Error::construction(format!(
                    "correction is not convex: slope {s} after {prev}"
                )));
            }
            prev = s;
        }
        if right_slope < prev {
            return Err(Error::construction(format!(
                "correction is not convex: right slope {right_slope} after {prev}"
            )));
        }
        Ok(ConvexWeight {
            knots,
            left_slope,
            right_slope,
            offset: 0.0,
        })
    }

    /// The pure quadratic `x²/2` (a Gaussian once normalized).
    pub fn gaussian() -> Self {
        ConvexWeight {
            knots: Vec::new(),
            left_slope: 0.0,
            right_slope: 0.0,
            offset: 0.0,
        }
    }

    /// One-sided kink `size · max(x - position, 0)`, `size ≥ 0`.
    pub fn hinge(position: f64, size: f64) -> Result<Self> {
        if !(size >= 0.0) {
            return Err(Error::construction(format!(
                "hinge size must be nonnegative, got {size}"
            )));
        }
        ConvexWeight::new(vec![(position, 0.0)], 0.0, size)
    }

    /// Symmetric kink `size · |x - position|`, `size ≥ 0`.
    pub fn vee(position: f64, size: f64) -> Result<Self> {
        if !(size >= 0.0) {
            return Err(Error::construction(format!(
                "vee size must be nonnegative, got {size}"
            )));
        }
        ConvexWeight::new(vec![(position, 0.0)], -size, size)
    }

    /// Linear tilt `s · x` (a shifted Gaussian once normalized).
    pub fn tilt(s: f64) -> Self {
        ConvexWeight {
            knots: Vec::new(),
            left_slope: s,
            right_slope: s,
            offset: 0.0,
        }
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn end_slopes(&self) -> (f64, f64) {
        (self.left_slope, self.right_slope)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn add_offset(&mut self, delta: f64) {
        self.offset += delta;
    }

    /// Correction value and one-sided slopes at `x`.
    fn correction(&self, x: f64) -> (f64, f64, f64) {
        if self.knots.is_empty() {
            return (self.left_slope * x, self.left_slope, self.left_slope);
        }
        let n = self.knots.len();
        if x <= self.knots[0].0 {
            let (k, v) = self.knots[0];
            let value = v + self.left_slope * (x - k);
            if x == k {
                let out = if n > 1 {
                    (self.knots[1].1 - v) / (self.knots[1].0 - k)
                } else {
                    self.right_slope
                };
                return (v, self.left_slope, out);
            }
            return (value, self.left_slope, self.left_slope);
        }
        if x >= self.knots[n - 1].0 {
            let (k, v) = self.knots[n - 1];
            let value = v + self.right_slope * (x - k);
            if x == k {
                let inc = if n > 1 {
                    (v - self.knots[n - 2].1) / (k - self.knots[n - 2].0)
                } else {
                    self.left_slope
                };
                return (v, inc, self.right_slope);
            }
            return (value, self.right_slope, self.right_slope);
        }
        // interior: locate the piece [k_i, k_{i+1}] containing x
        let i = match self
            .knots
            .binary_search_by(|probe| probe.0.partial_cmp(&x).unwrap())
        {
            Ok(exact) => {
                let (k, v) = self.knots[exact];
                let inc = (v - self.knots[exact - 1].1) / (k - self.knots[exact - 1].0);
                let out = (self.knots[exact + 1].1 - v) / (self.knots[exact + 1].0 - k);
                return (v, inc, out);
            }
            Err(ins) => ins - 1,
        };
        let (k0, v0) = self.knots[i];
        let (k1, v1) = self.knots[i + 1];
        let s = (v1 - v0) / (k1 - k0);
        (v0 + s * (x - k0), s, s)
    }

    /// ψ(x) with one-sided derivatives.
    pub fn eval(&self, x: f64) -> WeightEval {
        debug_assert!(x.is_finite());
        let (c, sl, sr) = self.correction(x);
        WeightEval {
            value: 0.5 * x * x + c + self.offset,
            left_slope: x + sl,
            right_slope: x + sr,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).value
    }

    /// Affine pieces of the correction, spanning the whole line in order.
    pub fn pieces(&self) -> Vec<AffinePiece> {
        if self.knots.is_empty() {
            return vec![AffinePiece {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                slope: self.left_slope,
                intercept: 0.0,
            }];
        }
        let mut out = Vec::with_capacity(self.knots.len() + 1);
        let (k0, v0) = self.knots[0];
        out.push(AffinePiece {
            lo: f64::NEG_INFINITY,
            hi: k0,
            slope: self.left_slope,
            intercept: v0 - self.left_slope * k0,
        });
        for w in self.knots.windows(2) {
            let (ka, va) = w[0];
            let (kb, vb) = w[1];
            let s = (vb - va) / (kb - ka);
            out.push(AffinePiece {
                lo: ka,
                hi: kb,
                slope: s,
                intercept: va - s * ka,
            });
        }
        let (kn, vn) = self.knots[self.knots.len() - 1];
        out.push(AffinePiece {
            lo: kn,
            hi: f64::INFINITY,
            slope: self.right_slope,
            intercept: vn - self.right_slope * kn,
        });
        out
    }

    /// Knot positions (breakpoints of the density's piecewise structure).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.knots.iter().map(|&(k, _)| k).collect()
    }

    /// The weight `x ↦ ψ(x - t)`, expressed in the same family.
    pub fn translate(&self, t: f64) -> Self {
        // psi(x-t) = x²/2 + [c(x-t) - t·x + t²/2] + offset
        if self.knots.is_empty() {
            let s = self.left_slope;
            // new correction: (s - t)x + (t²/2 - s t); carry the intercept
            // with a single knot so the family stays closed under shifts
            if t == 0.0 {
                return self.clone();
            }
            return ConvexWeight {
                knots: vec![(t, -0.5 * t * t)],
                left_slope: s - t,
                right_slope: s - t,
                offset: self.offset,
            };
        }
        let knots = self
            .knots
            .iter()
            .map(|&(k, v)| (k + t, v - t * k - 0.5 * t * t))
            .collect();
        ConvexWeight {
            knots,
            left_slope: self.left_slope - t,
            right_slope: self.right_slope - t,
            offset: self.offset,
        }
    }

    /// The weight `x ↦ ψ(-x)`.
    pub fn reflect(&self) -> Self {
        let mut knots: Vec<(f64, f64)> = self.knots.iter().map(|&(k, v)| (-k, v)).collect();
        knots.reverse();
        ConvexWeight {
            knots,
            left_slope: -self.right_slope,
            right_slope: -self.left_slope,
            offset: self.offset,
        }
    }
}

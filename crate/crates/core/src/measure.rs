//! Normalized needle measures `e^{-ψ} dx` on a closed interval.
//!
//! All masses and moments are segment-exact: on each affine piece of the
//! weight's correction the density is a scaled shifted Gaussian, so
//! integrals reduce to the error function — there is no quadrature error in
//! the core. Quadrature appears only in [`NeedleMeasure::integrate`], which
//! handles arbitrary integrands for the functional-inequality witnesses.

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::quad;
use crate::solve;
use crate::special;
use crate::weight::ConvexWeight;

/// Which θ-quantile of the measure: mass θ to the left or to the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Zeroth, first and second moments over a region.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub mass: f64,
    pub first: f64,
    pub second: f64,
}

/// A probability measure `e^{-ψ} dx` on `domain`, with 1-convex `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedleMeasure {
    domain: Interval,
    weight: ConvexWeight,
}

impl NeedleMeasure {
    /// Normalize `e^{-ψ}` to a probability measure on `domain` by shifting
    /// the weight offset.
    pub fn normalize(domain: Interval, weight: ConvexWeight) -> Result<Self> {
        if domain.is_degenerate() {
            return Err(Error::construction("domain must have positive length"));
        }
        let mut m = NeedleMeasure { domain, weight };
        let raw = m.moments_between(domain.lo, domain.hi).mass;
        if !raw.is_finite() || raw <= 0.0 {
            return Err(Error::construction(format!(
                "weight does not integrate to a finite positive mass (got {raw})"
            )));
        }
        m.weight.add_offset(raw.ln());
        Ok(m)
    }

    /// The standard Gaussian needle on ℝ.
    pub fn standard_gaussian() -> Self {
        NeedleMeasure::normalize(Interval::real_line(), ConvexWeight::gaussian())
            .expect("the Gaussian normalizes")
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn weight(&self) -> &ConvexWeight {
        &self.weight
    }

    /// Density `e^{-ψ(x)}` (zero outside the domain).
    pub fn density(&self, x: f64) -> f64 {
        if !x.is_finite() || !self.domain.contains(x) {
            return 0.0;
        }
        (-self.weight.value(x)).exp()
    }

    /// Exact moments of the measure restricted to `[a, b]` (clipped to the
    /// domain). Works piece by piece through the Gaussian closed forms.
    fn moments_between(&self, a: f64, b: f64) -> Moments {
        let lo = a.max(self.domain.lo);
        let hi = b.min(self.domain.hi);
        let mut out = Moments::default();
        if !(lo < hi) {
            return out;
        }
        let offset = self.weight.offset();
        for piece in self.weight.pieces() {
            let seg_lo = lo.max(piece.lo);
            let seg_hi = hi.min(piece.hi);
            if !(seg_lo < seg_hi) {
                continue;
            }
            let s = piece.slope;
            let scale = (0.5 * s * s - piece.intercept - offset).exp();
            let a_sh = seg_lo + s;
            let b_sh = seg_hi + s;
            let i0 = special::SQRT_2PI * special::normal_cdf_diff(a_sh, b_sh);
            let ea = if a_sh.is_finite() {
                (-0.5 * a_sh * a_sh).exp()
            } else {
                0.0
            };
            let eb = if b_sh.is_finite() {
                (-0.5 * b_sh * b_sh).exp()
            } else {
                0.0
            };
            let i1 = ea - eb;
            let i2 = (if a_sh.is_finite() { a_sh * ea } else { 0.0 })
                - (if b_sh.is_finite() { b_sh * eb } else { 0.0 })
                + i0;
            out.mass += scale * i0;
            out.first += scale * (i1 - s * i0);
            out.second += scale * (i2 - 2.0 * s * i1 + s * s * i0);
        }
        out
    }

    /// Mass of `[a, b] ∩ domain`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.moments_between(a, b).mass
    }

    /// Mass of a canonical interval set.
    pub fn mass(&self, set: &IntervalSet) -> f64 {
        set.components()
            .iter()
            .map(|c| self.mass_between(c.lo, c.hi))
            .sum()
    }

    /// Full-domain moments.
    pub fn moments(&self) -> Moments {
        self.moments_between(self.domain.lo, self.domain.hi)
    }

    /// Mass of `domain ∩ (-∞, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.mass_between(f64::NEG_INFINITY, x)
    }

    /// Mass of `domain ∩ [x, ∞)`.
    pub fn sf(&self, x: f64) -> f64 {
        self.mass_between(x, f64::INFINITY)
    }

    fn check_theta(theta: f64) -> Result<()> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::domain(format!(
                "theta must lie in (0,1), got {theta}"
            )));
        }
        Ok(())
    }

    /// Finite bracket [a, b] with cdf(a) < p < cdf(b).
    fn quantile_bracket(&self, p: f64) -> (f64, f64) {
        let mut a = if self.domain.lo.is_finite() {
            self.domain.lo
        } else {
            let mut a = self.domain.hi.min(0.0) - 1.0;
            let mut step = 1.0;
            while self.cdf(a) >= p {
                step *= 2.0;
                a -= step;
            }
            a
        };
        let mut b = if self.domain.hi.is_finite() {
            self.domain.hi
        } else {
            let mut b = self.domain.lo.max(0.0) + 1.0;
            let mut step = 1.0;
            while self.cdf(b) <= p {
                step *= 2.0;
                b += step;
            }
            b
        };
        // keep the bracket strictly inside a degenerate-free range
        if a >= b {
            std::mem::swap(&mut a, &mut b);
        }
        (a, b)
    }

    /// Finite bracket [a, b] with sf(a) > p > sf(b). Bracketing in
    /// survival space matters near the rounding scale: cdf and sf are
    /// independent piece sums, so a cdf bracket need not straddle an sf
    /// root.
    fn sf_bracket(&self, p: f64) -> (f64, f64) {
        let mut a = if self.domain.lo.is_finite() {
            self.domain.lo
        } else {
            let mut a = self.domain.hi.min(0.0) - 1.0;
            let mut step = 1.0;
            while self.sf(a) <= p {
                step *= 2.0;
                a -= step;
            }
            a
        };
        let mut b = if self.domain.hi.is_finite() {
            self.domain.hi
        } else {
            let mut b = self.domain.lo.max(0.0) + 1.0;
            let mut step = 1.0;
            while self.sf(b) >= p {
                step *= 2.0;
                b += step;
            }
            b
        };
        if a >= b {
            std::mem::swap(&mut a, &mut b);
        }
        (a, b)
    }

    /// The θ-quantile: `side = Minus` puts mass θ on `(-∞, r]`,
    /// `side = Plus` puts mass θ on `[r, ∞)`. Bisection to width 1e-13
    /// polished by one Newton step with the density.
    pub fn quantile_r(&self, theta: f64, side: Side) -> Result<f64> {
        Self::check_theta(theta)?;
        match side {
            Side::Minus => {
                let (a, b) = self.quantile_bracket(theta);
                Ok(solve::bisect_then_newton(
                    |x| self.cdf(x) - theta,
                    |x| self.density(x),
                    a,
                    b,
                    1e-13,
                ))
            }
            Side::Plus => {
                let (a, b) = self.sf_bracket(theta);
                Ok(solve::bisect_then_newton(
                    |x| self.sf(x) - theta,
                    |x| -self.density(x),
                    a,
                    b,
                    1e-13,
                ))
            }
        }
    }

    /// Perimeter of `A ⊆ domain`: the sum of `e^{-ψ}` over boundary points
    /// of `A` interior to the domain (relative boundary convention — domain
    /// endpoints contribute nothing).
    pub fn perimeter(&self, set: &IntervalSet) -> f64 {
        let clipped = set.clip(&self.domain);
        clipped
            .interior_boundary(&self.domain)
            .iter()
            .map(|&x| self.density(x))
            .sum()
    }

    /// Minkowski exterior content estimate: the quotient
    /// `mass(B(A,ε)∖A)/ε` at the smallest ε of the supplied decreasing
    /// sequence (the liminf estimate the sequence affords).
    pub fn minkowski_content(&self, set: &IntervalSet, eps_seq: &[f64]) -> Result<f64> {
        if eps_seq.is_empty() {
            return Err(Error::domain("minkowski_content needs at least one ε"));
        }
        for w in eps_seq.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::domain("ε sequence must be strictly decreasing"));
            }
        }
        let clipped = set.clip(&self.domain);
        let mut last = f64::INFINITY;
        for &eps in eps_seq {
            if !(eps > 0.0) {
                return Err(Error::domain("ε must be positive"));
            }
            let grown = clipped.neighborhood(eps).clip(&self.domain);
            last = self.mass(&grown.difference(&clipped)) / eps;
        }
        Ok(last)
    }

    /// Isoperimetric profile through the half-line reduction: for convex ψ
    /// the minimum of the perimeter at fixed mass θ is attained on
    /// `(-∞, r⁻(θ)]` or `[r⁺(θ), ∞)` (intersected with the domain). Exact
    /// ties pick the left witness.
    pub fn iso_profile_halfline(&self, theta: f64) -> Result<(f64, IntervalSet)> {
        Self::check_theta(theta)?;
        let r_minus = self.quantile_r(theta, Side::Minus)?;
        let r_plus = self.quantile_r(theta, Side::Plus)?;
        let left = self.density(r_minus);
        let right = self.density(r_plus);
        if left <= right {
            Ok((
                left,
                IntervalSet::half_line_left(r_minus).clip(&self.domain),
            ))
        } else {
            Ok((
                right,
                IntervalSet::half_line_right(r_plus).clip(&self.domain),
            ))
        }
    }

    /// Variance and Dirichlet energy of the affine function `u = a·x + b`.
    pub fn variance_affine(&self, a: f64, _b: f64) -> (f64, f64) {
        let m = self.moments();
        let var = (m.second - m.first * m.first).max(0.0);
        (a * a * var, a * a)
    }

    /// Quadrature of `∫ f dμ` for an arbitrary integrand, splitting panels
    /// at the weight's kinks and at caller-supplied breakpoints.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, extra_breaks: &[f64]) -> f64 {
        let (lo, hi) = self.effective_bounds();
        let mut breaks = self.weight.breakpoints();
        breaks.extend_from_slice(extra_breaks);
        quad::integrate_with_breaks(|x| f(x) * self.density(x), lo, hi, &breaks, 0.1)
    }

    /// Finite interval carrying all but ~1e-15 of the mass, through the
    /// exact per-piece quantile (root brackets degenerate at this scale).
    pub fn effective_bounds(&self) -> (f64, f64) {
        let lo = if self.domain.lo.is_finite() {
            self.domain.lo
        } else {
            self.quantile_mass(1e-15).unwrap_or(-9.0) - 0.5
        };
        let hi = if self.domain.hi.is_finite() {
            self.domain.hi
        } else {
            self.quantile_mass(1.0 - 1e-15).unwrap_or(9.0) + 0.5
        };
        (lo, hi)
    }

    /// The measure pushed forward by `x ↦ x + t`.
    pub fn translate(&self, t: f64) -> Self {
        let lo = if self.domain.lo.is_finite() {
            self.domain.lo + t
        } else {
            self.domain.lo
        };
        let hi = if self.domain.hi.is_finite() {
            self.domain.hi + t
        } else {
            self.domain.hi
        };
        NeedleMeasure {
            domain: Interval { lo, hi },
            weight: self.weight.translate(t),
        }
    }

    /// The measure pushed forward by `x ↦ -x`.
    pub fn reflect(&self) -> Self {
        NeedleMeasure {
            domain: Interval {
                lo: -self.domain.hi,
                hi: -self.domain.lo,
            },
            weight: self.weight.reflect(),
        }
    }

    /// Supremum of the density over the domain, attained where ψ is
    /// minimal (checked at the per-piece stationary points, the kinks and
    /// finite domain ends).
    pub fn max_density(&self) -> f64 {
        let mut psi_min = f64::INFINITY;
        let mut consider = |x: f64| {
            if x.is_finite() && self.domain.contains(x) {
                psi_min = psi_min.min(self.weight.value(x));
            }
        };
        for piece in self.weight.pieces() {
            let seg_lo = piece.lo.max(self.domain.lo);
            let seg_hi = piece.hi.min(self.domain.hi);
            if seg_lo <= seg_hi {
                consider((-piece.slope).clamp(seg_lo, seg_hi));
            }
        }
        for k in self.weight.breakpoints() {
            consider(k);
        }
        consider(self.domain.lo);
        consider(self.domain.hi);
        (-psi_min).exp()
    }

    /// Exact quantile by per-piece Gaussian inversion: the `x` with
    /// `mass((-∞, x] ∩ domain) = target`. Inverts from whichever side of
    /// the containing piece keeps the error function well conditioned.
    pub fn quantile_mass(&self, target: f64) -> Option<f64> {
        if !(target > 0.0 && target < 1.0) {
            return None;
        }
        let offset = self.weight.offset();
        struct Seg {
            lo: f64,
            hi: f64,
            slope: f64,
            scale: f64,
            mass: f64,
        }
        let mut segs: Vec<Seg> = Vec::new();
        for piece in self.weight.pieces() {
            let lo = self.domain.lo.max(piece.lo);
            let hi = self.domain.hi.min(piece.hi);
            if !(lo < hi) {
                continue;
            }
            let scale = (0.5 * piece.slope * piece.slope - piece.intercept - offset).exp();
            let mass = scale
                * special::SQRT_2PI
                * special::normal_cdf_diff(lo + piece.slope, hi + piece.slope);
            segs.push(Seg {
                lo,
                hi,
                slope: piece.slope,
                scale,
                mass,
            });
        }
        let mut acc = 0.0;
        for (i, seg) in segs.iter().enumerate() {
            if acc + seg.mass >= target || i + 1 == segs.len() {
                let s = seg.slope;
                let unit = seg.scale * special::SQRT_2PI;
                let z = if target - acc <= 0.5 * seg.mass {
                    // invert from the left edge of the piece
                    let p = special::normal_cdf(seg.lo + s) + (target - acc) / unit;
                    special::normal_quantile(p.clamp(f64::MIN_POSITIVE, 1.0 - 1e-16)) - s
                } else {
                    // invert from the right edge to avoid cancellation
                    let rest = (acc + seg.mass - target).max(0.0);
                    let sf = special::normal_sf(seg.hi + s) + rest / unit;
                    -special::normal_quantile(sf.clamp(f64::MIN_POSITIVE, 1.0 - 1e-16)) - s
                };
                return Some(z.clamp(seg.lo, seg.hi));
            }
            acc += seg.mass;
        }
        None
    }

    /// Exhaustive isoperimetric search over unions of at most
    /// `max_components` intervals with endpoints on a grid of the given
    /// step; the final endpoint of each candidate is adjusted exactly so
    /// the mass is θ. Independent of the half-line reduction — this is its
    /// oracle.
    ///
    /// The enumeration is pruned only by arguments that cannot exclude a
    /// minimizer: partial boundary sums already at the incumbent, mass
    /// infeasibility, and component lower bounds that follow from the
    /// density's log-concavity (the endpoint-weight sum of an interval at
    /// fixed mass is minimized in the slide limits, and the density along
    /// the quantile is unimodal).
    pub fn iso_profile_bruteforce(
        &self,
        theta: f64,
        max_components: usize,
        grid: f64,
    ) -> Result<(f64, IntervalSet)> {
        Self::check_theta(theta)?;
        if max_components == 0 || max_components > 3 {
            return Err(Error::domain("brute force supports 1 to 3 components"));
        }
        if !(grid > 0.0) {
            return Err(Error::domain("grid step must be positive"));
        }
        let glo = (self.quantile_r(1e-6, Side::Minus)? - 0.5).max(self.domain.lo);
        let ghi = (self.quantile_r(1e-6, Side::Plus)? + 0.5).min(self.domain.hi);
        let n = ((ghi - glo) / grid).floor() as usize + 1;
        let xs: Vec<f64> = (0..n).map(|i| glo + i as f64 * grid).collect();
        let dens: Vec<f64> = xs.iter().map(|&x| self.density(x)).collect();
        let cdfs: Vec<f64> = xs.iter().map(|&x| self.cdf(x)).collect();
        let sfs: Vec<f64> = xs.iter().map(|&x| self.sf(x)).collect();
        let tables = PruneTables::build(self);

        let mut search = BruteForce {
            measure: self,
            theta,
            xs: &xs,
            dens: &dens,
            cdfs: &cdfs,
            sfs: &sfs,
            tables: &tables,
            best: f64::INFINITY,
            best_cuts: Vec::new(),
            best_pattern: (false, false),
        };
        for k in 1..=max_components {
            // half-line patterns first so the incumbent prunes early
            for (start_at_lo, end_at_hi) in
                [(true, false), (false, true), (true, true), (false, false)]
            {
                if start_at_lo && end_at_hi && k == 1 {
                    continue; // the full domain has mass 1
                }
                search.run_pattern(k, start_at_lo, end_at_hi);
            }
        }
        if !search.best.is_finite() {
            return Err(Error::search(format!(
                "no union of at most {max_components} intervals attains mass {theta}"
            )));
        }
        let witness = search.witness(&self.domain);
        Ok((search.best, witness))
    }
}

const MASS_SLACK: f64 = 1e-12;
/// Mass resolution of the density-at-quantile pruning table.
const QTBL: usize = 2048;

/// Pruning table for the brute-force search: the density at the
/// m-quantile on a uniform mass grid. For a 1-convex weight this function
/// is concave in m (its derivative is `-ψ\'(q(m))`, which is monotone), and
/// in particular unimodal, so cell minima sit at cell ends.
struct PruneTables {
    dq_low: Vec<f64>,
}

impl PruneTables {
    fn build(m: &NeedleMeasure) -> Self {
        let n = QTBL;
        let mut dq = vec![0.0; n + 1];
        for (i, slot) in dq.iter_mut().enumerate().take(n).skip(1) {
            let mass = i as f64 / n as f64;
            if let Some(q) = m.quantile_mass(mass) {
                *slot = m.density(q);
            }
        }
        let dq_low = (0..=n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n);
                dq[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min)
            })
            .collect();
        PruneTables { dq_low }
    }

    /// Cell lower bound of the density at the mass-m quantile.
    fn dq_at(&self, mass: f64) -> f64 {
        if !(mass > 0.0) || !(mass < 1.0) {
            return 0.0;
        }
        let i = (mass * QTBL as f64) as usize;
        self.dq_low[i].min(self.dq_low[(i + 1).min(QTBL)])
    }
}

/// State for the pruned brute-force enumeration.
struct BruteForce<'a> {
    measure: &'a NeedleMeasure,
    theta: f64,
    xs: &'a [f64],
    dens: &'a [f64],
    cdfs: &'a [f64],
    sfs: &'a [f64],
    tables: &'a PruneTables,
    best: f64,
    best_cuts: Vec<f64>,
    best_pattern: (bool, bool),
}

impl<'a> BruteForce<'a> {
    /// Exact density at the mass-m quantile (0 at the extremes).
    fn exact_dq(&self, m: f64) -> f64 {
        if !(m > 0.0) || !(m < 1.0) {
            return 0.0;
        }
        match self.measure.quantile_mass(m) {
            Some(q) => self.measure.density(q),
            None => 0.0,
        }
    }

    /// Exact lower bound for the boundary weight of one component of mass
    /// m: the slide limits of an interval at fixed mass. Since `dq` is
    /// concave and vanishes at the ends, this bound is subadditive, so it
    /// also bounds any family of components sharing a total mass m.
    fn exact_cg(&self, m: f64) -> f64 {
        self.exact_dq(m).min(self.exact_dq(1.0 - m))
    }

    fn run_pattern(&mut self, k: usize, start_at_lo: bool, end_at_hi: bool) {
        let cuts = 2 * k - usize::from(start_at_lo) - usize::from(end_at_hi);
        let mut chosen = Vec::with_capacity(cuts);
        self.recurse(
            end_at_hi,
            start_at_lo,
            cuts,
            0,
            if start_at_lo { Some(usize::MAX) } else { None },
            0.0,
            0.0,
            &mut chosen,
        );
    }

    /// `open_from`: Some(idx) when inside a component opened at grid index
    /// idx (usize::MAX means the domain's left end); None when outside.
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        end_at_hi: bool,
        start_at_lo: bool,
        cuts: usize,
        next_min_idx: usize,
        open_from: Option<usize>,
        mass_committed: f64,
        perim: f64,
        chosen: &mut Vec<f64>,
    ) {
        let remaining = cuts - chosen.len();
        if remaining == 1 {
            self.solve_last(
                start_at_lo,
                end_at_hi,
                open_from,
                mass_committed,
                perim,
                chosen,
            );
            return;
        }
        let rem = self.theta - mass_committed;
        if rem <= MASS_SLACK {
            // leftover components would be massless: dominated by the
            // smaller-component pattern already enumerated
            return;
        }
        match open_from {
            Some(open_idx) => {
                let (open_cdf, open_sf) = if open_idx == usize::MAX {
                    (0.0, 1.0)
                } else {
                    (self.cdfs[open_idx], self.sfs[open_idx])
                };
                // even engulfing everything right of the opening falls short
                if mass_committed + open_sf < self.theta - MASS_SLACK {
                    return;
                }
                // the open component closes at a determined mass position
                // once the split of rem with the remaining components is
                // fixed; the split objective is concave, so its minimum is
                // at a degenerate split
                let dens_open = if open_idx == usize::MAX {
                    let lo = self.measure.domain().lo;
                    if lo.is_finite() {
                        self.measure.density(lo)
                    } else {
                        0.0
                    }
                } else {
                    self.dens[open_idx]
                };
                let bound = self
                    .exact_dq(open_cdf + rem)
                    .min(dens_open + self.exact_cg(rem));
                if perim + bound >= self.best + 1e-12 {
                    return;
                }
                for i in next_min_idx..self.xs.len() {
                    if perim + self.dens[i] >= self.best {
                        continue;
                    }
                    let m_new = mass_committed + (self.cdfs[i] - open_cdf);
                    if m_new > self.theta + MASS_SLACK {
                        break; // closing further right only adds mass
                    }
                    if remaining == 2 {
                        // the child is a leaf: the solved cut opens the
                        // final component at a determined mass position
                        let z_low = self.tables.dq_at(1.0 - (self.theta - m_new));
                        if perim + self.dens[i] + z_low >= self.best {
                            continue;
                        }
                    }
                    chosen.push(self.xs[i]);
                    self.recurse(
                        end_at_hi,
                        start_at_lo,
                        cuts,
                        i + 1,
                        None,
                        m_new,
                        perim + self.dens[i],
                        chosen,
                    );
                    chosen.pop();
                }
            }
            None => {
                // the remaining components share exactly rem; by
                // subadditivity one component carrying everything is the
                // cheapest split
                let bound = self.exact_cg(rem);
                if perim + bound >= self.best + 1e-12 {
                    return;
                }
                for i in next_min_idx..self.xs.len() {
                    if perim + self.dens[i] >= self.best {
                        continue;
                    }
                    // opening further right shrinks the reachable mass
                    if mass_committed + self.sfs[i] < self.theta - MASS_SLACK {
                        break;
                    }
                    if remaining == 2 {
                        // the child is a leaf: the solved cut closes this
                        // component at a determined mass position
                        let z_low = self.tables.dq_at(self.cdfs[i] + rem);
                        if perim + self.dens[i] + z_low >= self.best {
                            continue;
                        }
                    }
                    chosen.push(self.xs[i]);
                    self.recurse(
                        end_at_hi,
                        start_at_lo,
                        cuts,
                        i + 1,
                        Some(i),
                        mass_committed,
                        perim + self.dens[i],
                        chosen,
                    );
                    chosen.pop();
                }
            }
        }
    }

    fn solve_last(
        &mut self,
        start_at_lo: bool,
        end_at_hi: bool,
        open_from: Option<usize>,
        mass_committed: f64,
        perim: f64,
        chosen: &[f64],
    ) {
        if perim >= self.best {
            return;
        }
        let need = self.theta - mass_committed;
        if need <= MASS_SLACK {
            return;
        }
        let domain = self.measure.domain();
        let prev = chosen.last().copied().unwrap_or(f64::NEG_INFINITY);
        let z = match open_from {
            Some(open_idx) => {
                debug_assert!(!end_at_hi);
                // close the open component at z: mass(open, z) = need
                let (open_cdf, available) = if open_idx == usize::MAX {
                    (0.0, 1.0)
                } else {
                    (self.cdfs[open_idx], self.sfs[open_idx])
                };
                if need >= available - MASS_SLACK {
                    return; // would have to run to the domain end
                }
                if perim + self.tables.dq_at(open_cdf + need) >= self.best {
                    return;
                }
                match self.measure.quantile_mass(open_cdf + need) {
                    Some(z) => z,
                    None => return,
                }
            }
            None => {
                if !end_at_hi {
                    return; // parity: an opening last cut must run to the end
                }
                // open the final component at z: mass(z, hi) = need
                let available = if prev.is_finite() {
                    self.measure.sf(prev)
                } else {
                    1.0
                };
                if need >= available - MASS_SLACK {
                    return;
                }
                if perim + self.tables.dq_at(1.0 - need) >= self.best {
                    return;
                }
                match self.measure.quantile_mass(1.0 - need) {
                    Some(z) => z,
                    None => return,
                }
            }
        };
        if !z.is_finite() || z <= prev || z >= domain.hi || z <= domain.lo {
            return;
        }
        let total = perim + self.measure.density(z);
        if total < self.best {
            self.best = total;
            self.best_cuts = chosen.to_vec();
            self.best_cuts.push(z);
            self.best_pattern = (start_at_lo, end_at_hi);
        }
    }

    fn witness(&self, domain: &Interval) -> IntervalSet {
        let (starts_at_lo, ends_at_hi) = self.best_pattern;
        let mut parts = Vec::new();
        let mut cursor = if starts_at_lo { Some(domain.lo) } else { None };
        for &z in &self.best_cuts {
            match cursor.take() {
                Some(lo) => parts.push(Interval { lo, hi: z }),
                None => cursor = Some(z),
            }
        }
        if let Some(lo) = cursor {
            debug_assert!(ends_at_hi);
            parts.push(Interval { lo, hi: domain.hi });
        }
        IntervalSet::from_intervals(parts)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle values keep all digits
mod tests {
    use super::*;
    use crate::special::LN_SQRT_2PI;

    // mpmath references
    const MASS_PM1: f64 = 0.6826894921370859;
    const PERIM_PM1: f64 = 0.4839414490382867;
    const OFFSET_HALFLINE: f64 = 0.22579135264472743; // ln(sqrt(2pi)/2)
    const OFFSET_PM1: f64 = 0.53722338690254667; // ln(sqrt(2pi)(2Φ(1)-1))
    const PDF_0: f64 = 0.39894228040143268;
    const A_03: f64 = -0.52440051270804082;
    const PROFILE_03: f64 = 0.34769261420007376;
    const SYMDIFF_01: f64 = 0.039827837277028984;

    fn gaussian() -> NeedleMeasure {
        NeedleMeasure::standard_gaussian()
    }

    #[test]
    fn normalization_offsets() {
        let g = gaussian();
        assert!((g.weight().offset() - LN_SQRT_2PI).abs() < 1e-12);
        let h = NeedleMeasure::normalize(
            Interval::new(0.0, f64::INFINITY).unwrap(),
            ConvexWeight::gaussian(),
        )
        .unwrap();
        assert!((h.weight().offset() - OFFSET_HALFLINE).abs() < 1e-12);
        let b =
            NeedleMeasure::normalize(Interval::new(-1.0, 1.0).unwrap(), ConvexWeight::gaussian())
                .unwrap();
        assert!((b.weight().offset() - OFFSET_PM1).abs() < 1e-12);
        assert!((b.moments().mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_masses() {
        let g = gaussian();
        assert!((g.mass(&IntervalSet::half_line_left(0.0)) - 0.5).abs() < 1e-12);
        let pm1 = IntervalSet::interval(-1.0, 1.0).unwrap();
        assert!((g.mass(&pm1) - MASS_PM1).abs() < 1e-12);
        assert_eq!(g.mass(&IntervalSet::empty()), 0.0);
        assert!((g.mass(&IntervalSet::real_line()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantiles() {
        let g = gaussian();
        assert!(g.quantile_r(0.5, Side::Minus).unwrap().abs() < 1e-10);
        let r = g.quantile_r(0.15865525393145705, Side::Plus).unwrap();
        assert!((r - 1.0).abs() < 1e-6);
        // r⁻(θ) = r⁺(1-θ)
        for theta in [0.2, 0.4, 0.77] {
            let a = g.quantile_r(theta, Side::Minus).unwrap();
            let b = g.quantile_r(1.0 - theta, Side::Plus).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
        assert!(g.quantile_r(0.0, Side::Minus).is_err());
    }

    #[test]
    fn quantiles_on_weighted_needles() {
        let m = NeedleMeasure::normalize(
            Interval::real_line(),
            ConvexWeight::hinge(0.0, 0.1).unwrap(),
        )
        .unwrap();
        // mpmath: median of the t=0.1 hinge needle
        let med = m.quantile_r(0.5, Side::Minus).unwrap();
        assert!((med - -0.047043214697733156).abs() < 1e-9);
        let dens = m.density(med);
        assert!((dens - 0.41403622420435333).abs() < 1e-9);
    }

    #[test]
    fn perimeter_examples() {
        let g = gaussian();
        assert!((g.perimeter(&IntervalSet::half_line_left(0.0)) - PDF_0).abs() < 1e-12);
        let pm1 = IntervalSet::interval(-1.0, 1.0).unwrap();
        assert!((g.perimeter(&pm1) - PERIM_PM1).abs() < 1e-12);
        assert_eq!(g.perimeter(&IntervalSet::real_line()), 0.0);
        // complement has the same boundary
        assert!((g.perimeter(&pm1.complement()) - PERIM_PM1).abs() < 1e-12);
    }

    #[test]
    fn perimeter_ignores_domain_endpoints() {
        let m =
            NeedleMeasure::normalize(Interval::new(-1.0, 1.0).unwrap(), ConvexWeight::gaussian())
                .unwrap();
        let a = IntervalSet::interval(-1.0, 0.0).unwrap();
        assert!((m.perimeter(&a) - m.density(0.0)).abs() < 1e-12);
    }

    #[test]
    fn minkowski_examples() {
        let g = gaussian();
        let eps = [1e-2, 1e-3, 1e-4];
        let h = IntervalSet::half_line_left(0.0);
        let v = g.minkowski_content(&h, &eps).unwrap();
        assert!((v - PDF_0).abs() < 1e-3);
        assert!(v >= g.perimeter(&h) - 1e-3);
        let pm1 = IntervalSet::interval(-1.0, 1.0).unwrap();
        let v = g.minkowski_content(&pm1, &eps).unwrap();
        assert!((v - PERIM_PM1).abs() < 1e-3);
        assert_eq!(
            g.minkowski_content(&IntervalSet::real_line(), &eps)
                .unwrap(),
            0.0
        );
        assert!(g.minkowski_content(&h, &[]).is_err());
    }

    #[test]
    fn halfline_profile_gaussian() {
        let g = gaussian();
        let (v, witness) = g.iso_profile_halfline(0.3).unwrap();
        assert!((v - PROFILE_03).abs() < 1e-10);
        assert_eq!(witness.components().len(), 1);
        assert!((witness.components()[0].hi - A_03).abs() < 1e-9);
        // symmetric θ ties to the left half-line
        let (_, w) = g.iso_profile_halfline(0.5).unwrap();
        assert_eq!(w.components()[0].lo, f64::NEG_INFINITY);
    }

    #[test]
    fn variance_examples() {
        let g = gaussian();
        let (var, energy) = g.variance_affine(1.0, 0.0);
        assert!((var - 1.0).abs() < 1e-10);
        assert!((energy - 1.0).abs() < 1e-15);
        let (var, energy) = g.variance_affine(0.0, 3.0);
        assert_eq!((var, energy), (0.0, 0.0));
        let (var, energy) = g.variance_affine(2.0, 3.0);
        assert!((var - 4.0).abs() < 1e-9);
        assert!((energy - 4.0).abs() < 1e-15);
    }

    #[test]
    fn halfgaussian_moments() {
        let h = NeedleMeasure::normalize(
            Interval::new(0.0, f64::INFINITY).unwrap(),
            ConvexWeight::gaussian(),
        )
        .unwrap();
        let m = h.moments();
        // mean sqrt(2/pi), variance 1 - 2/pi
        assert!((m.first - 0.79788456080286536).abs() < 1e-12);
        assert!((m.second - m.first * m.first - 0.36338022763241866).abs() < 1e-12);
    }

    #[test]
    fn translate_reflect_preserve_mass() {
        let m =
            NeedleMeasure::normalize(Interval::real_line(), ConvexWeight::vee(0.4, 0.6).unwrap())
                .unwrap();
        let t = m.translate(1.3);
        assert!((t.moments().mass - 1.0).abs() < 1e-12);
        let r = m.reflect();
        assert!((r.moments().mass - 1.0).abs() < 1e-12);
        // pushforward identities
        assert!((t.cdf(2.0) - m.cdf(0.7)).abs() < 1e-12);
        assert!((r.cdf(0.25) - m.sf(-0.25)).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_matches_halfline_gaussian() {
        let g = gaussian();
        let (half, _) = g.iso_profile_halfline(0.3).unwrap();
        let (brute, witness) = g.iso_profile_bruteforce(0.3, 3, 0.05).unwrap();
        assert!(brute >= half - 1e-6, "brute {brute} beats half-line {half}");
        assert!(brute <= half + 1e-9, "half-line is in the search space");
        assert!((g.mass(&witness) - 0.3).abs() < 1e-9);
    }

    #[test]
    fn bruteforce_single_interior_interval_is_worse() {
        let g = gaussian();
        let (half, _) = g.iso_profile_halfline(0.3).unwrap();
        // force a bounded interval by searching a domain-truncated measure:
        // enumerate k=1 interior candidates by hand on the grid
        let grid = 0.05;
        let mut best = f64::INFINITY;
        let mut x = -4.0;
        while x < 4.0 {
            let target = g.cdf(x) + 0.3;
            if target < 1.0 - 1e-9 {
                let y = g.quantile_r(target.min(1.0 - 1e-12), Side::Minus).unwrap();
                best = best.min(g.density(x) + g.density(y));
            }
            x += grid;
        }
        assert!(best > half);
    }

    #[test]
    fn bruteforce_respects_bounded_domain() {
        let m = NeedleMeasure::normalize(
            Interval::new(-1.5, 2.0).unwrap(),
            ConvexWeight::hinge(0.3, 0.4).unwrap(),
        )
        .unwrap();
        let (half, _) = m.iso_profile_halfline(0.5).unwrap();
        let (brute, witness) = m.iso_profile_bruteforce(0.5, 3, 0.02).unwrap();
        assert!(brute >= half - 1e-6);
        assert!(brute <= half + 1e-9);
        assert!((m.mass(&witness) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn bruteforce_rejects_bad_arguments() {
        let g = gaussian();
        assert!(g.iso_profile_bruteforce(0.3, 0, 0.1).is_err());
        assert!(g.iso_profile_bruteforce(0.3, 4, 0.1).is_err());
        assert!(g.iso_profile_bruteforce(0.3, 2, 0.0).is_err());
    }

    #[test]
    fn set_algebra_with_mass() {
        let g = gaussian();
        let a = IntervalSet::half_line_left(0.1);
        let b = IntervalSet::half_line_left(0.0);
        let (_, _, sym) = crate::interval::set_algebra(&a, &b);
        assert!((g.mass(&sym) - SYMDIFF_01).abs() < 1e-12);
        // additivity: mass(A△B) = mass(A∖B) + mass(B∖A)
        let d1 = g.mass(&a.difference(&b));
        let d2 = g.mass(&b.difference(&a));
        assert!((g.mass(&sym) - d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn integrate_matches_closed_forms() {
        let g = gaussian();
        let second = g.integrate(|x| x * x, &[]);
        assert!((second - 1.0).abs() < 1e-10);
        let m = NeedleMeasure::normalize(
            Interval::real_line(),
            ConvexWeight::hinge(-0.2, 0.7).unwrap(),
        )
        .unwrap();
        let mass = m.integrate(|_| 1.0, &[]);
        assert!((mass - 1.0).abs() < 1e-10);
        let mean_quad = m.integrate(|x| x, &[]);
        assert!((mean_quad - m.moments().first).abs() < 1e-10);
    }

    #[test]
    fn segment_exact_tilt_matches_shifted_gaussian() {
        // e^{-x²/2 - sx - c}: masses must reproduce the cdf translation
        let s = 0.8;
        let m = NeedleMeasure::normalize(Interval::real_line(), ConvexWeight::tilt(s)).unwrap();
        for x in [-2.0, -0.3, 0.0, 1.4] {
            let expected = special::normal_cdf(x + s);
            assert!((m.cdf(x) - expected).abs() < 1e-12, "x={x}");
        }
    }
}

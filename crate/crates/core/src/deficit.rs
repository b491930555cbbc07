//! Single-needle deficit analysis.
//!
//! For a needle oriented so that mass θ sits on `(-∞, a_θ]` and the left
//! half-line is the cheapest isoperimetric witness, the deficit is
//! `δ = e^{-ψ(a_θ)} - e^{-ψ_g(a_θ)} ≥ 0`. Small δ pins the whole weight
//! down: `ρ = ψ - ψ_g` is trapped between a linear lower envelope (exact,
//! valid on the whole domain) and a `√δ`-order upper envelope valid on a
//! window `[S, T]` whose ends run to ±∞ as δ → 0. The cut points solve
//!
//! ```text
//! (e^{-ψ_g(a_θ)}+δ) ∫_{a_θ}^{T} e^{-ψ'_+(a_θ)(x-a_θ) - (x-a_θ)²/2} dx = 1-θ-√δ
//! ```
//!
//! (mirrored for S), which reduces to a single normal-quantile evaluation.
//! On top of the report sit the symmetric-difference bound, the reverse
//! Poincaré ratio for affine functions, and the reverse log-Sobolev /
//! Talagrand witness constructions.

use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::measure::{NeedleMeasure, Side};
use crate::quad;
use crate::solve;
use crate::special;

/// Default ε for all exponent budgets (the theory leaves ε ∈ (0,1) free).
pub const EPSILON_DEFAULT: f64 = 0.1;

/// Regime threshold: δ up to `min(θ, 1-θ)³/100` counts as "small".
pub fn regime_threshold(theta: f64) -> f64 {
    let m = theta.min(1.0 - theta);
    m * m * m / 100.0
}

/// Model profile at `K = 1`: `e^{-ψ_g(a_θ)}`.
pub fn model_profile(theta: f64) -> f64 {
    special::normal_pdf(special::normal_quantile(theta))
}

/// The deficit report of an oriented needle at mass fraction θ.
#[derive(Debug, Clone, Copy)]
pub struct DeficitReport {
    pub theta: f64,
    pub a_theta: f64,
    /// Isoperimetric deficit at the left quantile (negative rounding
    /// clamped to zero).
    pub delta: f64,
    /// Slope gap `α = ψ'_+(a_θ) - a_θ`.
    pub alpha: f64,
    /// Upper cut point (`+∞` when δ = 0).
    pub t_cut: f64,
    /// Lower cut point (`-∞` when δ = 0).
    pub s_cut: f64,
    /// Gaussian tail mass `γ([T, ∞))`.
    pub tail_t: f64,
    /// Gaussian tail mass `γ((-∞, S])`.
    pub tail_s: f64,
    /// Whether δ is below the regime threshold for θ.
    pub in_regime: bool,
}

impl DeficitReport {
    /// The slope-to-deficit ratio `|α|/δ`, the needle's own calibration of
    /// the constant controlling `ψ'_+(a_θ) - a_θ` (zero when δ = 0).
    pub fn c3(&self) -> f64 {
        if self.delta > 0.0 {
            (self.alpha / self.delta).abs()
        } else {
            0.0
        }
    }

    /// First-order tail budget constant from the cut-point construction:
    /// with `C₃' = C₃ + 1`,
    /// `C₄ = C₃'/√(2π) + max(θ, 1-θ)·(e^{ψ_g(a_θ)} + C₃'·|a_θ|)`.
    pub fn tail_budget_constant(&self) -> f64 {
        tail_budget_constant(self.theta, self.a_theta, self.c3())
    }

    /// Both tails within `√δ + c4·δ + tol`.
    pub fn tails_within(&self, c4: f64, tol: f64) -> bool {
        if self.delta <= 0.0 {
            return true;
        }
        let budget = self.delta.sqrt() + c4 * self.delta + tol;
        self.tail_t <= budget && self.tail_s <= budget
    }

    /// The report is valid when δ is nonnegative (up to rounding) and the
    /// tails respect the self-calibrated budget.
    pub fn is_valid(&self) -> bool {
        self.delta >= -1e-10 && self.tails_within(self.tail_budget_constant(), 1e-9)
    }
}

/// See [`DeficitReport::tail_budget_constant`].
pub fn tail_budget_constant(theta: f64, a_theta: f64, c3: f64) -> f64 {
    let c3p = c3 + 1.0;
    let exp_psi_g = 1.0 / special::normal_pdf(a_theta);
    c3p / special::SQRT_2PI + theta.max(1.0 - theta) * (exp_psi_g + c3p * a_theta.abs())
}

/// Reflect and translate a needle so that (i) `mass((-∞, a_θ] ∩ I) = θ`
/// and (ii) the left half-line attains the half-line profile. Exact ties
/// keep the left orientation.
pub fn orient_for_theta(m: &NeedleMeasure, theta: f64) -> Result<NeedleMeasure> {
    let r_minus = m.quantile_r(theta, Side::Minus)?;
    let r_plus = m.quantile_r(theta, Side::Plus)?;
    let left = m.density(r_minus);
    let right = m.density(r_plus);
    let a = special::normal_quantile(theta);
    if right < left {
        let reflected = m.reflect();
        // the reflected left θ-quantile is -r_plus
        Ok(reflected.translate(a + r_plus))
    } else {
        Ok(m.translate(a - r_minus))
    }
}

fn check_oriented(m: &NeedleMeasure, theta: f64, a: f64) -> Result<()> {
    let mass_left = m.cdf(a);
    if (mass_left - theta).abs() > 1e-6 {
        return Err(Error::domain(format!(
            "needle is not oriented for theta={theta}: mass left of a_theta is {mass_left}"
        )));
    }
    Ok(())
}

/// Deficit report with δ read off the oriented weight.
pub fn deficit_report(m: &NeedleMeasure, theta: f64) -> Result<DeficitReport> {
    let a = special::normal_quantile(theta);
    let delta = m.density(a) - special::normal_pdf(a);
    report_with_delta(m, theta, delta)
}

/// Deficit report with an injected δ, for sensitivity sweeps and for
/// closed-form cut-point checks on the exact model.
pub fn deficit_report_with_delta(
    m: &NeedleMeasure,
    theta: f64,
    delta: f64,
) -> Result<DeficitReport> {
    report_with_delta(m, theta, delta)
}

fn report_with_delta(m: &NeedleMeasure, theta: f64, delta_raw: f64) -> Result<DeficitReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!(
            "theta must lie in (0,1), got {theta}"
        )));
    }
    let a = special::normal_quantile(theta);
    check_oriented(m, theta, a)?;
    if delta_raw < -1e-10 {
        return Err(Error::domain(format!(
            "negative deficit {delta_raw}: the needle beats the model profile"
        )));
    }
    let delta = delta_raw.max(0.0);
    let p = m.weight().eval(a).right_slope;
    let alpha = p - a;
    let in_regime = delta <= regime_threshold(theta);

    let (t_cut, s_cut, tail_t, tail_s) = if delta == 0.0 {
        (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0)
    } else {
        let sd = delta.sqrt();
        let scale =
            ((special::normal_pdf(a) + delta) * special::SQRT_2PI * (0.5 * p * p).exp()).recip();
        let target_t = special::normal_cdf(p) + (1.0 - theta - sd) * scale;
        let target_s = special::normal_cdf(p) - (theta - sd) * scale;
        let t_cut = if target_t < 1.0 {
            a - p + special::normal_quantile(target_t.max(f64::MIN_POSITIVE))
        } else {
            f64::INFINITY
        };
        let s_cut = if target_s > 0.0 {
            a - p + special::normal_quantile(target_s.min(1.0 - 1e-16))
        } else {
            f64::NEG_INFINITY
        };
        let tail_t = if t_cut.is_finite() {
            special::normal_sf(t_cut)
        } else {
            0.0
        };
        let tail_s = if s_cut.is_finite() {
            special::normal_cdf(s_cut)
        } else {
            0.0
        };
        (t_cut, s_cut, tail_t, tail_s)
    };

    Ok(DeficitReport {
        theta,
        a_theta: a,
        delta,
        alpha,
        t_cut,
        s_cut,
        tail_t,
        tail_s,
        in_regime,
    })
}

/// Envelope margins of `ρ = ψ - ψ_g` against the linear comparison
/// `α·(x - a_θ)`:
///
/// * `lower_margin`: min over the grid (∩ domain) of
///   `ρ(x) - α(x-a_θ) + e^{ψ_g(a_θ)}·δ` — the lower envelope is exact, not
///   asymptotic, so this must come out ≥ -1e-9;
/// * `upper_margin`: max over the grid ∩ [S, T] of `(ρ(x) - α(x-a_θ))/√δ`,
///   reported for scaling-trend analysis.
///
/// The needle's kinks and `a_θ` are always included as probe points.
pub fn envelope_check(m: &NeedleMeasure, report: &DeficitReport, grid: &[f64]) -> (f64, f64) {
    if report.delta <= 0.0 {
        return (0.0, 0.0);
    }
    let a = report.a_theta;
    let alpha = report.alpha;
    let lift = special::SQRT_2PI * (0.5 * a * a).exp() * report.delta;
    let sd = report.delta.sqrt();
    let domain = m.domain();
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let mut probe = |x: f64| {
        if !x.is_finite() || x < domain.lo || x > domain.hi {
            return;
        }
        let rho = m.weight().value(x) - (0.5 * x * x + special::LN_SQRT_2PI);
        let centered = rho - alpha * (x - a);
        lower = lower.min(centered + lift);
        if x >= report.s_cut && x <= report.t_cut {
            upper = upper.max(centered / sd);
        }
    };
    for &x in grid {
        probe(x);
    }
    for x in m.weight().breakpoints() {
        probe(x);
    }
    probe(a);
    (lower, upper)
}

/// Evenly spaced probe positions across the needle's effective support.
pub fn envelope_grid(m: &NeedleMeasure, step: f64) -> Vec<f64> {
    let (lo, hi) = m.effective_bounds();
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Output of [`symdiff_bound`].
#[derive(Debug, Clone, Copy)]
pub struct SymdiffBound {
    /// `P(A) - I_(I,m)(θ)`, the deficit of the competitor set.
    pub deficit: f64,
    /// Distance of `A` to the nearest extremal half-line, in measure.
    pub symdiff_min: f64,
    /// `deficit / symdiff_min`, `+∞` when the competitor is extremal.
    pub ratio: f64,
}

/// Quantitative form of the half-line reduction: a set of mass θ with
/// nearly minimal perimeter is close in measure to one of the two extremal
/// half-lines.
pub fn symdiff_bound(m: &NeedleMeasure, theta: f64, set: &IntervalSet) -> Result<SymdiffBound> {
    let mass = m.mass(set);
    if (mass - theta).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "competitor has mass {mass}, expected theta={theta}"
        )));
    }
    let (iso, _) = m.iso_profile_halfline(theta)?;
    let deficit = m.perimeter(set) - iso;
    let r_minus = m.quantile_r(theta, Side::Minus)?;
    let r_plus = m.quantile_r(theta, Side::Plus)?;
    let domain = m.domain();
    let h_minus = IntervalSet::half_line_left(r_minus).clip(&domain);
    let h_plus = IntervalSet::half_line_right(r_plus).clip(&domain);
    let d_minus = m.mass(&set.symmetric_difference(&h_minus));
    let d_plus = m.mass(&set.symmetric_difference(&h_plus));
    let symdiff_min = d_minus.min(d_plus);
    let ratio = if symdiff_min > 0.0 {
        deficit / symdiff_min
    } else {
        f64::INFINITY
    };
    Ok(SymdiffBound {
        deficit,
        symdiff_min,
        ratio,
    })
}

/// Variance-to-energy ratio of the coordinate function `u(x) = x`. The
/// Poincaré inequality caps it at 1; small deficit pushes it back towards
/// 1 from below.
pub fn reverse_poincare_needle(m: &NeedleMeasure) -> f64 {
    let (variance, energy) = m.variance_affine(1.0, 0.0);
    variance / energy
}

/// Outcome of the reverse log-Sobolev witness `f = 1 + ε·h`.
#[derive(Debug, Clone, Copy)]
pub struct LsiWitness {
    /// `∫ f log f dμ`.
    pub lhs: f64,
    /// `((1-ε‖h‖)/(1+ε‖h‖)) · (1/2λ) · ∫ |f'|²/f dμ`.
    pub rhs: f64,
    pub holds: bool,
    pub h_sup: f64,
}

/// One ν-weighted part of a witness computation: `(ν, needle, a, b)` with
/// the guiding function `u(x) = a·x + b` on that needle.
pub type WitnessPart<'a> = (f64, &'a NeedleMeasure, f64, f64);

/// Witness engine over a ν-weighted family of needles: truncate the
/// guiding function at ±σ, center it, and test `f = 1 + ε·h` against the
/// reverse log-Sobolev form at rate λ.
pub(crate) fn lsi_witness_weighted(
    parts: &[WitnessPart<'_>],
    sigma: f64,
    eps_amp: f64,
    lambda: f64,
) -> Result<LsiWitness> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!(
            "truncation level must be positive, got {sigma}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let clamp = |u: f64| u.clamp(-sigma, sigma);
    let breaks_for = |a: f64, b: f64| -> Vec<f64> {
        if a == 0.0 {
            Vec::new()
        } else {
            vec![(-sigma - b) / a, (sigma - b) / a]
        }
    };

    let mut mean = 0.0;
    for &(nu, m, a, b) in parts {
        mean += nu * m.integrate(|x| clamp(a * x + b), &breaks_for(a, b));
    }
    // u_σ is monotone on each needle, so its extremes sit at the domain ends
    let mut h_sup: f64 = 0.0;
    for &(_, m, a, b) in parts {
        let domain = m.domain();
        for end in [domain.lo, domain.hi] {
            let u_end = if a == 0.0 {
                b
            } else if end.is_finite() {
                a * end + b
            } else if (end > 0.0) == (a > 0.0) {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            h_sup = h_sup.max((clamp(u_end) - mean).abs());
        }
    }
    if h_sup > 0.0 && !(eps_amp.abs() < 0.5 / h_sup) {
        return Err(Error::domain(format!(
            "amplitude {eps_amp} too large: need |eps_amp| < {}",
            0.5 / h_sup
        )));
    }

    let mut lhs = 0.0;
    let mut grad_term = 0.0;
    for &(nu, m, a, b) in parts {
        let breaks = breaks_for(a, b);
        lhs += nu
            * m.integrate(
                |x| {
                    let f = 1.0 + eps_amp * (clamp(a * x + b) - mean);
                    f * f.ln()
                },
                &breaks,
            );
        grad_term += nu
            * m.integrate(
                |x| {
                    let u = a * x + b;
                    if u.abs() < sigma {
                        let f = 1.0 + eps_amp * (u - mean);
                        (eps_amp * a) * (eps_amp * a) / f
                    } else {
                        0.0
                    }
                },
                &breaks,
            );
    }
    let damping = (1.0 - eps_amp.abs() * h_sup) / (1.0 + eps_amp.abs() * h_sup);
    let rhs = damping / (2.0 * lambda) * grad_term;
    Ok(LsiWitness {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-10,
        h_sup,
    })
}

/// Reverse log-Sobolev witness on a single needle with `u(x) = a·x + b`.
pub fn reverse_lsi_witness(
    m: &NeedleMeasure,
    u_affine: (f64, f64),
    sigma: f64,
    eps_amp: f64,
    lambda: f64,
) -> Result<LsiWitness> {
    lsi_witness_weighted(&[(1.0, m, u_affine.0, u_affine.1)], sigma, eps_amp, lambda)
}

/// Outcome of the reverse Talagrand witness.
#[derive(Debug, Clone, Copy)]
pub struct TalagrandWitness {
    /// Quadratic Wasserstein distance `W₂(μ, m)²` by quantile coupling.
    pub w2_sq: f64,
    /// Relative entropy `∫ ρ log ρ dm`.
    pub ent: f64,
    pub holds: bool,
}

/// Check `W₂(μ, m)² ≥ (2/λ)·Ent(μ)` for `μ = ρ·m` with finite second
/// moment. `W₂` uses the one-dimensional quantile coupling.
pub fn talagrand_witness<F: Fn(f64) -> f64>(
    m: &NeedleMeasure,
    rho: F,
    lambda: f64,
) -> Result<TalagrandWitness> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let total = m.integrate(&rho, &[]);
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::domain(format!(
            "density does not normalize against the needle: mass {total}"
        )));
    }
    let ent = m.integrate(
        |x| {
            let r = rho(x);
            if r > 0.0 {
                r * r.ln()
            } else {
                0.0
            }
        },
        &[],
    );

    let table = CumulativeQuantile::build(m, &rho);
    let mut diff_sq = |p: f64| {
        let qm = m
            .quantile_r(p, Side::Minus)
            .expect("coupling probes stay inside (0,1)");
        let qmu = table.quantile(m, &rho, p);
        (qmu - qm) * (qmu - qm)
    };
    let mut w2_sq = 0.0;
    for w in coupling_edges().windows(2) {
        w2_sq += quad::gauss16(&mut diff_sq, w[0], w[1]);
    }
    Ok(TalagrandWitness {
        w2_sq,
        ent,
        holds: w2_sq >= 2.0 / lambda * ent - 1e-8,
    })
}

/// Graded panel edges for the quantile-coupling integral: logarithmic into
/// both corners, uniform in the bulk.
fn coupling_edges() -> Vec<f64> {
    let mut edges = vec![1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3];
    let mut x = 0.01;
    while x < 0.9899 {
        edges.push(x);
        x += 0.005;
    }
    for p in [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9] {
        edges.push(1.0 - p);
    }
    edges
}

/// Piecewise cumulative table for quantiles of `ρ·m`.
struct CumulativeQuantile {
    edges: Vec<f64>,
    cum: Vec<f64>,
    total: f64,
}

impl CumulativeQuantile {
    fn build<F: Fn(f64) -> f64>(m: &NeedleMeasure, rho: &F) -> Self {
        let (lo, hi) = m.effective_bounds();
        let mut coarse = vec![lo];
        for k in m.weight().breakpoints() {
            if k > lo && k < hi {
                coarse.push(k);
            }
        }
        coarse.push(hi);
        coarse.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut edges = Vec::new();
        for w in coarse.windows(2) {
            let n = ((w[1] - w[0]) / 0.05).ceil().max(1.0) as usize;
            for i in 0..n {
                edges.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
            }
        }
        edges.push(hi);
        let mut integrand = |x: f64| rho(x) * m.density(x);
        let mut cum = Vec::with_capacity(edges.len());
        cum.push(0.0);
        for w in edges.windows(2) {
            let inc = quad::gauss16(&mut integrand, w[0], w[1]).max(0.0);
            let last = *cum.last().unwrap();
            cum.push(last + inc);
        }
        let total = *cum.last().unwrap();
        CumulativeQuantile { edges, cum, total }
    }

    fn quantile<F: Fn(f64) -> f64>(&self, m: &NeedleMeasure, rho: &F, p: f64) -> f64 {
        let target = p.clamp(0.0, 1.0) * self.total;
        let mut lo = 0usize;
        let mut hi = self.cum.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cum[mid] <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let base = self.cum[lo];
        let (cell_lo, cell_hi) = (self.edges[lo], self.edges[hi]);
        solve::bisect_then_newton(
            |t| base + quad::gauss16(&mut |x| rho(x) * m.density(x), cell_lo, t) - target,
            |t| (rho(t) * m.density(t)).max(1e-300),
            cell_lo,
            cell_hi,
            1e-12,
        )
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle values keep all digits
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::weight::ConvexWeight;

    fn gaussian() -> NeedleMeasure {
        NeedleMeasure::standard_gaussian()
    }

    fn hinge_needle(position: f64, size: f64) -> NeedleMeasure {
        NeedleMeasure::normalize(
            Interval::real_line(),
            ConvexWeight::hinge(position, size).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn orientation_gaussian_is_fixed_point() {
        let g = gaussian();
        let o = orient_for_theta(&g, 0.3).unwrap();
        let a = special::normal_quantile(0.3);
        assert!((o.cdf(a) - 0.3).abs() < 1e-10);
        assert!((o.density(a) - special::normal_pdf(a)).abs() < 1e-10);
    }

    #[test]
    fn orientation_is_involutive_on_reflection() {
        let g = gaussian();
        let o = orient_for_theta(&g.reflect(), 0.3).unwrap();
        let a = special::normal_quantile(0.3);
        assert!((o.cdf(a) - 0.3).abs() < 1e-10);
    }

    #[test]
    fn orientation_prefers_cheaper_halfline() {
        // hinge with a cheaper right half-line gets reflected
        let m = hinge_needle(-0.3, 0.5);
        let theta = 0.3;
        let o = orient_for_theta(&m, theta).unwrap();
        let a = special::normal_quantile(theta);
        assert!((o.cdf(a) - theta).abs() < 1e-9);
        let (iso, _) = o.iso_profile_halfline(theta).unwrap();
        assert!((o.density(a) - iso).abs() < 1e-9);
    }

    #[test]
    fn gaussian_deficit_is_zero() {
        let g = gaussian();
        let r = deficit_report(&g, 0.5).unwrap();
        assert!(r.delta.abs() < 1e-12);
        assert!(r.alpha.abs() < 1e-12);
        assert_eq!(r.t_cut, f64::INFINITY);
        assert_eq!(r.s_cut, f64::NEG_INFINITY);
        assert!(r.in_regime);
        assert!(r.is_valid());
    }

    #[test]
    fn injected_delta_matches_closed_form_cut() {
        // mpmath: T for theta=0.5, delta=0.0025 on the exact model
        let g = gaussian();
        let r = deficit_report_with_delta(&g, 0.5, 0.0025).unwrap();
        assert!((r.t_cut - 1.6182682925396325).abs() < 1e-9);
        assert!((r.s_cut + 1.6182682925396325).abs() < 1e-9);
        assert!((r.tail_t - 0.05280239540009345).abs() < 1e-10);
        assert!(!r.in_regime); // 0.0025 > 0.5^3/100
        assert!(r.tails_within(r.tail_budget_constant(), 1e-12));
    }

    #[test]
    fn hinge_report_chain() {
        // frozen from the mpmath oriented-chain oracle (t=0.1, theta=0.3)
        let m = orient_for_theta(&hinge_needle(0.0, 0.1), 0.3).unwrap();
        let r = deficit_report(&m, 0.3).unwrap();
        assert!((r.delta - 0.0072310584).abs() < 1e-8);
        assert!((r.alpha - -0.0326583).abs() < 1e-6);
        assert!((r.t_cut - 1.21082).abs() < 1e-4);
        assert!((r.s_cut - -1.36011).abs() < 1e-4);
        assert!(r.s_cut < r.a_theta && r.a_theta < r.t_cut);
        assert!(r.is_valid());
    }

    #[test]
    fn envelope_gaussian_degenerate() {
        let g = gaussian();
        let r = deficit_report(&g, 0.5).unwrap();
        let (lo, hi) = envelope_check(&g, &r, &envelope_grid(&g, 0.05));
        assert_eq!((lo, hi), (0.0, 0.0));
    }

    #[test]
    fn envelope_hinge_family_lower_margin_exact() {
        for &t in &[0.4, 0.2, 0.1, 0.05] {
            let m = orient_for_theta(&hinge_needle(0.0, t), 0.3).unwrap();
            let r = deficit_report(&m, 0.3).unwrap();
            let (lower, upper) = envelope_check(&m, &r, &envelope_grid(&m, 0.01));
            assert!(lower >= -1e-9, "t={t}: lower margin {lower}");
            assert!(upper.is_finite() && upper > 0.0);
        }
    }

    #[test]
    fn alpha_window_along_family() {
        // |α| ≤ (C₃+1)·δ with C₃ calibrated at the largest δ
        let thetas = [0.3, 0.7];
        for &theta in &thetas {
            let mut c3_cal = None;
            for &t in &[0.4, 0.2, 0.1, 0.05, 0.025] {
                let m = orient_for_theta(&hinge_needle(0.0, t), theta).unwrap();
                let r = deficit_report(&m, theta).unwrap();
                let c3 = *c3_cal.get_or_insert_with(|| r.c3());
                assert!(
                    r.alpha.abs() <= (c3 + 1.0) * r.delta,
                    "theta={theta}, t={t}"
                );
            }
        }
    }

    #[test]
    fn symdiff_extremal_set_has_infinite_ratio() {
        let g = gaussian();
        let a = special::normal_quantile(0.3);
        let h = IntervalSet::half_line_left(a);
        let b = symdiff_bound(&g, 0.3, &h).unwrap();
        assert!(b.deficit.abs() < 1e-10);
        assert!(b.symdiff_min.abs() < 1e-10);
        assert!(b.ratio.is_infinite());
    }

    #[test]
    fn symdiff_two_sided_family_ratio_increases() {
        let g = gaussian();
        let theta = 0.3;
        let a = special::normal_quantile(theta);
        let mut prev_ratio = 0.0;
        let mut prev_deficit = f64::INFINITY;
        let mut s = 0.4;
        for _ in 0..5 {
            let eps = g.mass_between(a - s, a);
            let z = g.quantile_r(eps, Side::Plus).unwrap();
            let set = IntervalSet::half_line_left(a - s).union(&IntervalSet::half_line_right(z));
            let b = symdiff_bound(&g, theta, &set).unwrap();
            assert!(b.ratio > prev_ratio, "ratio must increase: {}", b.ratio);
            assert!(b.deficit < prev_deficit);
            prev_ratio = b.ratio;
            prev_deficit = b.deficit;
            s /= 4.0;
        }
    }

    #[test]
    fn symdiff_rejects_mass_mismatch() {
        let g = gaussian();
        let h = IntervalSet::half_line_left(0.0);
        assert!(symdiff_bound(&g, 0.3, &h).is_err());
    }

    #[test]
    fn reverse_poincare_gaussian_is_one() {
        let ratio = reverse_poincare_needle(&gaussian());
        assert!((ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reverse_poincare_hinge_stays_below_one() {
        let mut prev_gap = f64::INFINITY;
        for &t in &[0.4, 0.2, 0.1, 0.05, 0.025] {
            let m = hinge_needle(0.0, t);
            let ratio = reverse_poincare_needle(&m);
            assert!(ratio <= 1.0 + 1e-9);
            let gap = 1.0 - ratio;
            assert!(gap > 0.0 && gap < prev_gap, "gap must shrink with t");
            prev_gap = gap;
        }
    }

    #[test]
    fn lsi_witness_gaussian() {
        let g = gaussian();
        let w = reverse_lsi_witness(&g, (1.0, 0.0), 3.0, 0.1, 1.05).unwrap();
        assert!(w.holds, "lhs={} rhs={}", w.lhs, w.rhs);
        assert!(w.lhs > 0.0);
    }

    #[test]
    fn lsi_witness_zero_amplitude() {
        let g = gaussian();
        let w = reverse_lsi_witness(&g, (1.0, 0.0), 3.0, 0.0, 1.0).unwrap();
        assert!(w.lhs.abs() < 1e-14);
        assert!(w.rhs.abs() < 1e-14);
        assert!(w.holds);
    }

    #[test]
    fn lsi_witness_amplitude_guard() {
        let g = gaussian();
        // sup|h| is about sigma here, so 1/(2 sup) is about 1/6
        assert!(reverse_lsi_witness(&g, (1.0, 0.0), 3.0, 0.4, 1.0).is_err());
    }

    #[test]
    fn lsi_witness_on_hinge_with_measured_rate() {
        let m = hinge_needle(0.0, 0.1);
        let ratio = reverse_poincare_needle(&m);
        let w = reverse_lsi_witness(&m, (1.0, 0.0), 6.0, 0.05, 1.05 / ratio).unwrap();
        assert!(w.holds, "lhs={} rhs={}", w.lhs, w.rhs);
    }

    #[test]
    fn talagrand_identity_density() {
        let g = gaussian();
        let w = talagrand_witness(&g, |_| 1.0, 1.0).unwrap();
        assert!(w.w2_sq.abs() < 1e-9);
        assert!(w.ent.abs() < 1e-12);
        assert!(w.holds);
    }

    #[test]
    fn talagrand_gaussian_shift_closed_forms() {
        let g = gaussian();
        for &s in &[0.1, 0.5] {
            // dμ/dm for a mean-s Gaussian against the standard one
            let rho = move |x: f64| (s * x - 0.5 * s * s).exp();
            let w = talagrand_witness(&g, rho, 1.0).unwrap();
            assert!((w.w2_sq - s * s).abs() < 1e-6, "s={s}: w2²={}", w.w2_sq);
            assert!((w.ent - 0.5 * s * s).abs() < 1e-6, "s={s}: ent={}", w.ent);
            // lambda = 1 sits exactly at the Talagrand threshold
            assert!(w.holds);
            let strict = talagrand_witness(&g, rho, 0.9).unwrap();
            assert!(!strict.holds, "lambda below 1 must fail for a shift");
        }
    }

    #[test]
    fn talagrand_accepts_lsi_witness_density() {
        // feed the f = 1 + eps*h construction back through the coupling:
        // at a rate above the measured variance ratio, some amplitude in
        // the scan must produce a reverse-Talagrand witness
        let m = hinge_needle(0.0, 0.1);
        let ratio = reverse_poincare_needle(&m);
        let lambda = 1.05 / ratio;
        let sigma = 6.0;
        let mean = m.integrate(|x| x.clamp(-sigma, sigma), &[]);
        let mut held = false;
        for i in 1..=8 {
            let eps = i as f64 * 0.01;
            let rho = move |x: f64| 1.0 + eps * (x.clamp(-sigma, sigma) - mean);
            if let Ok(w) = talagrand_witness(&m, rho, lambda) {
                held |= w.holds;
            }
        }
        assert!(held, "no scanned amplitude produced a Talagrand witness");
    }

    #[test]
    fn talagrand_rejects_unnormalized_density() {
        let g = gaussian();
        assert!(talagrand_witness(&g, |_| 1.2, 1.0).is_err());
    }
}

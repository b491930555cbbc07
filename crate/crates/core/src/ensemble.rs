//! Weighted needle ensembles and the global pipeline.
//!
//! An ensemble is a finite ν-weighted family of needles, each carrying a
//! Borel set `A_q` of needle mass θ and a guiding offset identifying its
//! arc-length coordinate with the global guiding value `u`. The global
//! perimeter is `∑ ν_q P(A_q) + slack`, where the slack models the strict
//! inequality in the perimeter decomposition.
//!
//! On top of the contract sit the aggregate estimates: deficit
//! decomposition, classification into long and half-line-aligned needles,
//! the global reverse Poincaré inequality for the guiding function, the
//! nearly-centered needle set, and the main symmetric-difference estimate
//! against global sub- and super-level sets of `u`.

use crate::deficit::{self, EPSILON_DEFAULT};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::measure::{NeedleMeasure, Side};
use crate::special;

/// Per-needle mass tolerance for the construction contract.
pub const MASS_TOL: f64 = 1e-8;

/// One needle of an ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleEntry {
    /// ν-weight (normalized to total 1 at construction).
    pub nu: f64,
    pub needle: NeedleMeasure,
    /// The set `A_q`, in needle coordinates; mass must be θ.
    pub set: IntervalSet,
    /// `u = x + offset` on this needle.
    pub offset: f64,
}

/// A ν-weighted family of needles with a common guiding coordinate.
#[derive(Debug, Clone)]
pub struct NeedleEnsemble {
    entries: Vec<EnsembleEntry>,
    theta: f64,
    slack: f64,
    global_perimeter: f64,
}

/// Exponent `(1-ε)/(3-ε)` controlling the global variance budget.
pub fn variance_exponent(eps: f64) -> f64 {
    (1.0 - eps) / (3.0 - eps)
}

/// Exponent `2(1-ε)/(3(3-ε))` for the per-needle centering threshold.
pub fn centering_exponent(eps: f64) -> f64 {
    2.0 * (1.0 - eps) / (3.0 * (3.0 - eps))
}

/// Exponent `(1-ε)/(9-3ε)` of the main estimate.
pub fn main_exponent(eps: f64) -> f64 {
    (1.0 - eps) / (9.0 - 3.0 * eps)
}

/// Classification of the needles of an ensemble.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub delta_a: f64,
    /// Needles with per-needle deficit below `√δ(A)`.
    pub q_long: Vec<usize>,
    /// Long needles within `√δ(A)` of the left extremal half-line.
    pub q_minus: Vec<usize>,
    /// Long needles within `√δ(A)` of the right extremal half-line.
    pub q_plus: Vec<usize>,
    /// Needles whose guiding mean is within the centering budget.
    pub q_centered: Vec<usize>,
    pub nu_long: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub nu_centered: f64,
    /// `ν(Q_long) ≥ 1 - √δ(A)` (exact Markov consequence).
    pub long_mass_check: bool,
    /// `ν(Q_long ∖ (Q⁻ ∪ Q⁺)) ≤ √δ(A)`.
    pub aligned_mass_check: bool,
    /// `ν(Q_centered) ≥ 1 - δ(A)^{(1-ε)/(9-3ε)}`.
    pub centered_mass_check: bool,
}

/// Global reverse Poincaré data for the guiding function.
#[derive(Debug, Clone, Copy)]
pub struct GlobalPoincare {
    pub variance: f64,
    pub energy: f64,
    pub ratio: f64,
    /// `∑ ν_q (∫ u dμ_q)²`, the budget controlled by `1 - 1/Λ'`.
    pub mean_sq_integral: f64,
    /// Set when the ratio exceeds the Poincaré ceiling `1 + 1e-9`, which no
    /// honestly 1-convex ensemble can do.
    pub contract_violation: bool,
}

impl NeedleEnsemble {
    /// Assemble an ensemble and enforce the decomposition contract:
    /// positive weights (normalized here), per-needle set mass θ, and the
    /// perimeter identity `P(A) = ∑ ν_q P(A_q) + slack`.
    pub fn build(entries: Vec<EnsembleEntry>, theta: f64, slack: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::construction("an ensemble needs at least one needle"));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::construction(format!(
                "theta must lie in (0,1), got {theta}"
            )));
        }
        if !(slack >= 0.0) {
            return Err(Error::construction(format!(
                "slack must be nonnegative, got {slack}"
            )));
        }
        let mut total_nu = 0.0;
        for (i, e) in entries.iter().enumerate() {
            if !(e.nu > 0.0) {
                return Err(Error::construction(format!(
                    "entry {i}: weight must be positive, got {}",
                    e.nu
                )));
            }
            let mass = e.needle.mass(&e.set);
            if (mass - theta).abs() > MASS_TOL {
                return Err(Error::construction(format!(
                    "entry {i}: set mass {mass} violates the theta={theta} contract"
                )));
            }
            total_nu += e.nu;
        }
        let mut entries = entries;
        for e in &mut entries {
            e.nu /= total_nu;
        }
        let per_needle: f64 = entries
            .iter()
            .map(|e| e.nu * e.needle.perimeter(&e.set))
            .sum();
        Ok(NeedleEnsemble {
            entries,
            theta,
            slack,
            global_perimeter: per_needle + slack,
        })
    }

    pub fn entries(&self) -> &[EnsembleEntry] {
        &self.entries
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    pub fn global_perimeter(&self) -> f64 {
        self.global_perimeter
    }

    /// Model profile value at this ensemble's θ.
    pub fn model_profile(&self) -> f64 {
        deficit::model_profile(self.theta)
    }

    /// Global deficit `δ(A) = P(A) - I(θ)` and per-needle deficits
    /// `P(A_q) - I(θ)`; the global deficit dominates their ν-average.
    pub fn deficit_decomposition(&self) -> (f64, Vec<f64>) {
        let model = self.model_profile();
        let per_needle: Vec<f64> = self
            .entries
            .iter()
            .map(|e| e.needle.perimeter(&e.set) - model)
            .collect();
        (self.global_perimeter - model, per_needle)
    }

    pub fn delta_a(&self) -> f64 {
        self.global_perimeter - self.model_profile()
    }

    /// ν-weighted mean of the guiding function.
    pub fn global_mean(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.nu * (e.needle.moments().first + e.offset))
            .sum()
    }

    /// Shift every guiding offset by the common constant that centers `u`.
    pub fn center_guiding(&self) -> Self {
        let mean = self.global_mean();
        let mut out = self.clone();
        for e in &mut out.entries {
            e.offset -= mean;
        }
        out
    }

    /// Variance and energy of the guiding function (`|∇u| = 1` on every
    /// needle, so the energy is the total mass, i.e. 1).
    pub fn reverse_poincare_global(&self) -> GlobalPoincare {
        let mut mean = 0.0;
        let mut second = 0.0;
        let mut mean_sq_integral = 0.0;
        for e in &self.entries {
            let m = e.needle.moments();
            let needle_mean = m.first + e.offset;
            let needle_second = m.second + 2.0 * e.offset * m.first + e.offset * e.offset;
            mean += e.nu * needle_mean;
            second += e.nu * needle_second;
            mean_sq_integral += e.nu * needle_mean * needle_mean;
        }
        let variance = second - mean * mean;
        let energy = 1.0;
        let ratio = variance / energy;
        GlobalPoincare {
            variance,
            energy,
            ratio,
            mean_sq_integral,
            contract_violation: ratio > 1.0 + 1e-9,
        }
    }

    /// Left/right extremal half-lines of needle `q`, in needle coordinates.
    fn halflines(&self, q: usize) -> Result<(IntervalSet, IntervalSet)> {
        let e = &self.entries[q];
        let domain = e.needle.domain();
        let r_minus = e.needle.quantile_r(self.theta, Side::Minus)?;
        let r_plus = e.needle.quantile_r(self.theta, Side::Plus)?;
        Ok((
            IntervalSet::half_line_left(r_minus).clip(&domain),
            IntervalSet::half_line_right(r_plus).clip(&domain),
        ))
    }

    /// Classify needles: long needles (small per-needle deficit), needles
    /// aligned with either extremal half-line, and nearly-centered needles
    /// (self-calibrated threshold; see [`NeedleEnsemble::centered_needles`]
    /// for the frozen-calibration variant used in sweeps).
    pub fn classify(&self) -> Result<ClassificationReport> {
        let (delta_a, per_needle) = self.deficit_decomposition();
        let sqrt_da = delta_a.max(0.0).sqrt();
        let tol = 1e-12;
        let mut q_long = Vec::new();
        let mut q_minus = Vec::new();
        let mut q_plus = Vec::new();
        let mut nu_long = 0.0;
        let mut nu_minus = 0.0;
        let mut nu_plus = 0.0;
        for (q, e) in self.entries.iter().enumerate() {
            if per_needle[q] < sqrt_da + tol {
                q_long.push(q);
                nu_long += e.nu;
                let (h_minus, h_plus) = self.halflines(q)?;
                if e.needle.mass(&e.set.symmetric_difference(&h_minus)) <= sqrt_da + tol {
                    q_minus.push(q);
                    nu_minus += e.nu;
                }
                if e.needle.mass(&e.set.symmetric_difference(&h_plus)) <= sqrt_da + tol {
                    q_plus.push(q);
                    nu_plus += e.nu;
                }
            }
        }
        let mut nu_unaligned = 0.0;
        for &q in &q_long {
            if !q_minus.contains(&q) && !q_plus.contains(&q) {
                nu_unaligned += self.entries[q].nu;
            }
        }

        // nearly-centered needles, threshold self-calibrated from the
        // global variance budget
        let gp = self.reverse_poincare_global();
        let eps = EPSILON_DEFAULT;
        let (q_centered, nu_centered) = if delta_a > 0.0 {
            let c7 =
                gp.mean_sq_integral.max(f64::MIN_POSITIVE) / delta_a.powf(variance_exponent(eps));
            self.centered_needles(c7, centering_exponent(eps))
        } else {
            ((0..self.entries.len()).collect(), 1.0)
        };
        let centered_budget = if delta_a > 0.0 {
            delta_a.powf(main_exponent(eps))
        } else {
            0.0
        };

        Ok(ClassificationReport {
            delta_a,
            long_mass_check: nu_long >= 1.0 - sqrt_da - 1e-9,
            aligned_mass_check: nu_unaligned <= sqrt_da + 1e-9,
            centered_mass_check: nu_centered >= 1.0 - centered_budget - 1e-9,
            q_long,
            q_minus,
            q_plus,
            q_centered,
            nu_long,
            nu_minus,
            nu_plus,
            nu_centered,
        })
    }

    /// Needles with `(∫ u dμ_q)² ≤ c7 · δ(A)^budget`. Calibrate `c7` once
    /// per sweep family (at the largest in-regime deficit) and freeze it.
    pub fn centered_needles(&self, c7: f64, budget: f64) -> (Vec<usize>, f64) {
        let delta_a = self.delta_a().max(0.0);
        let threshold = c7 * delta_a.powf(budget);
        let mut idx = Vec::new();
        let mut nu = 0.0;
        for (q, e) in self.entries.iter().enumerate() {
            let needle_mean = e.needle.moments().first + e.offset;
            if needle_mean * needle_mean <= threshold + 1e-15 || delta_a == 0.0 {
                idx.push(q);
                nu += e.nu;
            }
        }
        (idx, nu)
    }

    /// Per-needle gaps `(|a_θ - r⁻_q|, |a_{1-θ} - r⁺_q|)` in the global
    /// guiding coordinate.
    pub fn quantile_gaps(&self) -> Result<Vec<(f64, f64)>> {
        let a = special::normal_quantile(self.theta);
        let a_upper = -a;
        let mut out = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let r_minus = e.needle.quantile_r(self.theta, Side::Minus)? + e.offset;
            let r_plus = e.needle.quantile_r(self.theta, Side::Plus)? + e.offset;
            out.push(((a - r_minus).abs(), (a_upper - r_plus).abs()));
        }
        Ok(out)
    }

    /// Minimal symmetric difference of `A` against the global sub-level set
    /// `{u ≤ a_θ}` and super-level set `{u ≥ a_{1-θ}}` (ties to minus).
    /// Not defined at θ = 1/2.
    pub fn main_symdiff(&self) -> Result<(Side, f64)> {
        if (self.theta - 0.5).abs() < 1e-12 {
            return Err(Error::unsupported(
                "theta = 1/2: no side of the level-set dichotomy can be certified small",
            ));
        }
        let a = special::normal_quantile(self.theta);
        let a_upper = -a;
        let mut value_minus = 0.0;
        let mut value_plus = 0.0;
        for e in &self.entries {
            let domain = e.needle.domain();
            let h_minus = IntervalSet::half_line_left(a - e.offset).clip(&domain);
            let h_plus = IntervalSet::half_line_right(a_upper - e.offset).clip(&domain);
            value_minus += e.nu * e.needle.mass(&e.set.symmetric_difference(&h_minus));
            value_plus += e.nu * e.needle.mass(&e.set.symmetric_difference(&h_plus));
        }
        if value_minus <= value_plus {
            Ok((Side::Minus, value_minus))
        } else {
            Ok((Side::Plus, value_plus))
        }
    }

    /// `min(ν(Q⁻), ν(Q⁺))` plus the coarea slice bound: the mean slice mass
    /// of `A` across the middle third window between `a_θ` and `a_{1-θ}` in
    /// global coordinates.
    pub fn min_side_mass(&self, report: &ClassificationReport) -> Result<(f64, f64)> {
        if (self.theta - 0.5).abs() < 1e-12 {
            return Err(Error::unsupported(
                "theta = 1/2: the side masses cannot be separated",
            ));
        }
        let a = special::normal_quantile(self.theta);
        let a_upper = -a;
        let r1 = (2.0 * a + a_upper) / 3.0;
        let r2 = (a + 2.0 * a_upper) / 3.0;
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        let mut slice_mass = 0.0;
        for e in &self.entries {
            let window = IntervalSet::interval(lo - e.offset, hi - e.offset)?;
            slice_mass += e.nu * e.needle.mass(&e.set.intersection(&window));
        }
        let min_side = report.nu_minus.min(report.nu_plus);
        Ok((min_side, slice_mass / (hi - lo)))
    }

    /// The complemented ensemble: `A_q ↦ domain ∖ A_q`, `θ ↦ 1-θ`.
    pub fn complement(&self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let domain = e.needle.domain();
                let full = IntervalSet::interval(domain.lo, domain.hi)
                    .expect("domains are valid intervals");
                EnsembleEntry {
                    nu: e.nu,
                    needle: e.needle.clone(),
                    set: full.difference(&e.set),
                    offset: e.offset,
                }
            })
            .collect();
        NeedleEnsemble::build(entries, 1.0 - self.theta, self.slack)
    }

    /// Reverse log-Sobolev witness across the whole ensemble, with the
    /// guiding field `u = x + offset_q` truncated at ±σ.
    pub fn lsi_witness(
        &self,
        sigma: f64,
        eps_amp: f64,
        lambda: f64,
    ) -> Result<deficit::LsiWitness> {
        let parts: Vec<deficit::WitnessPart<'_>> = self
            .entries
            .iter()
            .map(|e| (e.nu, &e.needle, 1.0, e.offset))
            .collect();
        deficit::lsi_witness_weighted(&parts, sigma, eps_amp, lambda)
    }
}

//! Synthetic product-space ensembles and perturbation sweeps.
//!
//! The rigidity configuration is a product `ℝ × Σ` with a Gaussian factor:
//! one needle per fiber point, every needle standard Gaussian, every set
//! the same half-space slice. A scalar intensity then deforms the picture
//! in one of three ways:
//!
//! * `hinge` — each fiber's weight gets a one-sided kink (positions spread
//!   over [-1, 1]); set endpoints are re-solved so each needle keeps mass
//!   θ. Produces honest positive deficits shrinking with the intensity.
//! * `flip` — a leading fraction of fibers switches from the left to the
//!   right extremal half-line. Exercises the two-sided classification and
//!   the side-mass flagging.
//! * `offset` — guiding offsets become ±intensity in alternation. The
//!   resulting variance exceeds the Poincaré ceiling, so these ensembles
//!   get flagged as violating the curvature contract.

use crate::ensemble::{EnsembleEntry, NeedleEnsemble};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::measure::{NeedleMeasure, Side};
use crate::weight::ConvexWeight;

/// The deformation applied per fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perturbation {
    Hinge,
    Flip,
    Offset,
}

impl std::str::FromStr for Perturbation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hinge" => Ok(Perturbation::Hinge),
            "flip" => Ok(Perturbation::Flip),
            "offset" => Ok(Perturbation::Offset),
            other => Err(Error::format(format!(
                "unknown perturbation {other:?} (expected hinge, flip or offset)"
            ))),
        }
    }
}

/// A discretized product space: fiber weights, mass fraction, perturbation
/// kind, and an optional perimeter slack.
#[derive(Debug, Clone)]
pub struct ProductSpec {
    pub fiber_weights: Vec<f64>,
    pub theta: f64,
    pub perturbation: Perturbation,
    pub slack: f64,
}

/// One row of a perturbation sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub intensity: f64,
    pub delta_a: f64,
    pub symdiff: f64,
    pub side: Side,
    pub ratio: f64,
    pub mean_sq_integral: f64,
    pub min_side: f64,
    pub slice_bound: f64,
    pub nu_long: f64,
    pub long_check: bool,
    pub aligned_check: bool,
    pub centered_check: bool,
    pub poincare_flagged: bool,
}

impl ProductSpec {
    pub fn new(
        fiber_weights: Vec<f64>,
        theta: f64,
        perturbation: Perturbation,
        slack: f64,
    ) -> Result<Self> {
        if fiber_weights.is_empty() {
            return Err(Error::construction("need at least one fiber"));
        }
        if fiber_weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::construction("fiber weights must be positive"));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::construction(format!(
                "theta must lie in (0,1), got {theta}"
            )));
        }
        if !(slack >= 0.0) {
            return Err(Error::construction("slack must be nonnegative"));
        }
        Ok(ProductSpec {
            fiber_weights,
            theta,
            perturbation,
            slack,
        })
    }

    pub fn uniform(
        fibers: usize,
        theta: f64,
        perturbation: Perturbation,
        slack: f64,
    ) -> Result<Self> {
        Self::new(vec![1.0; fibers.max(1)], theta, perturbation, slack)
    }

    /// Kink position for fiber `i`, spread evenly over [-1, 1].
    fn kink_position(&self, i: usize) -> f64 {
        let n = self.fiber_weights.len();
        if n == 1 {
            0.0
        } else {
            -1.0 + 2.0 * i as f64 / (n - 1) as f64
        }
    }

    /// Build the ensemble at a given intensity. `t = 0` reproduces the
    /// exact rigidity configuration for every perturbation kind.
    pub fn build(&self, intensity: f64) -> Result<NeedleEnsemble> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::construction(format!(
                "intensity must be a nonnegative real, got {intensity}"
            )));
        }
        let n = self.fiber_weights.len();
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let entry = match self.perturbation {
                Perturbation::Hinge => {
                    let weight = ConvexWeight::hinge(self.kink_position(i), intensity)?;
                    let needle = NeedleMeasure::normalize(Interval::real_line(), weight)?;
                    // re-solve the set endpoint so the mass contract holds
                    let r = needle.quantile_r(self.theta, Side::Minus)?;
                    EnsembleEntry {
                        nu: self.fiber_weights[i],
                        needle,
                        set: IntervalSet::half_line_left(r),
                        offset: 0.0,
                    }
                }
                Perturbation::Flip => {
                    let needle = NeedleMeasure::standard_gaussian();
                    let flipped = (i as f64) < intensity * n as f64 - 0.5;
                    let set = if flipped {
                        let r = needle.quantile_r(self.theta, Side::Plus)?;
                        IntervalSet::half_line_right(r)
                    } else {
                        let r = needle.quantile_r(self.theta, Side::Minus)?;
                        IntervalSet::half_line_left(r)
                    };
                    EnsembleEntry {
                        nu: self.fiber_weights[i],
                        needle,
                        set,
                        offset: 0.0,
                    }
                }
                Perturbation::Offset => {
                    let needle = NeedleMeasure::standard_gaussian();
                    let r = needle.quantile_r(self.theta, Side::Minus)?;
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    EnsembleEntry {
                        nu: self.fiber_weights[i],
                        needle,
                        set: IntervalSet::half_line_left(r),
                        offset: sign * intensity,
                    }
                }
            };
            entries.push(entry);
        }
        NeedleEnsemble::build(entries, self.theta, self.slack)
    }

    /// Run the full pipeline at one intensity.
    pub fn run(&self, intensity: f64) -> Result<SweepRow> {
        let ensemble = self.build(intensity)?.center_guiding();
        let gp = ensemble.reverse_poincare_global();
        let report = ensemble.classify()?;
        let (side, symdiff) = ensemble.main_symdiff()?;
        let (min_side, slice_bound) = ensemble.min_side_mass(&report)?;
        Ok(SweepRow {
            intensity,
            delta_a: report.delta_a,
            symdiff,
            side,
            ratio: gp.ratio,
            mean_sq_integral: gp.mean_sq_integral,
            min_side,
            slice_bound,
            nu_long: report.nu_long,
            long_check: report.long_mass_check,
            aligned_check: report.aligned_mass_check,
            centered_check: report.centered_mass_check,
            poincare_flagged: gp.contract_violation,
        })
    }

    /// Sweep a decreasing intensity schedule (a trailing 0 row is allowed
    /// for the rigidity limit).
    pub fn sweep(&self, intensities: &[f64]) -> Result<Vec<SweepRow>> {
        if intensities.is_empty() {
            return Err(Error::domain("sweep needs at least one intensity"));
        }
        for w in intensities.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::domain("intensities must be strictly decreasing"));
            }
        }
        if intensities.iter().any(|&t| !(t >= 0.0)) {
            return Err(Error::domain("intensities must be nonnegative"));
        }
        intensities.iter().map(|&t| self.run(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::main_exponent;

    #[test]
    fn rigidity_row() {
        let spec = ProductSpec::uniform(8, 0.3, Perturbation::Hinge, 0.0).unwrap();
        let row = spec.run(0.0).unwrap();
        assert!(row.delta_a.abs() < 1e-9);
        assert!(row.symdiff < 1e-9);
        assert!((row.ratio - 1.0).abs() < 1e-9);
        assert_eq!(row.min_side, 0.0);
        assert!(!row.poincare_flagged);
    }

    #[test]
    fn hinge_sweep_deficit_decreases() {
        let spec = ProductSpec::uniform(16, 0.3, Perturbation::Hinge, 0.0).unwrap();
        let rows = spec.sweep(&[0.4, 0.2, 0.1, 0.05]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].delta_a < w[0].delta_a);
        }
        assert!(rows.iter().all(|r| r.delta_a > 0.0));
        assert!(rows.iter().all(|r| r.long_check && r.aligned_check));
        assert!(rows.iter().all(|r| !r.poincare_flagged));
    }

    #[test]
    fn hinge_sweep_symdiff_scaling_bounded() {
        let spec = ProductSpec::uniform(16, 0.3, Perturbation::Hinge, 0.0).unwrap();
        let rows = spec.sweep(&[0.4, 0.2, 0.1, 0.05]).unwrap();
        let exponent = main_exponent(0.1);
        let cal = rows[0].symdiff / rows[0].delta_a.powf(exponent);
        for r in &rows {
            let scaled = r.symdiff / r.delta_a.powf(exponent);
            assert!(scaled <= 2.0 * cal, "scaled={scaled}, calibrated={cal}");
        }
    }

    #[test]
    fn flip_puts_mass_on_plus_side() {
        let spec = ProductSpec::uniform(10, 0.3, Perturbation::Flip, 0.0).unwrap();
        let ens = spec.build(0.1).unwrap();
        let report = ens.classify().unwrap();
        assert!((report.nu_plus - 0.1).abs() < 1e-12);
        assert!((report.nu_minus - 0.9).abs() < 1e-12);
    }

    #[test]
    fn offset_sweep_gets_flagged() {
        let spec = ProductSpec::uniform(4, 0.3, Perturbation::Offset, 0.0).unwrap();
        let row = spec.run(0.5).unwrap();
        assert!(row.poincare_flagged);
        assert!(row.ratio > 1.0 + 1e-9);
    }

    #[test]
    fn fiber_permutation_invariance() {
        // permuting fiber labels permutes kink positions; aggregates over
        // a symmetric position set stay identical under label reversal
        let spec = ProductSpec::uniform(9, 0.3, Perturbation::Hinge, 0.0).unwrap();
        let row = spec.run(0.2).unwrap();
        let reversed = ProductSpec::new(
            spec.fiber_weights.iter().rev().copied().collect(),
            0.3,
            Perturbation::Hinge,
            0.0,
        )
        .unwrap();
        let row_rev = reversed.run(0.2).unwrap();
        assert!((row.delta_a - row_rev.delta_a).abs() < 1e-12);
        assert!((row.symdiff - row_rev.symdiff).abs() < 1e-12);
    }

    #[test]
    fn sweep_schedule_validation() {
        let spec = ProductSpec::uniform(4, 0.3, Perturbation::Hinge, 0.0).unwrap();
        assert!(spec.sweep(&[]).is_err());
        assert!(spec.sweep(&[0.1, 0.2]).is_err());
        assert!(spec.sweep(&[0.2, 0.2]).is_err());
        assert!(spec.sweep(&[0.2, 0.1, 0.0]).is_ok());
    }

    #[test]
    fn negative_intensity_is_rejected() {
        let spec = ProductSpec::uniform(4, 0.3, Perturbation::Hinge, 0.0).unwrap();
        assert!(spec.build(-0.1).is_err());
    }
}

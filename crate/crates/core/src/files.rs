//! On-disk description formats (TOML).
//!
//! Three record kinds are supported:
//!
//! * weight families — one record per weight: knot list, end slopes,
//!   domain;
//! * ensembles — θ, slack, and entries (ν, inline weight, set, offset);
//!   one set endpoint per entry may be the string `"solve"`, in which case
//!   the loader re-solves it so the entry's mass is exactly θ;
//! * product sweeps — fiber count or explicit weights, θ, perturbation and
//!   an intensity schedule.
//!
//! Endpoints accept numbers or the strings `"inf"`, `"+inf"`, `"-inf"`.

use serde::Deserialize;

use crate::ensemble::{EnsembleEntry, NeedleEnsemble};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::measure::NeedleMeasure;
use crate::product::{Perturbation, ProductSpec};
use crate::solve;
use crate::weight::ConvexWeight;

/// A numeric endpoint, an infinity tag, or `"solve"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EndpointSpec {
    Number(f64),
    Tag(String),
}

impl EndpointSpec {
    fn resolve(&self) -> Result<Option<f64>> {
        match self {
            EndpointSpec::Number(x) => Ok(Some(*x)),
            EndpointSpec::Tag(tag) => match tag.as_str() {
                "inf" | "+inf" => Ok(Some(f64::INFINITY)),
                "-inf" => Ok(Some(f64::NEG_INFINITY)),
                "solve" => Ok(None),
                other => Err(Error::format(format!(
                    "unknown endpoint tag {other:?} (expected a number, inf, -inf or solve)"
                ))),
            },
        }
    }
}

/// One weight record: knots, end slopes, optional domain (defaults to ℝ).
#[derive(Debug, Clone, Deserialize)]
pub struct WeightRecord {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub knots: Vec<[f64; 2]>,
    pub left_slope: f64,
    pub right_slope: f64,
    #[serde(default)]
    pub domain: Option<[EndpointSpec; 2]>,
}

impl WeightRecord {
    pub fn weight(&self) -> Result<ConvexWeight> {
        ConvexWeight::new(
            self.knots.iter().map(|&[k, v]| (k, v)).collect(),
            self.left_slope,
            self.right_slope,
        )
    }

    pub fn domain(&self) -> Result<Interval> {
        match &self.domain {
            None => Ok(Interval::real_line()),
            Some([lo, hi]) => {
                let lo = lo
                    .resolve()?
                    .ok_or_else(|| Error::format("domain endpoints cannot be solved"))?;
                let hi = hi
                    .resolve()?
                    .ok_or_else(|| Error::format("domain endpoints cannot be solved"))?;
                Interval::new(lo, hi)
            }
        }
    }

    pub fn to_measure(&self) -> Result<NeedleMeasure> {
        NeedleMeasure::normalize(self.domain()?, self.weight()?)
    }
}

/// A weight-family file: `[[weight]]` records.
#[derive(Debug, Clone, Deserialize)]
pub struct WeightFamilyFile {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default)]
    pub weight: Vec<WeightRecord>,
}

impl WeightFamilyFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: WeightFamilyFile =
            toml::from_str(text).map_err(|e| Error::format(e.to_string()))?;
        if file.weight.is_empty() {
            return Err(Error::format(
                "weight family file has no [[weight]] records",
            ));
        }
        Ok(file)
    }

    pub fn find(&self, name: &str) -> Result<&WeightRecord> {
        self.weight
            .iter()
            .find(|w| w.name == name)
            .ok_or_else(|| Error::format(format!("no weight named {name:?} in family file")))
    }
}

/// One ensemble entry: ν-weight, inline weight spec, set, guiding offset.
#[derive(Debug, Clone, Deserialize)]
pub struct EnsembleEntryRecord {
    pub nu: f64,
    #[serde(default)]
    pub offset: f64,
    pub set: Vec<[EndpointSpec; 2]>,
    pub weight: WeightRecord,
}

/// An ensemble file: θ, slack and `[[entry]]` records.
#[derive(Debug, Clone, Deserialize)]
pub struct EnsembleFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub theta: f64,
    #[serde(default)]
    pub slack: f64,
    pub entry: Vec<EnsembleEntryRecord>,
}

impl EnsembleFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: EnsembleFile = toml::from_str(text).map_err(|e| Error::format(e.to_string()))?;
        if file.entry.is_empty() {
            return Err(Error::format("ensemble file has no [[entry]] records"));
        }
        Ok(file)
    }

    pub fn to_ensemble(&self) -> Result<NeedleEnsemble> {
        let mut entries = Vec::with_capacity(self.entry.len());
        for (i, rec) in self.entry.iter().enumerate() {
            let needle = rec
                .weight
                .to_measure()
                .map_err(|e| Error::format(format!("entry {i}: {e}")))?;
            let set = resolve_set(&needle, self.theta, &rec.set)
                .map_err(|e| Error::format(format!("entry {i}: {e}")))?;
            entries.push(EnsembleEntry {
                nu: rec.nu,
                needle,
                set,
                offset: rec.offset,
            });
        }
        NeedleEnsemble::build(entries, self.theta, self.slack)
    }
}

/// Build an interval set from endpoint specs, re-solving at most one
/// `"solve"` endpoint so the set's mass is exactly θ.
fn resolve_set(
    needle: &NeedleMeasure,
    theta: f64,
    spec: &[[EndpointSpec; 2]],
) -> Result<IntervalSet> {
    let mut solve_at: Option<(usize, usize)> = None;
    let mut endpoints: Vec<[f64; 2]> = Vec::with_capacity(spec.len());
    for (i, [lo, hi]) in spec.iter().enumerate() {
        let lo = match lo.resolve()? {
            Some(x) => x,
            None => {
                if solve_at.replace((i, 0)).is_some() {
                    return Err(Error::format("at most one endpoint may be \"solve\""));
                }
                f64::NAN
            }
        };
        let hi = match hi.resolve()? {
            Some(x) => x,
            None => {
                if solve_at.replace((i, 1)).is_some() {
                    return Err(Error::format("at most one endpoint may be \"solve\""));
                }
                f64::NAN
            }
        };
        endpoints.push([lo, hi]);
    }
    let build = |endpoints: &[[f64; 2]]| -> Result<IntervalSet> {
        let mut parts = Vec::with_capacity(endpoints.len());
        for &[lo, hi] in endpoints {
            parts.push(Interval::new(lo, hi)?);
        }
        Ok(IntervalSet::from_intervals(parts))
    };
    let Some((comp, side)) = solve_at else {
        return build(&endpoints);
    };

    // bracket the free endpoint inside the needle's effective support
    let (mut lo_b, mut hi_b) = needle.effective_bounds();
    if side == 0 {
        hi_b = hi_b.min(endpoints[comp][1]);
    } else {
        lo_b = lo_b.max(endpoints[comp][0]);
    }
    let mass_at = |z: f64| -> f64 {
        let mut pts = endpoints.clone();
        pts[comp][side] = z;
        match build(&pts) {
            Ok(set) => needle.mass(&set),
            Err(_) => f64::NAN,
        }
    };
    let f_lo = mass_at(lo_b) - theta;
    let f_hi = mass_at(hi_b) - theta;
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::format(format!(
            "cannot solve endpoint: mass range [{:.6}, {:.6}] does not reach theta={theta}",
            f_lo + theta,
            f_hi + theta
        )));
    }
    let z = solve::bisect_secant(|z| mass_at(z) - theta, lo_b, hi_b, 1e-13, 1e-13);
    endpoints[comp][side] = z;
    build(&endpoints)
}

/// A product-sweep file.
#[derive(Debug, Clone, Deserialize)]
pub struct ProductFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub theta: f64,
    pub perturbation: String,
    #[serde(default)]
    pub fibers: Option<usize>,
    #[serde(default)]
    pub fiber_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub slack: f64,
    pub intensities: Vec<f64>,
}

impl ProductFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::format(e.to_string()))
    }

    pub fn to_spec(&self) -> Result<ProductSpec> {
        let perturbation: Perturbation = self.perturbation.parse()?;
        match (&self.fiber_weights, self.fibers) {
            (Some(w), _) => ProductSpec::new(w.clone(), self.theta, perturbation, self.slack),
            (None, Some(n)) => ProductSpec::uniform(n, self.theta, perturbation, self.slack),
            (None, None) => Err(Error::format(
                "product file needs either fibers or fiber_weights",
            )),
        }
    }
}

//! Numerical laboratory for the quantitative Bakry–Ledoux isoperimetric
//! inequality at needle scale.
//!
//! The crate models one-dimensional log-concave "needles" — probability
//! measures `e^{-ψ} dx` on a closed interval with a 1-convex weight `ψ` —
//! and the machinery built on top of them:
//!
//! * [`gauss`] — the Gaussian model space: density, distribution, quantiles,
//!   the model isoperimetric profile and its derivatives and tail bounds.
//! * [`profile`] — the diameter-bounded model profile obtained by minimizing
//!   truncated Gaussian windows, with the explicit gap bound.
//! * [`interval`] — finite unions of intervals with exact set algebra.
//! * [`weight`] — 1-convex weights `x²/2 + (convex piecewise linear) + c`,
//!   exactly representable and exactly integrable per linear segment.
//! * [`measure`] — needle measures: masses, moments, quantiles, perimeter,
//!   Minkowski content, and the isoperimetric profile both through the
//!   half-line reduction and through a brute-force interval search.
//! * [`deficit`] — the single-needle deficit analysis: deficit, slope, cut
//!   points, weight envelopes, symmetric-difference bounds, the reverse
//!   Poincaré ratio, and reverse log-Sobolev / Talagrand witnesses.
//! * [`ensemble`] — weighted families of needles with a common guiding
//!   coordinate: deficit decomposition, needle classification, the global
//!   reverse Poincaré inequality and the main symmetric-difference estimate.
//! * [`product`] — synthetic product-space ensembles and perturbation
//!   sweeps used by the verification harness.
//! * [`files`] — on-disk description formats for weights, ensembles and
//!   product sweeps.

// negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deficit;
pub mod ensemble;
pub mod error;
pub mod files;
pub mod gauss;
pub mod interval;
pub mod measure;
pub mod product;
pub mod profile;
#[allow(clippy::excessive_precision)]
pub mod quad;
pub mod solve;
#[allow(clippy::excessive_precision)]
pub mod special;
pub mod weight;

pub use error::{Error, Result};
pub use gauss::GaussianModel;
pub use interval::{Interval, IntervalSet};
pub use measure::NeedleMeasure;
pub use weight::ConvexWeight;

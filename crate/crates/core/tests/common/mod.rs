//! Shared helpers for integration tests: deterministic pseudo-random
//! 1-convex weights and domains.

use needlelab::interval::Interval;
use needlelab::measure::NeedleMeasure;
use needlelab::weight::ConvexWeight;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random 1-convex weight built from a random left slope and random
/// nonnegative slope increments at random kink positions, on a random
/// domain (full line, half-line, or bounded).
pub fn random_needle(rng: &mut ChaCha8Rng) -> NeedleMeasure {
    let n_knots = rng.gen_range(0..=3usize);
    let weight = if n_knots == 0 {
        ConvexWeight::tilt(rng.gen_range(-0.8..0.8))
    } else {
        let mut positions: Vec<f64> = (0..n_knots).map(|_| rng.gen_range(-1.5..1.5)).collect();
        positions.sort_by(|a, b| a.partial_cmp(b).unwrap());
        positions.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        let mut slope = rng.gen_range(-1.0..0.2);
        let left_slope = slope;
        let mut knots = Vec::with_capacity(positions.len());
        let mut value = 0.0;
        let mut prev = positions[0];
        for &k in &positions {
            value += slope * (k - prev);
            knots.push((k, value));
            slope += rng.gen_range(0.05..0.9);
            prev = k;
        }
        ConvexWeight::new(knots, left_slope, slope).expect("construction is convex")
    };
    let domain = match rng.gen_range(0..10) {
        0 => Interval::new(rng.gen_range(-3.5..-2.0), f64::INFINITY).unwrap(),
        1 => Interval::new(rng.gen_range(-3.5..-2.0), rng.gen_range(2.0..3.5)).unwrap(),
        _ => Interval::real_line(),
    };
    NeedleMeasure::normalize(domain, weight).expect("weights normalize")
}

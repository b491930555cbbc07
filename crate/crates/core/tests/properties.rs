//! Property-based invariants over randomly generated 1-convex needles and
//! interval sets.

mod common;

use needlelab::deficit;
use needlelab::gauss::GaussianModel;
use needlelab::interval::{set_algebra, Interval, IntervalSet};
use needlelab::measure::Side;
use proptest::prelude::*;
use rand::Rng;

fn set_strategy() -> impl Strategy<Value = IntervalSet> {
    proptest::collection::vec((-4.0f64..4.0, 0.0f64..2.5), 0..4).prop_map(|parts| {
        IntervalSet::from_intervals(
            parts
                .into_iter()
                .map(|(lo, len)| Interval::new(lo, lo + len).unwrap())
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_convexity_midpoint_inequality(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let w = needle.weight();
        for _ in 0..200 {
            let x = rng.gen_range(-4.0..4.0);
            let y = rng.gen_range(-4.0..4.0);
            let t = rng.gen_range(0.0..1.0);
            let mid = (1.0 - t) * x + t * y;
            let lhs = w.value(mid);
            let rhs = (1.0 - t) * w.value(x) + t * w.value(y)
                - 0.5 * t * (1.0 - t) * (x - y) * (x - y);
            prop_assert!(lhs <= rhs + 1e-12, "midpoint inequality failed at ({x},{y},{t})");
        }
    }

    #[test]
    fn canonical_form_is_sorted_disjoint(set in set_strategy()) {
        for w in set.components().windows(2) {
            prop_assert!(w[0].hi < w[1].lo, "components must be separated by strict gaps");
        }
        for comp in set.components() {
            prop_assert!(comp.lo < comp.hi);
        }
    }

    #[test]
    fn set_algebra_mass_identities(seed in any::<u64>(), a in set_strategy(), b in set_strategy()) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let (union, intersection, symdiff) = set_algebra(&a, &b);
        let ma = needle.mass(&a);
        let mb = needle.mass(&b);
        prop_assert!((needle.mass(&union) + needle.mass(&intersection) - ma - mb).abs() < 1e-12);
        let split = needle.mass(&a.difference(&b)) + needle.mass(&b.difference(&a));
        prop_assert!((needle.mass(&symdiff) - split).abs() < 1e-12);
        prop_assert!(a.symmetric_difference(&a).is_empty());
    }

    #[test]
    fn perimeter_of_complement(seed in any::<u64>(), set in set_strategy()) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let domain = needle.domain();
        let clipped = set.clip(&domain);
        let complement = IntervalSet::interval(domain.lo, domain.hi)
            .unwrap()
            .difference(&clipped);
        prop_assert!((needle.perimeter(&clipped) - needle.perimeter(&complement)).abs() < 1e-12);
    }

    #[test]
    fn cdf_monotone_and_mass_one(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        prop_assert!((needle.moments().mass - 1.0).abs() < 1e-9);
        let (lo, hi) = needle.effective_bounds();
        let mut prev = 0.0;
        for i in 0..=100 {
            let x = lo + (hi - lo) * i as f64 / 100.0;
            let c = needle.cdf(x);
            prop_assert!(c + 1e-14 >= prev, "cdf must be nondecreasing");
            prop_assert!((c + needle.sf(x) - 1.0).abs() < 1e-11);
            prev = c;
        }
    }

    #[test]
    fn quantile_routes_agree(seed in any::<u64>(), theta in 0.02f64..0.98) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let via_rootfind = needle.quantile_r(theta, Side::Minus).unwrap();
        let via_pieces = needle.quantile_mass(theta).unwrap();
        prop_assert!((via_rootfind - via_pieces).abs() < 1e-9,
            "quantile routes disagree: {via_rootfind} vs {via_pieces}");
        // r-(theta) = r+(1-theta)
        let plus = needle.quantile_r(1.0 - theta, Side::Plus).unwrap();
        prop_assert!((via_rootfind - plus).abs() < 1e-9);
    }

    #[test]
    fn halfline_profile_dominates_model(seed in any::<u64>(), theta in 0.05f64..0.95) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let model = GaussianModel::standard();
        let (value, witness) = needle.iso_profile_halfline(theta).unwrap();
        prop_assert!(value >= model.profile_inf(theta).unwrap() - 1e-8,
            "sharp lower bound violated");
        prop_assert!((needle.mass(&witness) - theta).abs() < 1e-9);
    }

    #[test]
    fn minkowski_dominates_perimeter(seed in any::<u64>(), set in set_strategy()) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let clipped = set.clip(&needle.domain());
        let content = needle
            .minkowski_content(&clipped, &[1e-4, 1e-5, 1e-6])
            .unwrap();
        prop_assert!(content >= needle.perimeter(&clipped) - 1e-6);
    }

    #[test]
    fn orientation_normalizes_quantile(seed in any::<u64>(), theta in 0.1f64..0.9) {
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let oriented = deficit::orient_for_theta(&needle, theta).unwrap();
        let a = needlelab::special::normal_quantile(theta);
        prop_assert!((oriented.cdf(a) - theta).abs() < 1e-8);
        let (iso, _) = oriented.iso_profile_halfline(theta).unwrap();
        prop_assert!(oriented.density(a) <= iso + 1e-9,
            "left half-line must attain the half-line profile after orientation");
        // the deficit is nonnegative by the sharp isoperimetric inequality
        let report = deficit::deficit_report(&oriented, theta).unwrap();
        prop_assert!(report.delta >= 0.0);
    }

    #[test]
    fn lower_envelope_is_exact_for_any_deficit(seed in any::<u64>(), theta in 0.15f64..0.85) {
        // the linear lower envelope comes from convexity alone, so it must
        // hold whether or not delta is small
        let mut rng = common::rng(seed);
        let needle = common::random_needle(&mut rng);
        let oriented = deficit::orient_for_theta(&needle, theta).unwrap();
        let report = deficit::deficit_report(&oriented, theta).unwrap();
        let grid = deficit::envelope_grid(&oriented, 0.02);
        let (lower, _) = deficit::envelope_check(&oriented, &report, &grid);
        prop_assert!(lower >= -1e-9, "lower margin {lower} at theta {theta}");
    }
}

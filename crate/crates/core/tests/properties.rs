use proptest::prelude::*;

use biharp::atomic::{classify, level_set};
use biharp::factorize::{interpolation_check, InterpolationParams};
use biharp::haar::{hp_norm, multiplier_apply};
use biharp::harness::{generate_one, random_unit_ball, EnsembleKind, EnsembleSpec};
use biharp::{pietsch_weights, HaarExpansion, MultiplierSequence, Normalization};

fn expansion() -> impl Strategy<Value = HaarExpansion> {
    (any::<u64>(), 0u32..=3, 0.05f64..=1.0).prop_map(|(seed, l, density)| {
        let spec = EnsembleSpec::new(EnsembleKind::SparseRandom { density }, l, 1, seed);
        generate_one(&spec, 0).unwrap()
    })
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(1.5), Just(2.0), 0.2f64..=2.0]
}

/// Multiplier drawn from `seed` with values in `[-bound, bound]`.
fn multiplier(f: &HaarExpansion, seed: u64, bound: f64, signs_only: bool) -> MultiplierSequence {
    let mut state = seed | 1;
    MultiplierSequence::from_entries(f.support().map(|r| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let u = (state >> 11) as f64 / (1u64 << 53) as f64;
        let v = if signs_only {
            if u < 0.5 {
                -1.0
            } else {
                1.0
            }
        } else {
            bound * (2.0 * u - 1.0)
        };
        (*r, v)
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(f in expansion()) {
        let a = hp_norm(&f, 2.0).unwrap();
        let b = f.h2_norm_coeff();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn unconditionality(f in expansion(), p in exponent(), seed in any::<u64>()) {
        let g = multiplier_apply(&f, &multiplier(&f, seed, 1.0, true));
        let (a, b) = (hp_norm(&f, p).unwrap(), hp_norm(&g, p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn contractivity(f in expansion(), p in exponent(), seed in any::<u64>(), bound in 0.0f64..3.0) {
        let phi = multiplier(&f, seed, bound, false);
        let lhs = hp_norm(&multiplier_apply(&f, &phi), p).unwrap();
        prop_assert!(lhs <= phi.sup_norm() * hp_norm(&f, p).unwrap() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn monotone_in_coefficient_modulus(f in expansion(), p in exponent(), seed in any::<u64>()) {
        let phi = multiplier(&f, seed, 1.0, false);
        let smaller = multiplier_apply(&f, &phi);
        prop_assert!(hp_norm(&smaller, p).unwrap() <= hp_norm(&f, p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn level_sets_are_nested(f in expansion(), n in -6i32..6) {
        let g = f.default_resolution();
        let outer = level_set(&f, n, g).unwrap();
        let inner = level_set(&f, n + 1, g).unwrap();
        prop_assert!(inner.is_subset(&outer).unwrap());
    }

    #[test]
    fn levels_partition_the_support(f in expansion(), p in exponent()) {
        let dec = classify(&f, p).unwrap();
        let mut seen = 0;
        let mut rebuilt = HaarExpansion::new(f.max_level()).unwrap();
        for level in dec.levels() {
            seen += level.rects.len();
            for (r, v) in level.atom.iter() {
                rebuilt.add(*r, v).unwrap();
            }
        }
        prop_assert_eq!(seen, f.support_len());
        prop_assert_eq!(rebuilt, f);
    }

    #[test]
    fn weights_sum_to_one(f in expansion(), p in exponent()) {
        let w = pietsch_weights(&f, &classify(&f, p).unwrap(), Normalization::B).unwrap();
        prop_assert!((w.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(w.iter().all(|(_, om)| om > 0.0));
    }

    #[test]
    fn scaling_by_powers_of_two(f in expansion(), p in exponent(), k in -3i32..=3) {
        let c = 2f64.powi(k);
        let d0 = classify(&f, p).unwrap();
        let d1 = classify(&f.scale(-c), p).unwrap();
        prop_assert!((d1.b() - c.powf(p) * d0.b()).abs() <= 1e-12 * d1.b());
        for (a, b) in d0.levels().iter().zip(d1.levels()) {
            prop_assert_eq!(a.n + k, b.n);
            prop_assert_eq!(&a.rects, &b.rects);
        }
        let w0 = pietsch_weights(&f, &d0, Normalization::B).unwrap();
        let w1 = pietsch_weights(&f.scale(-c), &d1, Normalization::B).unwrap();
        for (r, om) in w0.iter() {
            prop_assert!((w1.weight(r) - om).abs() <= 1e-12);
        }
    }

    #[test]
    fn interpolation_upper_bound(f in expansion(), p in 0.3f64..2.0, theta in 0.05f64..0.95, seed in any::<u64>()) {
        let g = random_unit_ball(&f, seed).unwrap();
        let rep = interpolation_check(&f, &g, &InterpolationParams::new(p, theta).unwrap()).unwrap();
        prop_assert!(rep.upper_margin >= -1e-9 * rep.upper_bound);
    }

    #[test]
    fn interpolation_exponent_round_trip(p in 0.2f64..1.95, theta in 0.01f64..0.99) {
        let ip = InterpolationParams::new(p, theta).unwrap();
        prop_assert!(ip.identity_defect() <= 1e-12);
        let back = InterpolationParams::from_q(p, ip.q).unwrap();
        prop_assert!((back.theta - theta).abs() <= 1e-9);
    }
}

//! Invariants checked on generated inputs.

mod common;

use common::*;
use morrey_core::blocks::{finite_decomposition, regroup_dyadic};
use morrey_core::duality::{block_associate_norm, second_associate_check, MorreyOracle, Verdict};
use morrey_core::gallery::{morrey_norm_exact_1d, StepFunction1D};
use morrey_core::hausdorff::{content_1d, content_1d_brute_force, ContentQuery, IntervalSet};
use morrey_core::morrey::{check_embedding, dilation_check};
use morrey_core::propcheck::fatou_harness;
use morrey_core::rational::{self, Rational};
use morrey_core::{block_norm, morrey_norm, CubeFamily, GridDomain, GridFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A grid function on a 1-D or 2-D power-of-two grid.
fn grid_function(max_1d: u32, max_2d: u32) -> impl Strategy<Value = GridFunction> {
    (1usize..=2, 1u32..=max_1d.max(max_2d), 0.25f64..2.0).prop_flat_map(move |(dim, log, h)| {
        let log = if dim == 1 { log.min(max_1d) } else { log.min(max_2d) };
        let n = 1usize << log;
        let d = GridDomain::new(dim, n, h).unwrap();
        prop::collection::vec(prop_oneof![Just(0.0), -3.0f64..3.0], d.cell_count())
            .prop_map(move |v| GridFunction::new(d, v).unwrap())
    })
}

/// Two functions on the same grid.
fn grid_pair(max_1d: u32, max_2d: u32) -> impl Strategy<Value = (GridFunction, GridFunction)> {
    grid_function(max_1d, max_2d).prop_flat_map(|f| {
        let d = *f.domain();
        prop::collection::vec(prop_oneof![Just(0.0), -3.0f64..3.0], d.cell_count())
            .prop_map(move |v| (f.clone(), GridFunction::new(d, v).unwrap()))
    })
}

fn nonnegative(max_1d: u32, max_2d: u32) -> impl Strategy<Value = GridFunction> {
    grid_function(max_1d, max_2d).prop_map(|f| f.abs())
}

fn interval_set(max_parts: usize) -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((1i128..40, 1i128..40), 1..=max_parts).prop_map(|gaps| {
        let mut x = rational::integer(0);
        let mut parts = Vec::new();
        for (g, l) in gaps {
            x += Rational::new(g, 8);
            let end = x + Rational::new(l, 8);
            parts.push((x, end));
            x = end;
        }
        IntervalSet::new(parts).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn morrey_matches_direct_summation(f in grid_function(5, 3)) {
        let fast = morrey_norm(&f, &pq(), CubeFamily::All).value;
        let slow = brute_morrey(&f, 2.0, 4.0 / 3.0);
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1e-300));
    }

    #[test]
    fn morrey_is_homogeneous_and_subadditive((f, g) in grid_pair(4, 2), c in -5.0f64..5.0) {
        let n = |x: &GridFunction| morrey_norm(x, &pq(), CubeFamily::All).value;
        prop_assert!((n(&f.scale(c).unwrap()) - c.abs() * n(&f)).abs() <= 1e-12 * n(&f).max(1e-300) * c.abs().max(1.0));
        prop_assert!(n(&f.add(&g).unwrap()) <= (n(&f) + n(&g)) * (1.0 + 1e-12));
    }

    #[test]
    fn dyadic_family_never_exceeds_all_cubes(f in grid_function(5, 3)) {
        let all = morrey_norm(&f, &pq(), CubeFamily::All).value;
        let dyadic = morrey_norm(&f, &pq(), CubeFamily::Dyadic).value;
        prop_assert!(dyadic <= all * (1.0 + 1e-15));
    }

    #[test]
    fn embedding_holds(f in grid_function(4, 2), r in 0.3f64..1.3) {
        prop_assert!(check_embedding(&f, 2.0, 4.0 / 3.0, r).unwrap().holds);
    }

    #[test]
    fn dilation_scales_by_the_exponent(f in grid_function(4, 2), k in 1u32..=2) {
        let rep = dilation_check(&f, &pq(), k).unwrap();
        prop_assert!(rep.holds);
        prop_assert!(rep.rel_error <= 1e-10);
    }

    #[test]
    fn block_associate_is_the_morrey_norm(g in grid_function(4, 2)) {
        let a = block_associate_norm(&g, &pq(), CubeFamily::All).unwrap();
        let m = brute_morrey(&g, 2.0, 4.0 / 3.0);
        prop_assert!((a - m).abs() <= 1e-10 * m.max(1e-300));
    }

    #[test]
    fn exact_engine_dominates_the_grid(f in grid_function(5, 1)) {
        prop_assume!(f.domain().dimension() == 1);
        let grid = morrey_norm(&f, &pq(), CubeFamily::All).value;
        let exact = morrey_norm_exact_1d(&StepFunction1D::from_grid(&f).unwrap(), &pq()).unwrap().value;
        prop_assert!(exact >= grid * (1.0 - 1e-12));
    }

    #[test]
    fn content_dp_matches_enumeration(e in interval_set(8), d in prop_oneof![Just(0.25), Just(0.5), Just(1.0), 0.1f64..1.0], r in prop_oneof![Just(f64::INFINITY), 0.2f64..20.0]) {
        let q = ContentQuery::new(d, r).unwrap();
        prop_assert_eq!(content_1d(&e, &q).unwrap(), content_1d_brute_force(&e, &q).unwrap());
    }

    #[test]
    fn full_dimension_content_is_length(e in interval_set(8)) {
        let c = content_1d(&e, &ContentQuery::unrestricted(1.0).unwrap()).unwrap();
        let len = rational::to_f64(&e.total_length().unwrap());
        prop_assert!((c - len).abs() <= 1e-12 * len);
    }

    #[test]
    fn rationals_round_trip(x in -1e12f64..1e12) {
        prop_assert_eq!(rational::to_f64(&rational::from_f64(x).unwrap()), x);
    }

    #[test]
    fn grid_json_round_trips(f in grid_function(4, 2)) {
        let back = GridFunction::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn regrouping_preserves_the_function(seed in any::<u64>(), dim in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_domain(&mut rng, dim, if dim == 1 { 16 } else { 4 });
        let dec = random_decomposition(&mut rng, d, &pq(), 2.0);
        let out = regroup_dyadic(&dec).unwrap();
        let before = synthesize_direct(&dec, &d);
        prop_assert!(sup_diff(&before, &synthesize_direct(&out, &d)) <= 1e-12 * before.iter().fold(1e-300f64, |m, v| m.max(v.abs())));
        prop_assert!(out.terms.iter().all(|t| block_ok(&t.block, 2.0, 4.0 / 3.0)));
        prop_assert!(out.weight() <= dec.weight() * 3f64.powi(dim as i32) * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn block_certificates_are_sound(f in nonnegative(3, 2)) {
        let cert = block_norm(&f, &pq(), 1e-3, CubeFamily::All).unwrap();
        prop_assert!(cert.lower <= cert.upper * (1.0 + 1e-12));
        prop_assert!(cert.gap <= 1e-3);
        if !f.is_zero() {
            prop_assert_eq!(verify_certificate(&f, &cert, 2.0, 4.0 / 3.0), Ok(()));
        }
    }

    #[test]
    fn block_norm_dominates_morrey_pairings((f, g) in grid_pair(3, 2)) {
        prop_assume!(!g.is_zero());
        let cert = block_norm(&f, &pq(), 1e-3, CubeFamily::All).unwrap();
        let bound = brute_pairing(&f, &g).abs() / brute_morrey(&g, 2.0, 4.0 / 3.0);
        prop_assert!(bound <= cert.upper * (1.0 + 1e-10));
    }

    #[test]
    fn finite_decompositions_stay_within_twice_the_norm(f in nonnegative(3, 2)) {
        prop_assume!(!f.is_zero());
        let fd = finite_decomposition(&f, &pq(), 1e-2, None).unwrap();
        prop_assert!(fd.weight >= fd.norm_lower * (1.0 - 1e-12));
        prop_assert!(fd.weight <= 2.0 * (1.0 + 1e-2) * fd.norm_lower);
    }

    #[test]
    fn truncations_increase_to_the_block_norm(f in nonnegative(3, 2)) {
        let rep = fatou_harness(&pq(), &f, 6, 1e-3).unwrap();
        prop_assert!(rep.passed, "{:?}", rep.violations);
    }

    #[test]
    fn morrey_second_associate_returns(f in grid_function(3, 1)) {
        let oracle = MorreyOracle { pq: pq(), family: CubeFamily::All };
        let rep = second_associate_check(&f, &oracle, 1e-3).unwrap();
        prop_assert_ne!(rep.verdict, Verdict::Fail);
    }
}

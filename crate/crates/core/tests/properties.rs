use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use pmstat::convergence::{splice, IndexedSequence, Recipe};
use pmstat::distfn::{levy_distance, StepDistFn};
use pmstat::pmspace::{FinitePMSpace, PointId};
use pmstat::summability::{ai_density, fin_limit, Ideal, IndexSet, SummMatrix};
use pmstat::triangle::{TNorm, TriangleFn, TriangleOp};

const DL_TOL: f64 = 1e-7;

fn step_fn() -> impl Strategy<Value = StepDistFn> {
    (prop::collection::btree_set(1u32..=24, 1..=4), prop::collection::vec(0.05f64..1.0, 4), any::<bool>()).prop_map(
        |(locs, mut values, proper)| {
            let locs: Vec<f64> = locs.into_iter().map(|k| f64::from(k) / 8.0).collect();
            values.truncate(locs.len());
            values.sort_by(f64::total_cmp);
            if proper {
                *values.last_mut().unwrap() = 1.0;
            }
            StepDistFn::new(locs.into_iter().zip(values).collect()).unwrap()
        },
    )
}

fn index_set() -> impl Strategy<Value = IndexSet> {
    let leaf = prop_oneof![
        Just(IndexSet::Evens),
        Just(IndexSet::Odds),
        Just(IndexSet::Squares),
        Just(IndexSet::PowersOfTwo),
        (2u32..=6).prop_map(|e| IndexSet::SparseBlocks { exponent: e }),
        (2usize..=7, prop::collection::btree_set(0usize..7, 1..=3)).prop_map(|(m, r)| {
            let r: Vec<usize> = r.into_iter().filter(|&x| x < m).collect();
            IndexSet::residues(m, if r.is_empty() { &[0] } else { &r })
        }),
        prop::collection::btree_set(1usize..500, 0..8)
            .prop_map(|s| IndexSet::finite(&s.into_iter().collect::<Vec<_>>())),
        (1usize..300, 0usize..300).prop_map(|(lo, w)| IndexSet::Range { lo, hi: lo + w }),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| s.complement()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IndexSet::union(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| IndexSet::intersection(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn levy_is_a_bounded_symmetric_metric(f in step_fn(), g in step_fn(), h in step_fn()) {
        let fg = levy_distance(&f, &g, DL_TOL).unwrap();
        prop_assert_eq!(fg, levy_distance(&g, &f, DL_TOL).unwrap());
        prop_assert!((0.0..=1.0).contains(&fg));
        prop_assert!(levy_distance(&f, &f, DL_TOL).unwrap() <= 2.0 * DL_TOL);
        let via = levy_distance(&f, &h, DL_TOL).unwrap() + levy_distance(&h, &g, DL_TOL).unwrap();
        prop_assert!(fg <= via + 3e-6, "{} > {}", fg, via);
    }

    #[test]
    fn closed_form_to_eps0_matches_bisection(f in step_fn(), b in 0.0f64..3.0) {
        let e0 = StepDistFn::eps0();
        assert_abs_diff_eq!(f.levy_to_eps0(), levy_distance(&f, &e0, DL_TOL).unwrap(), epsilon = 2e-6);
        let step = StepDistFn::unit_step(b).unwrap();
        assert_abs_diff_eq!(step.levy_to_eps0(), b.min(1.0), epsilon = 1e-12);
    }

    #[test]
    fn neighbourhood_membership_tracks_levy_distance(f in step_fn(), t in 0.01f64..1.5) {
        let d = f.levy_to_eps0();
        prop_assume!((d - t).abs() > 1e-9);
        prop_assert_eq!(f.evaluate(t) > 1.0 - t, d < t);
    }

    #[test]
    fn sup_convolution_is_commutative_with_identity(f in step_fn(), g in step_fn(), which in 0usize..3) {
        let tnorm = [TNorm::Min, TNorm::Product, TNorm::Lukasiewicz][which];
        let op = TriangleFn::sup_conv(tnorm, 1e-3).unwrap();
        prop_assert_eq!(op.apply(&f, &g), op.apply(&g, &f));
        prop_assert_eq!(op.apply(&f, &StepDistFn::eps0()), f.clone());
        // A sup-convolution never exceeds either argument shifted to zero.
        let h = op.apply(&f, &g);
        for x in [0.1, 0.5, 1.0, 2.0, 4.0, 7.0] {
            prop_assert!(h.evaluate(x) <= f.evaluate(x).min(g.evaluate(x)) + 1e-12);
        }
    }

    #[test]
    fn maximal_triangle_is_pointwise_min(f in step_fn(), g in step_fn(), x in 0.0f64..4.0) {
        let h = TriangleFn::Maximal.apply(&f, &g);
        prop_assert_eq!(h.evaluate(x), f.evaluate(x).min(g.evaluate(x)));
    }

    #[test]
    fn counting_matches_enumeration(set in index_set(), n in 0usize..2000) {
        let brute = (1..=n).filter(|&k| set.contains(k)).count();
        prop_assert_eq!(set.count_upto(n), brute);
        prop_assert_eq!(set.members_upto(n).len(), brute);
        prop_assert!(!set.contains(0));
    }

    #[test]
    fn set_expressions_round_trip_through_text(set in index_set()) {
        let text = set.to_string();
        let back: IndexSet = text.parse().unwrap();
        for k in 1..400 {
            prop_assert_eq!(back.contains(k), set.contains(k), "{} at {}", text, k);
        }
    }

    #[test]
    fn splicing_agrees_off_the_set(set in index_set(), k in 1usize..1000) {
        let x = IndexedSequence::new("x", Recipe::Alternate { parts: vec![(IndexSet::Evens, PointId(1))], default: PointId(2) });
        let y = splice(&x, set.clone(), PointId(0));
        let want = if set.contains(k) { x.at(k) } else { PointId(0) };
        prop_assert_eq!(y.at(k), want);
    }

    #[test]
    fn converged_limits_have_small_residuals(
        base in -1.0f64..1.0,
        noise in prop::collection::vec(-0.05f64..0.05, 200),
        decay in 0.0f64..2.0,
        tol in 0.001f64..0.1,
    ) {
        let y: Vec<f64> = noise.iter().enumerate().map(|(i, e)| base + e * decay / (1.0 + i as f64).sqrt()).collect();
        let v = fin_limit(&y, tol).unwrap();
        if v.converged() {
            prop_assert!(v.residual <= tol);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn complement_densities_sum_to_one(m in 2usize..=8, r in prop::collection::btree_set(0usize..8, 1..=4), admissible in any::<bool>()) {
        let r: Vec<usize> = r.into_iter().filter(|&x| x < m).collect();
        prop_assume!(!r.is_empty());
        let set = IndexSet::residues(m, &r);
        let ideal = if admissible { Ideal::DensityZero(SummMatrix::Cesaro) } else { Ideal::Fin };
        let d = ai_density(&SummMatrix::Cesaro, &ideal, &set, 4000, 0.01).unwrap();
        let c = ai_density(&SummMatrix::Cesaro, &ideal, &set.complement(), 4000, 0.01).unwrap();
        prop_assert!(d.verdict().converged() && c.verdict().converged());
        assert_abs_diff_eq!(d.value + c.value, 1.0, epsilon = 0.01);
        assert_abs_diff_eq!(d.value, r.len() as f64 / m as f64, epsilon = 0.01);
    }

    #[test]
    fn neighbourhood_forms_agree_on_line_spaces(slots in prop::collection::btree_set(0u32..=48, 2..=6)) {
        let pos: Vec<f64> = slots.into_iter().map(|k| f64::from(k) / 16.0).collect();
        let space = FinitePMSpace::line(&pos).unwrap();
        prop_assert!(space.validate_axioms().passed);
        for t in space.gap_grid() {
            for p in space.points() {
                prop_assert_eq!(
                    space.strong_neighborhood(p, t).unwrap(),
                    space.strong_neighborhood_levy(p, t, DL_TOL).unwrap()
                );
            }
        }
    }
}

use coopjump::model::{fig4_params, fig5_params, params_from_geometry, Geometry};
use coopjump::rates::{period_statistics, transition_rates};
use coopjump::trajectories::{count_jumps, segment_window_levels};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rates_are_a_valid_chain(r in 0.55f64..4.0, v in any::<bool>()) {
        let base = if v { fig4_params() } else { fig5_params() };
        let rs = transition_rates(&params_from_geometry(&base, &Geometry::equilateral(r)).unwrap()).unwrap();
        for (_, x) in rs.neighbours() {
            prop_assert!(x > 0.0);
        }
        prop_assert!(rs.max_skip() <= 1e-10 * rs.max_rate());
        let ps = period_statistics(&rs).unwrap();
        prop_assert!((ps.occupation_sum() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn segmentation_is_idempotent(levels in prop::collection::vec(0usize..4, 1..200), w in 0.01f64..1.0) {
        let dur = levels.len() as f64 * w;
        let once = segment_window_levels(&levels, w, dur);
        let twice = segment_window_levels(&once.window_levels(w), w, dur);
        prop_assert_eq!(&twice.periods, &once.periods);
        prop_assert_eq!(twice.absorbed_islands, 0);
        prop_assert!(once.periods.windows(2).all(|p| p[0].level != p[1].level && p[0].end == p[1].start));
    }

    #[test]
    fn counts_account_for_every_boundary(levels in prop::collection::vec(0usize..4, 1..200), t_m in 0.0f64..3.0) {
        let tr = segment_window_levels(&levels, 1.0, levels.len() as f64);
        let c = count_jumps(&tr, 4, t_m);
        prop_assert_eq!((c.k.sum() + c.unresolved.sum()) as usize, tr.periods.len() - 1);
        prop_assert!((c.total_time - levels.len() as f64).abs() < 1e-9);
        prop_assert!(c.triple_jumps <= c.double_jumps);
    }
}

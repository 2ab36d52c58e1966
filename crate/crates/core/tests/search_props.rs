use proptest::prelude::*;
use webfps::platform::{ClusterKind, ProcessorSetting};
use webfps::search::{exhaustive_oracle, SettingTable};

fn make_settings(n: usize) -> Vec<ProcessorSetting> {
    (0..n)
        .map(|i| ProcessorSetting {
            render_cluster: if i < n / 2 {
                ClusterKind::Little
            } else {
                ClusterKind::Big
            },
            render_freq: 0.4 + 0.1 * i as f64,
            other_freq: 0.4,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Both search modes always return an in-range index and never
    /// panic, for any monotone non-decreasing FPS ladder and any
    /// positive target.
    #[test]
    fn searches_stay_in_bounds(
        increments in prop::collection::vec(0.0f64..15.0, 2..20),
        base in 1.0f64..30.0,
        fps_min in 0.1f64..120.0,
    ) {
        let mut fps = Vec::with_capacity(increments.len());
        let mut acc = base;
        for d in &increments {
            acc += d;
            fps.push(acc);
        }
        let n = fps.len();
        let settings = make_settings(n);
        let lookup: Vec<(u64, f64)> = settings
            .iter()
            .zip(&fps)
            .map(|(s, &f)| (s.render_freq.to_bits(), f))
            .collect();
        let predict = move |s: &ProcessorSetting| {
            lookup
                .iter()
                .find(|(fr, _)| *fr == s.render_freq.to_bits())
                .map(|(_, f)| *f)
                .unwrap()
        };
        let power = |s: &ProcessorSetting, _f: f64| s.render_freq.powi(3);

        let table = SettingTable::new(settings.clone(), &predict).unwrap();
        let lit = table.search_literal(fps_min).unwrap();
        prop_assert!(lit.index < n);

        let mf = table.search_min_feasible(fps_min, power).unwrap();
        prop_assert!(mf.index < n);
        // min-feasible is correct by definition against a scan over the
        // same predictions
        let scan = exhaustive_oracle(&settings, fps_min, &predict, power).unwrap();
        prop_assert_eq!(mf.infeasible, scan.infeasible);
        if !mf.infeasible {
            let p_mf = power(&settings[mf.index], 0.0);
            let p_scan = power(&settings[scan.index], 0.0);
            prop_assert!(p_mf <= p_scan + 1e-12);
            prop_assert!(predict(&settings[mf.index]) >= fps_min);
        }
    }
}

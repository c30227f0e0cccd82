use std::f64::consts::PI;
use std::fs;

use njc_core::experiments::{
    bundle_csv, compute_metrics, export_bundle, export_sweep, preset, run_scenario, run_sweep,
    sweep_json, Axis, ExportFormat, ParamName, Scenario, Solvers, SweepGrid,
};
use njc_core::spectral::equal_rates_minimum;
use njc_core::NjcError;
use proptest::prelude::*;
use serde_json::Value;

#[test]
fn fig1_solvers_agree() {
    let b = run_scenario(&preset("fig1").unwrap()).unwrap();
    assert!(b.deviation.unwrap() <= 1e-8);
    assert!(b.deviation_ok());
    assert!(b.sanity_analytic.unwrap().is_physical() && b.sanity_numeric.unwrap().is_physical());
}

#[test]
fn zero_duration_rejected() {
    let mut s = preset("fig2").unwrap();
    s.t_end = 0.0;
    assert!(matches!(
        run_scenario(&s),
        Err(NjcError::InvalidScenario(_))
    ));
}

#[test]
fn chi_sweep_reproduces_fig1_and_fig3_first_minima() {
    let base = preset("fig1").unwrap().params;
    let grid = SweepGrid::new(
        base,
        vec![Axis {
            param: ParamName::Chi,
            start: 0.0,
            stop: 0.04,
            count: 2,
        }],
    );
    let rows = run_sweep(&grid, None).unwrap();
    assert_eq!(rows.len(), 2);

    // chi = 0: e^{-gamma t/2} cos^2(g t) first vanishes at t = pi / (2 g).
    let m1 = rows[0].metrics;
    assert!((m1.first_min_t.unwrap() - PI / 0.2).abs() < 1e-6);
    assert!(m1.first_min_value.unwrap() < 1e-12);

    // chi = 0.04: first minimum on the equal-rate envelope, lifted by the
    // slope of e^{-gamma t/2} (at most ~2e-6 on this preset).
    let p3 = preset("fig3").unwrap().params;
    assert_eq!(rows[1].params, p3);
    let m3 = rows[1].metrics;
    let envelope = equal_rates_minimum(&p3, m3.first_min_t.unwrap()).unwrap();
    assert!((m3.first_min_value.unwrap() - envelope).abs() < 2e-6);
    assert_eq!(m3, compute_metrics(&p3).unwrap());
}

#[test]
fn single_point_sweep_matches_scenario_metrics() {
    let s = preset("fig2").unwrap();
    let rows = run_sweep(
        &SweepGrid::new(s.params, vec!["chi=0.04:0.04:1".parse().unwrap()]),
        Some(1),
    )
    .unwrap();
    assert_eq!(rows.len(), 1);
    let mut analytic = s.clone();
    analytic.solvers = Solvers::Analytic;
    assert_eq!(rows[0].metrics, run_scenario(&analytic).unwrap().metrics);
}

#[test]
fn linear_short_time_rates_are_mean_of_rates() {
    let base = preset("fig4").unwrap().params;
    let grid = SweepGrid::new(base, vec!["gamma_plus=0.001:0.007:4".parse().unwrap()]);
    let rows = run_sweep(&grid, None).unwrap();
    let expected_gp = [0.001, 0.003, 0.005, 0.007];
    for (row, gp) in rows.iter().zip(expected_gp) {
        assert!((row.params.gamma_plus() - gp).abs() < 1e-15);
        let exact = (0.001 + gp) / 4.0;
        assert!((row.metrics.short_time_rate - exact).abs() < 1e-15);
        assert!((row.metrics.fitted_short_time_rate / exact - 1.0).abs() < 0.01);
    }
}

#[test]
fn csv_export_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let s = preset("fig2").unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    export_bundle(&run_scenario(&s).unwrap(), ExportFormat::Csv, &a).unwrap();
    export_bundle(&run_scenario(&s).unwrap(), ExportFormat::Csv, &b).unwrap();
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("t,pe_analytic,pe_numeric\n"));
    assert_eq!(text.lines().count(), 4002);
    assert!(text.is_ascii() && !text.contains('\r') && !text.contains("NaN"));
}

#[test]
fn sweep_json_echoes_params() {
    let dir = tempfile::tempdir().unwrap();
    let grid = SweepGrid::new(
        preset("fig3").unwrap().params,
        vec!["chi=0:0.04:3".parse().unwrap()],
    );
    let rows = run_sweep(&grid, None).unwrap();
    let path = dir.path().join("sweep.json");
    export_sweep(&rows, ExportFormat::Json, &path).unwrap();
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    for (row, chi) in arr.iter().zip([0.0, 0.02, 0.04]) {
        let p = &row["params"];
        assert_eq!(
            (p["omega"].as_f64(), p["g"].as_f64()),
            (Some(1.0), Some(0.1))
        );
        assert_eq!(p["chi"].as_f64(), Some(chi));
        assert_eq!(
            (p["gamma_plus"].as_f64(), p["gamma_minus"].as_f64()),
            (Some(0.004), Some(0.004))
        );
        for key in ["short_time_rate", "first_min_t", "first_min_value"] {
            assert!(row["metrics"][key].is_number(), "{key}");
        }
    }
    export_sweep(&[], ExportFormat::Json, &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "[]\n");
    export_sweep(&[], ExportFormat::Csv, &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn overdamped_point_has_no_first_minimum() {
    // With chi > 0 the trough value cos^2(theta) is positive, so decay much
    // faster than the Rabi period leaves Pe strictly decreasing.
    let axes = vec![
        "gamma_plus=2:2:1".parse().unwrap(),
        "gamma_minus=2:2:1".parse().unwrap(),
    ];
    let grid = SweepGrid::new(preset("fig3").unwrap().params, axes);
    let rows = run_sweep(&grid, None).unwrap();
    assert_eq!(rows[0].metrics.first_min_t, None);
    let json = sweep_json(&rows).unwrap();
    assert!(json.contains("\"first_min_t\": null"), "{json}");
}

#[test]
fn config_round_trip_reproduces_csv() {
    let mut s = preset("fig4").unwrap();
    s.t_end = 100.0;
    let again = Scenario::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(
        bundle_csv(&run_scenario(&s).unwrap()).unwrap(),
        bundle_csv(&run_scenario(&again).unwrap()).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sweep_rows_follow_grid_index(n_chi in 1usize..4, n_g in 1usize..4, threads in 1usize..4) {
        let grid = SweepGrid::new(
            preset("fig2").unwrap().params,
            vec![
                Axis { param: ParamName::Chi, start: 0.0, stop: 0.05, count: n_chi },
                Axis { param: ParamName::G, start: 0.05, stop: 0.15, count: n_g },
            ],
        );
        let rows = run_sweep(&grid, Some(threads)).unwrap();
        prop_assert_eq!(rows.len(), n_chi * n_g);
        for (n, row) in rows.iter().enumerate() {
            prop_assert_eq!(row.params, grid.point(n).unwrap());
            prop_assert_eq!(row.params.chi(), grid.axes[0].value(n / n_g));
            prop_assert_eq!(row.params.g(), grid.axes[1].value(n % n_g));
        }
    }
}

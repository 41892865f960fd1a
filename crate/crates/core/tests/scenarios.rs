use lfdecay::dynamics::{bare_decay, evolve_rotated, evolve_standard, RateSource, StandardModel};
use lfdecay::io::{manifest_path, write_csv, RunConfig, RunManifest, CSV_HEADER};
use lfdecay::scenarios::{
    compare, compare_with, departure_from_exponential, preset, presets, run, run_with, sweep, sweep_with, SweepPoint,
};
use lfdecay::{evolve, DriveParams, Error, EvolveOptions, ModelOrder};
use num_complex::Complex64;
use std::f64::consts::PI;

fn short(t_end: f64) -> EvolveOptions {
    EvolveOptions {
        t_end,
        samples: 401,
        ..Default::default()
    }
}

#[test]
fn presets_are_immutable_values() {
    assert_eq!(presets(), presets());
    assert_eq!(preset("fig2").unwrap(), preset("fig2").unwrap());
}

#[test]
fn comparing_a_preset_with_itself_is_all_zero() {
    let p = preset("sec3a").unwrap();
    let rep = compare(&p, &p).unwrap();
    assert_eq!(rep.metrics.max_abs_diff, 0.0);
    assert_eq!(rep.metrics.early_signed_diff, 0.0);
    assert_eq!(rep.series[0], rep.series[1]);
}

#[test]
fn orders_agree_in_the_weak_regime() {
    let a = preset("sec3a").unwrap();
    let b = a.with_order(ModelOrder::Order8);
    let rep = compare(&a, &b).unwrap();
    assert!(rep.metrics.max_abs_diff < 1e-3, "{}", rep.metrics.max_abs_diff);
}

#[test]
fn compare_rejects_different_drives() {
    let err = compare(&preset("fig1a").unwrap(), &preset("fig3a").unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn weak_regime_is_exponential_at_any_phase() {
    let base = preset("sec3a").unwrap();
    let points: Vec<SweepPoint> = [0.0, PI / 4.0, PI / 2.0].iter().map(|&v| SweepPoint::Phase(v)).collect();
    let runs: Vec<_> = sweep(&base, &points).into_iter().map(|r| r.unwrap()).collect();
    for r in &runs {
        assert!(r.trajectory.max_abs_residual_exp() < 0.01);
    }
    for r in &runs[1..] {
        let diff = r.trajectory.sz.iter().zip(&runs[0].trajectory.sz).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 0.01);
    }
}

#[test]
fn coherent_term_plays_no_role_in_the_weak_regime() {
    let p = preset("sec3a").unwrap();
    let plain = run_with(&p, &short(5.0)).unwrap();
    let with = run_with(
        &p,
        &EvolveOptions {
            include_h0: true,
            ..short(5.0)
        },
    )
    .unwrap();
    let diff = plain.trajectory.sz.iter().zip(&with.trajectory.sz).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-3, "{diff}");
}

#[test]
fn sweep_isolates_out_of_regime_points() {
    let base = preset("fig1a").unwrap();
    let omega0 = base.params.omega0;
    let points = [0.3 * omega0, 0.6 * omega0, 0.2 * omega0].map(SweepPoint::Rabi);
    let out = sweep_with(&base, &points, &short(1.0));
    assert!(out[0].is_ok() && out[2].is_ok());
    let err = out[1].as_ref().unwrap_err();
    assert!(matches!(err, Error::Regime(_)));
    assert!(err.to_string().contains("x<1"), "{err}");
}

#[test]
fn departure_grows_with_coupling() {
    let base = preset("fig1a").unwrap();
    let points: Vec<SweepPoint> = (1..=8).map(|i| SweepPoint::Rabi(0.05 * i as f64 * base.params.omega0)).collect();
    let departures: Vec<f64> = sweep_with(&base, &points, &short(4.0))
        .into_iter()
        .map(|r| departure_from_exponential(&r.unwrap().trajectory))
        .collect();
    assert!(departures.windows(2).all(|w| w[1] > w[0]), "{departures:?}");
}

#[test]
fn sweep_does_not_depend_on_thread_count() {
    let base = preset("fig3a").unwrap();
    let points: Vec<SweepPoint> = [0.0, 0.4, 1.3, 2.9].iter().map(|&v| SweepPoint::Phase(v)).collect();
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sweep_with(&base, &points, &short(0.5)))
    };
    let one: Vec<_> = in_pool(1).into_iter().map(|r| r.unwrap().trajectory).collect();
    let four: Vec<_> = in_pool(4).into_iter().map(|r| r.unwrap().trajectory).collect();
    assert_eq!(one, four);
}

#[test]
fn order_axis_runs_every_model() {
    let base = preset("fig1a").unwrap();
    let points = [ModelOrder::Order2, ModelOrder::Order8, ModelOrder::StandardME].map(SweepPoint::Order);
    for (r, pt) in sweep_with(&base, &points, &short(0.5)).into_iter().zip(points) {
        let r = r.unwrap();
        assert_eq!(SweepPoint::Order(r.trajectory.order), pt);
    }
}

#[test]
fn fig3_comparison_metrics() {
    let rep = compare_with(&preset("fig3a").unwrap(), &preset("fig3b").unwrap(), &short(4.0)).unwrap();
    assert!(rep.first_faster_early());
    assert!(rep.metrics.max_abs_diff > 0.0);
    let [ha, hb] = rep.metrics.half_life;
    assert!(ha.unwrap() < hb.unwrap());
}

#[test]
fn csv_is_deterministic_and_matches_bare_decay_when_undriven() {
    let dir = tempfile::tempdir().unwrap();
    let p = DriveParams::new(1000.0, 0.05, 0.0, 0.0, 1.0).unwrap();
    let traj = evolve(&p, ModelOrder::Order8, &short(5.0)).unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let ha = write_csv(&traj, &a).unwrap();
    let again = evolve(&p, ModelOrder::Order8, &short(5.0)).unwrap();
    assert_eq!(ha, write_csv(&again, &b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - bare_decay(v[0])).abs() < 1e-6);
        assert!((v[3] - (v[1] - bare_decay(v[0]))).abs() < 1e-14);
        rows += 1;
    }
    assert_eq!(rows, 401);
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::from_preset(&preset("fig1a").unwrap());
    // SI units: γ = 6.25e7 s⁻¹ with the same ratios
    let gamma = 6.25e7;
    config.omega0 *= gamma;
    config.omega *= gamma;
    config.rabi *= gamma;
    config.gamma = gamma;
    config.t_end_gamma = 1.0;
    config.samples = 301;
    config.validate().unwrap();
    let traj = evolve(&config.params(), config.order, &config.options()).unwrap();
    let out = dir.path().join("run.csv");
    let hash = write_csv(&traj, &out).unwrap();
    let manifest = RunManifest::new(&config, &traj, "h", 0.5, &hash).unwrap();
    let mpath = manifest_path(&out);
    manifest.write(&mpath).unwrap();

    let back = RunConfig::load(&mpath).unwrap();
    assert_eq!(back, config);
    let again = evolve(&back.params(), back.order, &back.options()).unwrap();
    assert_eq!(write_csv(&again, &dir.path().join("again.csv")).unwrap(), hash);
    assert!((manifest.scaled.omega - 0.05).abs() < 1e-15);
    assert_eq!(manifest.truncation.len(), 4);
}

#[test]
fn presets_run_with_provenance() {
    let r = run(&preset("sec3a").unwrap()).unwrap();
    assert_eq!(r.param_hash.len(), 16);
    assert_eq!(r.trajectory.truncation[0].name, "eta");
    assert_eq!(r.trajectory.grid.len(), 2000);
    assert_eq!(*r.trajectory.grid.last().unwrap(), 5.0);
}

#[test]
fn standard_model_keeps_pure_states_pure_without_decay() {
    let model = StandardModel {
        omega0: 40.0,
        omega: 0.3,
        rabi: 15.0,
        phase: 0.2,
        decay: 0.0,
    };
    for (tol, bound) in [(1e-9, 1e-6), (1e-12, 1e-9)] {
        let traj = evolve_standard(&model, &EvolveOptions { tol, ..short(3.0) }).unwrap();
        let drift = traj.states.iter().map(|r| ((r * r).trace().re - 1.0).abs()).fold(0.0, f64::max);
        assert!(drift < bound, "tol {tol}: {drift:e}");
    }
}

#[test]
fn invariant_breach_aborts_with_code_4() {
    let p = DriveParams::from_ratios(0.2, 2e4, 0.05, 0.0).unwrap();
    let err = evolve_rotated(&p, ModelOrder::Order2, RateSource::Constant(Complex64::new(-0.5, 0.0)), &short(2.0)).unwrap_err();
    assert!(matches!(err, Error::Invariant { .. }), "{err}");
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn bad_solver_settings_are_config_errors() {
    let p = preset("sec3a").unwrap().params;
    for opts in [
        EvolveOptions { t_end: 0.0, ..short(1.0) },
        EvolveOptions { tol: 0.0, ..short(1.0) },
    ] {
        assert_eq!(evolve(&p, ModelOrder::Order2, &opts).unwrap_err().exit_code(), 2);
    }
}

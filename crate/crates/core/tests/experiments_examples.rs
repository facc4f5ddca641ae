use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use sqwalk::experiments::{
    default_max_steps, execute, run_search, scaling_sweep, theta_scan, ExperimentConfig, Mode, SearchOptions,
};
use sqwalk::Ordering;

#[test]
fn half_turn_fails_to_amplify() {
    let run = run_search(16, FRAC_PI_2, Ordering::DEFAULT, &SearchOptions::default()).unwrap();
    assert!(!run.found);
    assert_eq!(run.steps_run, default_max_steps(16));
    assert!(run.record.t_opt >= 1);
    assert!(run.max_norm_drift < 1e-10);
}

#[test]
fn default_cap_formula() {
    let big_n = 1024.0f64;
    assert_eq!(default_max_steps(16), (10.0 * (big_n * big_n.ln()).sqrt()).ceil() as usize);
}

#[test]
fn quarter_turn_at_thirty_two() {
    let run = run_search(32, FRAC_PI_4, Ordering::DEFAULT, &SearchOptions::default()).unwrap();
    let r = run.record;
    assert!(run.found);
    let model = (32.0 * r.lambda).powi(2) / 2.0;
    assert!((r.p_max / model - 1.0).abs() < 0.15, "{} vs {model}", r.p_max);
    assert!(r.t_opt.abs_diff((PI / (2.0 * r.lambda)).round() as usize) <= 3);
    assert!(run.max_norm_drift < 1e-10);
}

#[test]
fn only_the_quarter_turn_amplifies() {
    let thetas = [PI / 8.0, PI / 6.0, PI / 4.0, PI / 3.0, 3.0 * PI / 8.0];
    let rows = theta_scan(32, &thetas, Ordering::DEFAULT, &SearchOptions::default()).unwrap();
    for row in &rows {
        if row.theta == FRAC_PI_4 {
            assert!(row.gain > 100.0, "{row:?}");
        } else {
            assert!(row.gain < 4.0, "{row:?}");
            assert!(row.p_max < 0.01);
        }
    }
    let best = rows.iter().max_by(|a, b| a.p_max.total_cmp(&b.p_max)).unwrap();
    assert_eq!(best.theta, FRAC_PI_4);
}

#[test]
fn default_ordering_scaling() {
    let report = scaling_sweep(&[8, 16, 32, 64], FRAC_PI_4, Ordering::DEFAULT, &SearchOptions::default()).unwrap();
    // √(N ln N) looks like a slightly larger exponent than ½ at these sizes
    assert!((0.45..0.65).contains(&report.time_fit.exponent), "{:?}", report.time_fit);
    assert_eq!(report.records().len(), 4);
}

#[test]
fn execute_is_deterministic() {
    for mode in [Mode::Search, Mode::Scaling, Mode::ThetaScan, Mode::EigenTrend, Mode::Spectrum, Mode::Appendix] {
        let mut config = ExperimentConfig::new(mode, vec![4, 5, 6, 8]);
        if mode == Mode::ThetaScan {
            config.n_values = vec![6];
        }
        let a = execute(&config).unwrap();
        let b = execute(&config).unwrap();
        assert_eq!(a, b, "{mode:?}");
        assert!(!a.body.is_empty());
    }
}

use jivelab::harness::{run_sweep_with, Axis, Method, RunOptions, SweepConfig};
use jivelab::model::JiveConfig;

fn cell(trials: usize, master_seed: u64, sigma: f64) -> SweepConfig {
    SweepConfig {
        base: JiveConfig {
            num_matrices: 10,
            sigma,
            ..JiveConfig::default()
        },
        axis: Axis::Sigma,
        axis_values: vec![sigma.max(1e-3)],
        trials,
        methods: vec![Method::Ajive, Method::Oracle, Method::Stacked],
        master_seed,
    }
}

#[test]
fn doubling_trials_shrinks_standard_error_by_root_two() {
    let mut ratios = Vec::new();
    for rep in 0..20 {
        let se = |trials| {
            let recs = run_sweep_with(&cell(trials, 1000 + rep, 1e-3), RunOptions::default()).unwrap();
            recs.iter().find(|r| r.method == Method::Ajive).unwrap().std_error
        };
        ratios.push(se(40) / se(20));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    assert!((mean - target).abs() <= 0.3 * target, "mean ratio {mean}");
}

#[test]
fn errors_are_bounded_and_noiseless_cells_exact() {
    let recs = run_sweep_with(&cell(5, 3, 1e-2), RunOptions::default()).unwrap();
    for r in &recs {
        assert!(r.mean_error >= 0.0 && r.mean_error <= 1.0 + 1e-12, "{r:?}");
        assert!(r.std_error >= 0.0);
    }
    let mut noiseless = cell(3, 4, 0.0);
    noiseless.axis = Axis::K;
    noiseless.axis_values = vec![4.0, 12.0];
    let recs = run_sweep_with(&noiseless, RunOptions::default()).unwrap();
    for r in recs.iter().filter(|r| r.method != Method::Stacked) {
        assert!(r.mean_error <= 1e-8, "{r:?}");
    }
    // output is sorted by axis value, then method
    let keys: Vec<(u64, Method)> = recs.iter().map(|r| (r.axis_value as u64, r.method)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

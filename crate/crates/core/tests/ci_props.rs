use cilab::euler_ci::*;
use cilab::euler_subsol::constraint_margin;

#[test]
fn four_steps_from_trivial_start() {
    let cfg = CiConfig::default();
    let start = trivial_start(cfg.resolution).unwrap();
    let mut state = start;
    let mut rows = Vec::new();
    let mut rises = Vec::new();
    for _ in 0..4 {
        let before = state.triple.clone();
        let (next, row) = ci_step(&state, &cfg).unwrap();
        let rise = cell_average_increase(&before, &next.triple, row.lambda_k as u64);
        rises.push(rise);
        assert!(constraint_margin(&next.triple).unwrap().min() >= 0.0);
        state = next;
        rows.push(row);
    }
    let h = &state.deficit_trace_history;
    assert!(h.windows(2).all(|w| w[1] < w[0]));
    assert!(h[4] <= 0.75f64.powi(4) * h[0]);
    for r in &rows {
        assert!(r.divergence <= 1e-9);
        assert!(r.min_margin >= 0.0);
        assert!(r.shell_fraction >= 0.8, "{r:?}");
        assert!(r.linres <= 1e-9, "{r:?}");
    }
    assert!(rows.windows(2).all(|w| w[1].l2_v > w[0].l2_v));
    // with λ_k = 2λ_{k-1} the cross terms leave an O(1) cell-averaged rise
    assert!(rises.iter().all(|r| *r < 0.2), "{rises:?}");
}

#[test]
fn cross_term_decay() {
    let c = cross_term_pairing(32.0).unwrap();
    assert!((c.ratio - 0.5).abs() <= 0.125);
}

#[test]
fn exhaustion_is_reported() {
    let cfg = CiConfig {
        resolution: 32,
        lambda0: 8,
        retries: 0,
        rho: 0.1,
        ..Default::default()
    };
    let start = trivial_start(32).unwrap();
    match ci_step(&start, &cfg) {
        Err(cilab::Error::FrequencyExhaustion { attempts, .. }) => assert_eq!(attempts, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn cell_averaged_deficit_rise_shrinks_with_frequency() {
    let cfg = CiConfig::default();
    let (one, _) = ci_step(&trivial_start(cfg.resolution).unwrap(), &cfg).unwrap();
    let rise = |lambda0: u64| {
        let c = CiConfig { lambda0, ..cfg.clone() };
        let (two, row) = ci_step(&one, &c).unwrap();
        cell_average_increase(&one.triple, &two.triple, row.lambda_k as u64)
    };
    let r: Vec<f64> = [8, 16, 32].iter().map(|&l| rise(l)).collect();
    assert!(r[1] < r[0] / 4.0 && r[2] < r[1] / 4.0, "{r:?}");
    assert!(r[2] <= 1e-2);
}

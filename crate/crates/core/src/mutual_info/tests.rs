use super::*;
use crate::channel::{DopplerModel, FrequencyGrid, LosTaps, PowerProfile, RICEAN_K_INFINITE};
use nalgebra::DMatrix;

fn model(
    n: usize,
    t: usize,
    l: usize,
    doppler: impl Fn(&FrequencyGrid) -> DopplerModel,
    rho: f64,
    k: f64,
    xi: f64,
) -> ChannelModel {
    let grid = FrequencyGrid::new(64).unwrap();
    ChannelModel::new(
        doppler(&grid),
        PowerProfile::uniform(l, 1.0).unwrap(),
        LosTaps::steering(n, t, l, xi).unwrap(),
        grid,
    )
    .unwrap()
    .normalize_for_snr(rho, k)
    .unwrap()
}

fn exp_doppler(f_d: f64) -> impl Fn(&FrequencyGrid) -> DopplerModel {
    move |g| DopplerModel::exponential(f_d, g, None).unwrap()
}

#[test]
fn deterministic_channel_reduces_to_logdet() {
    let m = model(4, 4, 2, exp_doppler(1.0), 5.0, RICEAN_K_INFINITE, 1.0);
    let r = deq_mutual_information(&m, &SolverOptions::default()).unwrap();
    let oracle = deterministic_only_mutual_info(&m).unwrap();
    assert!((r.total - oracle).abs() < 1e-10);
    assert_eq!(r.term_log_scalar, 0.0);
    assert_eq!(r.term_cross, 0.0);
}

#[test]
fn white_rayleigh_matches_marchenko_pastur() {
    for &(n, t) in &[(4, 4), (2, 4), (6, 3)] {
        let m = model(n, t, 1, DopplerModel::delta, 1.0, 0.0, 1.0);
        let r = deq_mutual_information(&m, &SolverOptions::default()).unwrap();
        let oracle = mp_mutual_information(1.0, n as f64 / t as f64).unwrap();
        assert!((r.total - oracle).abs() < 1e-9, "{n}x{t}: {} vs {oracle}", r.total);
        assert!(r.term_cross > 0.0);
    }
}

#[test]
fn zero_channel_has_zero_information() {
    let grid = FrequencyGrid::new(16).unwrap();
    let m = ChannelModel::new(
        DopplerModel::delta(&grid),
        PowerProfile::zero(1),
        LosTaps::zero(2, 3, 1).unwrap(),
        grid,
    )
    .unwrap();
    let r = deq_mutual_information(&m, &SolverOptions::default()).unwrap();
    assert_eq!(r.total, 0.0);
    assert_eq!(deterministic_only_mutual_info(&m).unwrap(), 0.0);

    let q = mutual_info_via_quadrature(&m, 100.0, 16, &SolverOptions::default()).unwrap();
    assert!(q.value.abs() < 1e-14);
    assert_eq!(q.tail_upper, 0.0);
}

#[test]
fn scalar_deterministic_tap() {
    let grid = FrequencyGrid::new(8).unwrap();
    let a = DMatrix::from_element(1, 1, C64::new(3f64.sqrt(), 0.0));
    let m = ChannelModel::new(
        DopplerModel::delta(&grid),
        PowerProfile::zero(0),
        LosTaps::from_blocks(alloc::vec![a]).unwrap(),
        grid,
    )
    .unwrap();
    assert!((deterministic_only_mutual_info(&m).unwrap() - 4f64.ln()).abs() < 1e-14);
}

#[test]
fn deterministic_formula_rejects_random_part() {
    let m = model(2, 2, 1, exp_doppler(1.0), 2.0, 1.0, 1.0);
    assert!(deterministic_only_mutual_info(&m).is_err());
}

#[test]
fn quadrature_route_agrees() {
    let opts = SolverOptions::default();
    for m in [
        model(2, 2, 1, DopplerModel::delta, 1.0, 0.0, 1.0),
        model(2, 2, 2, exp_doppler(1.0), 10.0, 1.0, 1.0),
        model(3, 2, 1, exp_doppler(0.2), 3.0, 3.0, 0.5),
    ] {
        let d = deq_mutual_information(&m, &opts).unwrap().total;
        let q = mutual_info_via_quadrature(&m, 1e4, 64, &opts).unwrap();
        let (lo, hi) = q.interval();
        std::println!("deq {d:.8} quad [{lo:.8}, {hi:.8}]");
        assert!(d >= lo - 1e-4 && d <= hi + 1e-4, "{d} not in [{lo}, {hi}]");
    }
}

#[test]
fn quadrature_grows_with_horizon() {
    let m = model(2, 2, 1, exp_doppler(0.5), 4.0, 1.0, 1.0);
    let opts = SolverOptions::default();
    let values: alloc::vec::Vec<f64> = [10.0, 100.0, 1e3, 1e4]
        .iter()
        .map(|&t| mutual_info_via_quadrature(&m, t, 64, &opts).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
    assert!(mutual_info_via_quadrature(&m, 5.0, 64, &opts).is_err());
    assert!(mutual_info_via_quadrature(&m, 100.0, 8, &opts).is_err());
}

#[test]
fn gregory_rule_order() {
    // exact for quadratics; fourth order on a smooth decaying integrand
    let h = 0.1;
    let quad: alloc::vec::Vec<f64> = (0..=20).map(|k| (k as f64 * h).powi(2)).collect();
    assert!((gregory_trapezoid(&quad, h) - 8.0 / 3.0).abs() < 1e-13);

    let err = |n: usize| {
        let h = 3.0 / n as f64;
        let f: alloc::vec::Vec<f64> = (0..=n).map(|k| (-(k as f64) * h).exp()).collect();
        (gregory_trapezoid(&f, h) - (1.0 - (-3.0f64).exp())).abs()
    };
    assert!(err(20) / err(40) > 12.0);
}

#[test]
fn increases_with_snr() {
    let opts = SolverOptions::default();
    let mut last = 0.0;
    for rho_db in [-10.0, 0.0, 5.0, 10.0, 20.0] {
        let rho = 10f64.powf(rho_db / 10.0);
        let m = model(3, 3, 1, exp_doppler(0.5), rho, 2.0, 1.0);
        let r = deq_mutual_information(&m, &opts).unwrap();
        assert!(r.total >= last);
        assert!(r.term_cross >= 0.0 && r.term_logdet.is_finite());
        last = r.total;
    }
}

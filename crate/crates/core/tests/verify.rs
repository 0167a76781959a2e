mod common;

use common::*;
use proptest::prelude::*;
use torsionfree_core::solver::solve;
use torsionfree_core::verify::{
    check_s_equals_pr, convergence_study, empirical_orders, geodesic_residual, integrate_transport, parallel_transport,
};
use torsionfree_core::{CurvatureMap, Error, FormSeries, MatrixElement, SolveConfig, TransportConfig, ValueSpace};

fn sphere(n: usize, kappa: f64, order: usize) -> torsionfree_core::SolveResult {
    solve(&CurvatureMap::constant_curvature(n, kappa).unwrap(), &SolveConfig { order, ..Default::default() }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transport_composes_and_obeys_liouville(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let gamma = rand_series(&mut r, n, 1, ValueSpace::Matrix, 3).scaled(0.5);
        let v = rand_vec(&mut r, n);
        let id = MatrixElement::identity(n);
        let whole = integrate_transport(&gamma, &v, 0.0, 1.0, &id, 200, 1e-300).unwrap();
        let half = integrate_transport(&gamma, &v, 0.0, 0.5, &id, 100, 1e-300).unwrap();
        let rest = integrate_transport(&gamma, &v, 0.5, 1.0, &half, 100, 1e-300).unwrap();
        prop_assert!(whole.sub(&rest).max_abs() < 1e-12);
        // det A(1) = exp(−∫₀¹ tr Γ(tv)(v) dt), Simpson on a fine grid
        let trace = |t: f64| -> f64 {
            let p: Vec<f64> = v.iter().map(|x| t * x).collect();
            let val = gamma.eval_at(&p).unwrap();
            (0..n).map(|i| (0..n).map(|k| v[i] * val[i * n * n + k * n + k]).sum::<f64>()).sum()
        };
        let steps = 400;
        let h = 1.0 / steps as f64;
        let integral: f64 = (0..=steps)
            .map(|i| {
                let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * trace(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0;
        prop_assert!((whole.det() - (-integral).exp()).abs() < 1e-9 * (-integral).exp().max(1.0));
    }

    #[test]
    fn nonsymmetric_gamma_fails_geodesic_check(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let gamma = rand_series(&mut r, n, 1, ValueSpace::Matrix, 2);
        let v = rand_vec(&mut r, n);
        // brute force over the same sample grid
        let mut worst = 0.0f64;
        for i in 0..16 {
            let t = i as f64 / 15.0;
            let p: Vec<f64> = v.iter().map(|x| t * x).collect();
            let val = gamma.eval_at(&p).unwrap();
            let acc: Vec<f64> = (0..n)
                .map(|k| (0..n).map(|a| (0..n).map(|b| v[a] * v[b] * val[a * n * n + k * n + b]).sum::<f64>()).sum())
                .collect();
            worst = worst.max(acc.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
        let got = geodesic_residual(&gamma, &v, 16).unwrap();
        prop_assert!((got - worst).abs() < 1e-12);
        prop_assert!(got > 0.0);
    }
}

#[test]
fn sphere_transport_matches_gauge() {
    let res = sphere(2, 1.0, 12);
    let v = [0.3, 0.4];
    let cfg = TransportConfig { max_radius: res.radius.frame_degeneracy_radius, ..Default::default() };
    let t = parallel_transport(&res.gamma, &res.gauge, &v, &cfg).unwrap();
    assert!(t.deviation <= 1e-6, "{}", t.deviation);
    assert!(check_s_equals_pr(&CurvatureMap::constant_curvature(2, 1.0).unwrap(), &res.gamma, &res.curvature, &v, &cfg).unwrap() <= 1e-6);
    assert!(geodesic_residual(&res.gamma, &v, 32).unwrap() < 1e-12);
}

#[test]
fn hyperbolic_transport_matches_gauge() {
    let res = sphere(3, -1.0, 10);
    let v = [0.2, -0.3, 0.1];
    let t = parallel_transport(&res.gamma, &res.gauge, &v, &TransportConfig::default()).unwrap();
    assert!(t.deviation <= 1e-6, "{}", t.deviation);
    let s = CurvatureMap::constant_curvature(3, -1.0).unwrap();
    assert!(check_s_equals_pr(&s, &res.gamma, &res.curvature, &v, &TransportConfig::default()).unwrap() <= 1e-6);
}

#[test]
fn rk4_converges_at_fourth_order() {
    let res = sphere(2, 1.0, 12);
    let study = convergence_study(&res.gamma, &res.gauge, &[0.3, 0.4], &[2, 4, 8, 16]).unwrap();
    let orders = empirical_orders(&study);
    assert_eq!(orders.len(), 3);
    for o in orders {
        assert!(o >= 3.0, "{o}");
    }
}

#[test]
fn refusals() {
    let res = sphere(2, 1.0, 12);
    let far = TransportConfig { max_radius: Some(3.0), ..Default::default() };
    assert!(matches!(parallel_transport(&res.gamma, &res.gauge, &[2.0, 0.0], &far), Err(Error::Radius { .. })));
    let coarse = TransportConfig { steps: 16, ..Default::default() };
    assert!(matches!(parallel_transport(&res.gamma, &res.gauge, &[0.1, 0.0], &coarse), Err(Error::InvalidParameter(_))));
    assert!(geodesic_residual(&res.gamma, &[0.1, 0.0], 4).is_err());
    // A′ = −A shrinks det A like e^{−nt}
    let shrink = FormSeries::constant_matrix(&MatrixElement::identity(2), 2);
    let one_form = {
        let pieces = vec![
            torsionfree_core::GradedCoefficient::from_data(2, 0, 1, ValueSpace::Matrix, [shrink.piece(0).data(), shrink.piece(0).data()].concat()).unwrap(),
            torsionfree_core::GradedCoefficient::zeros(2, 1, 1, ValueSpace::Matrix),
            torsionfree_core::GradedCoefficient::zeros(2, 2, 1, ValueSpace::Matrix),
        ];
        FormSeries::from_pieces(pieces, torsionfree_core::Validity::Exact).unwrap()
    };
    let err = integrate_transport(&one_form, &[2.0, 0.0], 0.0, 1.0, &MatrixElement::identity(2), 64, 0.5);
    assert!(matches!(err, Err(Error::Degenerate { .. })));
}

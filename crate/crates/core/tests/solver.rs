mod common;
mod oracles;

use common::*;
use oracles::*;
use proptest::prelude::*;
use rand::Rng;
use torsionfree_core::jets::{contract_euler, integrate_i, times_euler};
use torsionfree_core::multilinear::{sym_eval, sym_norm};
use torsionfree_core::solver::{
    christoffel_symbols, compute_omega, consistency_residual, gauge_from_omega, radius_estimate, solve, solve_theta,
    RadiusConfig,
};
use torsionfree_core::{CurvatureMap, Error, FormSeries, GradedCoefficient, SolveConfig, ValueSpace};

fn config(order: usize) -> SolveConfig {
    SolveConfig { order, ..Default::default() }
}

/// Value of the homogeneous piece `m` of a 1-form at `v` on `x`.
fn piece_on(theta: &FormSeries, m: usize, v: &[f64], x: &[f64]) -> Vec<f64> {
    let n = theta.dim();
    let block = sym_eval(theta.piece(m), v).unwrap();
    GradedCoefficient::from_data(n, 0, 1, ValueSpace::Vector, block).unwrap().apply_form(&[x]).unwrap()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / r).collect()
}

#[test]
fn flat_is_exact() {
    for n in 2..5 {
        let r = solve(&CurvatureMap::zero(n), &config(8)).unwrap();
        assert_eq!(r.theta, FormSeries::dv(n, 8));
        assert_eq!(r.omega.max_abs(), 0.0);
        assert_eq!(r.gamma.max_abs(), 0.0);
        assert!(r.is_consistent());
        assert_eq!(r.max_consistency_residual(), 0.0);
    }
}

#[test]
fn low_order_is_rejected() {
    let s = CurvatureMap::constant_curvature(2, 1.0).unwrap();
    assert!(matches!(solve_theta(&s, 1), Err(Error::InvalidParameter(_))));
}

#[test]
fn space_form_tangential_coefficients() {
    for kappa in [1.0, -1.0, 0.25] {
        for n in 2..4 {
            let s = CurvatureMap::constant_curvature(n, kappa).unwrap();
            let theta = solve_theta(&s, 10).unwrap();
            let mut r = rng(n as u64);
            for _ in 0..4 {
                let v = unit(&rand_vec(&mut r, n));
                let x = rand_vec(&mut r, n);
                let dot: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
                let tangential: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - dot * b).collect();
                for j in 1..=4 {
                    let c = sinc_coefficient(kappa, j);
                    let expect: Vec<f64> = tangential.iter().map(|t| c * t).collect();
                    assert!(max_diff(&piece_on(&theta, 2 * j, &v, &x), &expect) < 1e-12, "κ={kappa} n={n} j={j}");
                    assert!(max_abs(&piece_on(&theta, 2 * j - 1, &v, &x)) < 1e-14);
                }
            }
        }
    }
}

#[test]
fn christoffel_matches_space_form_metric() {
    for kappa in [1.0, -1.0] {
        for n in 2..4 {
            let r = solve(&CurvatureMap::constant_curvature(n, kappa).unwrap(), &config(14)).unwrap();
            let mut g = rng(11 + n as u64);
            let v: Vec<f64> = unit(&rand_vec(&mut g, n)).iter().map(|x| 0.4 * x).collect();
            let got = christoffel_symbols(&r.gamma, &v).unwrap();
            let expect = space_form_christoffel(kappa, &v);
            assert!(max_diff(&got, &expect) < 1e-8, "κ={kappa} n={n}: {}", max_diff(&got, &expect));
        }
    }
}

#[test]
fn brute_force_recursion_agrees() {
    let mut r = rng(2024);
    for _ in 0..10 {
        let n = 2 + r.gen_range(0..2);
        let raw = MonomialCurvature::random(n, 2, || r.gen_range(-1.0..1.0));
        // n = 3 needs the Bianchi projection; re-read it in monomial form
        let s = raw.to_curvature_map().project_onto_k();
        let order = 5;
        let oracle = brute_force_theta(&MonomialCurvature::from_curvature_map(&s), order);
        let theta = solve_theta(&s, order).unwrap();
        let dev = theta_deviation(&theta, &oracle, order);
        assert!(dev < 1e-12, "n={n}: {dev}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn second_order_term(seed in any::<u64>(), n in 2usize..4, degree in 0usize..3) {
        let mut r = rng(seed);
        let s = rand_curvature(&mut r, n, degree);
        let theta = solve_theta(&s, 4).unwrap();
        let v = rand_vec(&mut r, n);
        let x = rand_vec(&mut r, n);
        // 6 θ⁽²⁾(v)(x) = S₀(v, x) v
        let s0 = s.coeff(0);
        let sv = s0.apply_form(&[&v, &x]).unwrap();
        let m = torsionfree_core::MatrixElement::from_row_major(n, sv).unwrap();
        let expect: Vec<f64> = m.mul_vec(&v).iter().map(|y| y / 6.0).collect();
        prop_assert!(max_diff(&piece_on(&theta, 2, &v, &x), &expect) < 1e-12);
        prop_assert!(max_abs(theta.piece(1).data()) == 0.0);
    }

    #[test]
    fn structure_of_theta_and_omega(seed in any::<u64>(), n in 2usize..4, degree in 0usize..3) {
        let mut r = rng(seed);
        let s = rand_curvature(&mut r, n, degree);
        let order = 7;
        let theta = solve_theta(&s, order).unwrap();
        let omega = compute_omega(&s, &theta).unwrap();
        // θ(ℰ) = ℰ
        let radial = contract_euler(&theta).unwrap();
        prop_assert!(series_diff(&radial, &FormSeries::euler(n, order)) < 1e-12);
        // ι_ℰ ω = 0
        prop_assert!(contract_euler(&omega).unwrap().max_abs() < 1e-12);
        // ω⁽¹⁾(v)(x) = ½ S₀(v, x)
        let v = rand_vec(&mut r, n);
        let x = rand_vec(&mut r, n);
        let block = sym_eval(omega.piece(1), &v).unwrap();
        let w1 = GradedCoefficient::from_data(n, 0, 1, ValueSpace::Matrix, block).unwrap().apply_form(&[&x]).unwrap();
        let half: Vec<f64> = s.coeff(0).apply_form(&[&v, &x]).unwrap().iter().map(|y| 0.5 * y).collect();
        prop_assert!(max_diff(&w1, &half) < 1e-12);
        // θ = dv + I(ω·ℰ)
        let rebuilt = FormSeries::dv(n, order).add(&integrate_i(&times_euler(&omega).unwrap())).unwrap();
        prop_assert!(series_diff(&rebuilt, &theta) < 1e-12);
        prop_assert!(gauge_from_omega(&omega, &theta).is_ok());
    }

    #[test]
    fn two_dimensional_maps_are_always_consistent(seed in any::<u64>(), degree in 0usize..3) {
        let mut r = rng(seed);
        let s = rand_curvature(&mut r, 2, degree);
        let res = solve(&s, &config(7)).unwrap();
        prop_assert!(res.is_consistent(), "{:?}", res.consistency_residual_per_degree);
        prop_assert!(res.torsion_residual < 1e-10);
        prop_assert!(res.curvature_gauge_residual < 1e-10);
        prop_assert!(res.second_bianchi_residual < 1e-9);
    }

    #[test]
    fn corrected_norm_recursion(seed in any::<u64>(), n in 2usize..4, degree in 0usize..3) {
        let mut r = rng(seed);
        let s = rand_curvature(&mut r, n, degree);
        let order = 8;
        let theta = solve_theta(&s, order).unwrap();
        let s_up: Vec<f64> = (0..order).map(|k| sym_norm(&s.coeff(k)).upper_bound).collect();
        let t_up: Vec<f64> = (0..=order).map(|m| sym_norm(theta.piece(m)).upper_bound).collect();
        for m in 1..order {
            let lhs = ((m + 1) * (m + 2)) as f64 * sym_norm(theta.piece(m + 1)).estimate;
            let rhs: f64 = (0..m).map(|k| s_up[k] * t_up[m - 1 - k]).sum();
            prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-14, "m={m}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn groenwall_bound_dominates(seed in any::<u64>(), n in 2usize..4, degree in 0usize..2) {
        let mut r = rng(seed);
        let s = rand_curvature(&mut r, n, degree);
        let order = 10;
        let res = solve(&s, &config(order)).unwrap();
        let est = &res.radius;
        for &(t, bound) in &est.groenwall_bound_at {
            let series: f64 = (0..=order).map(|m| sym_norm(res.theta.piece(m)).estimate * t.powi(m as i32)).sum();
            prop_assert!(series <= bound * (1.0 + 1e-9), "t={t}: {series} > {bound}");
        }
    }
}

#[test]
fn irreducible_gl2_fixture_is_inconsistent() {
    let s = sym2_gl2_fixture();
    let res = solve(&s, &config(6)).unwrap();
    assert!(!res.is_consistent());
    assert_eq!(res.first_failing_degree(), Some(2));
    assert!(res.consistency_residual_per_degree[2] > 1e-6);
    assert!(res.second_bianchi_residual > 1e-6);
}

#[test]
fn consistent_space_forms_pass_every_check() {
    for kappa in [1.0, -1.0] {
        for n in 2..4 {
            let s = CurvatureMap::constant_curvature(n, kappa).unwrap();
            let res = solve(&s, &config(10)).unwrap();
            assert!(res.consistency_residual_per_degree.iter().all(|&x| x <= 1e-10));
            assert_eq!(res.consistency_residual_per_degree.len(), 10);
            assert!(res.torsion_residual <= 1e-10);
            assert!(res.curvature_gauge_residual <= 1e-10);
            assert!(res.second_bianchi_residual <= 1e-9);
            assert!(res.structure_identity_residual <= 1e-10);
            let again = consistency_residual(&s, &res.theta, &res.omega).unwrap();
            assert_eq!(again, res.consistency_residual_per_degree);
        }
    }
}

#[test]
fn degeneracy_radius() {
    let sphere = solve(&CurvatureMap::constant_curvature(2, 1.0).unwrap(), &config(12)).unwrap();
    let r = sphere.radius.frame_degeneracy_radius.unwrap();
    assert!((r - std::f64::consts::PI).abs() < 0.1, "{r}");
    let flat_cfg = SolveConfig { order: 12, radius: RadiusConfig { scan_radius: 10.0, ..Default::default() }, ..Default::default() };
    let flat = solve(&CurvatureMap::zero(2), &flat_cfg).unwrap();
    assert_eq!(flat.radius.frame_degeneracy_radius, None);
    let again = radius_estimate(&CurvatureMap::zero(2), &flat.gauge, &flat_cfg.radius).unwrap();
    assert_eq!(again.frame_degeneracy_radius, None);
    assert!(again.majorant_coeffs.iter().all(|&x| x == 0.0));
}

//! Monte Carlo checks of the estimators against their population values.

use bixu_core::inference::UStats;
use bixu_core::kernels::{ustat_bruteforce, QuadrupletKernel};
use bixu_core::numeric::{mean, sample_variance};
use bixu_core::sequence::dims_for_index;
use bixu_core::wbedd::{
    power_law_density, power_law_moment, rng_from_seed, sample_graphon, sample_network,
    theoretical_variances, WbeddParams,
};

fn reference_params() -> WbeddParams {
    WbeddParams::new(1.0, 2.0 + 6f64.sqrt(), 1.0 + 2f64.sqrt()).unwrap()
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, eps, depth)
}

#[test]
fn power_law_moments_match_quadrature() {
    for alpha in [0.0, 0.5, 1.0, 1.0 + 2f64.sqrt(), 2.0 + 6f64.sqrt(), 6.3, 10.0] {
        let mass = simpson(&|u| power_law_density(alpha, u), 0.0, 1.0, 1e-13, 40);
        assert!((mass - 1.0).abs() < 1e-10, "alpha={alpha}: mass {mass}");
        for k in 1..=4u32 {
            let q = simpson(&|u| power_law_density(alpha, u).powi(k as i32), 0.0, 1.0, 1e-12, 40);
            let exact = power_law_moment(alpha, k);
            assert!((q - exact).abs() < 1e-8 * exact, "alpha={alpha} k={k}: {q} vs {exact}");
        }
    }
}

#[test]
fn ustat_means_match_expectations() {
    let params = reference_params();
    let expected = UStats::expected(1.0, &params.moments()).as_array();
    let (m, n) = dims_for_index(0.5, 256).unwrap();
    let draws: Vec<[f64; 6]> = (0..300)
        .map(|r| UStats::compute(&sample_network(&params, m, n, 1000 + r).unwrap()).unwrap().as_array())
        .collect();
    for k in 0..6 {
        let xs: Vec<f64> = draws.iter().map(|d| d[k]).collect();
        let se = (sample_variance(&xs) / xs.len() as f64).sqrt();
        let z = (mean(&xs) - expected[k]) / se;
        assert!(z.abs() < 4.0, "h{}: mean {} vs {} (z = {z})", k + 1, mean(&xs), expected[k]);
    }
}

#[test]
fn homogeneous_grand_mean_is_lambda() {
    let params = WbeddParams::new(2.5, 0.0, 0.0).unwrap();
    let y = sample_network(&params, 300, 200, 7).unwrap();
    let u = UStats::compute(&y).unwrap();
    // sd of the grand mean is √(2.5 / 60000) ≈ 0.0065
    assert!((u.h5 - 2.5).abs() < 0.03);
    assert!((u.theta().unwrap() - 1.0).abs() < 0.02);
}

#[test]
fn product_form_expectation_matches_graphon_integral() {
    let (lambda, beta) = (3.0_f64, 0.8);
    let w = move |u: f64, v: f64| 1.0 + beta * (2.0 * u - 1.0) * (2.0 * v - 1.0);
    // Both marginals of w are 1, so the target is λ³∬w(w − 1) = λ³β²/9.
    let target = lambda.powi(3) * beta * beta / 9.0;
    let xs: Vec<f64> = (0..40)
        .map(|r| {
            let y = sample_graphon(lambda, 24, 24, 500 + r, w).unwrap();
            ustat_bruteforce(&y, &QuadrupletKernel::ProductForm).unwrap()
        })
        .collect();
    let se = (sample_variance(&xs) / xs.len() as f64).sqrt();
    assert!((mean(&xs) - target).abs() < 4.0 * se, "{} vs {target} (se {se})", mean(&xs));
}

#[test]
fn product_form_vanishes_for_separable_graphons() {
    let params = reference_params();
    let xs: Vec<f64> = (0..40)
        .map(|r| {
            ustat_bruteforce(
                &sample_network(&params, 20, 20, 900 + r).unwrap(),
                &QuadrupletKernel::ProductForm,
            )
            .unwrap()
        })
        .collect();
    let se = (sample_variance(&xs) / xs.len() as f64).sqrt();
    assert!(mean(&xs).abs() < 4.0 * se, "{} (se {se})", mean(&xs));
}

#[test]
fn generic_variance_recovers_closed_forms() {
    let params = reference_params();
    let moments = params.moments();
    let (m, n) = dims_for_index(0.5, 512).unwrap();
    let mut rng = rng_from_seed(17);
    let mut h1 = Vec::new();
    let mut h5 = Vec::new();
    for r in 0..64 {
        let y = sample_network(&params, m, n, 40 + r).unwrap();
        h1.push(
            bixu_core::inference::generic_asymptotic_variance(
                &y,
                &QuadrupletKernel::H1,
                0.5,
                200_000,
                &mut rng,
            )
            .unwrap(),
        );
        h5.push(
            bixu_core::inference::generic_asymptotic_variance(
                &y,
                &QuadrupletKernel::H5,
                0.5,
                200_000,
                &mut rng,
            )
            .unwrap(),
        );
    }
    let v_h1 = theoretical_variances(1.0, &moments, 0.5).unwrap().v_h1;
    let v_h5 = 2.0 * (moments.f2 - 1.0) + 2.0 * (moments.g2 - 1.0);
    assert!((mean(&h1) / v_h1 - 1.0).abs() < 0.15, "h1: {} vs {v_h1}", mean(&h1));
    assert!((mean(&h5) / v_h5 - 1.0).abs() < 0.15, "h5: {} vs {v_h5}", mean(&h5));
}

#[test]
fn variance_estimators_are_consistent() {
    let params = reference_params();
    let tv = theoretical_variances(1.0, &params.moments(), 0.5).unwrap();
    let (m, n) = dims_for_index(0.5, 2048).unwrap();
    let mut plug = Vec::new();
    let mut delta = Vec::new();
    let mut theta = Vec::new();
    for r in 0..60 {
        let y = sample_network(&params, m, n, 7000 + r).unwrap();
        let u = UStats::compute(&y).unwrap();
        plug.push(u.plugin_variance(y.c_hat()).unwrap().value);
        delta.push(u.delta_variance(y.c_hat()).unwrap().value);
        theta.push(u.theta().unwrap());
    }
    assert!((mean(&plug) / tv.v - 1.0).abs() < 0.10, "V̂ {} vs {}", mean(&plug), tv.v);
    assert!((mean(&delta) / tv.v_delta - 1.0).abs() < 0.10, "V̂δ {} vs {}", mean(&delta), tv.v_delta);
    assert!((mean(&theta) - 3.0).abs() < 0.05);
}

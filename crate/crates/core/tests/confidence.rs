use gpbandit::confidence::{
    beta_lighttail, beta_subgaussian, chowdhury_beta, conf_bounds, mu_norm_bound, regret_bound,
    BoundParams, ConcentrationParams,
};
use gpbandit::{Error, KernelSpec, Posterior};

/// Written out term by term, independently of the library.
#[allow(clippy::too_many_arguments)]
fn bound_reference(
    n: f64,
    gamma: f64,
    b: f64,
    c: f64,
    d: f64,
    lam: f64,
    delta: f64,
    r: f64,
) -> f64 {
    let beta = |dl: f64| (r / lam) * (2.0 * (1.0 / dl).ln()).sqrt();
    let norm_mu = b + n.sqrt() * beta(2.0 * delta / (3.0 * n));
    let delta_prime = delta / (3.0 * c * norm_mu.powf(d) * n.powf(d / 2.0));
    let factor = (2.0 * gamma / (n * (1.0 + lam.powi(-2)).ln())).sqrt();
    factor * (2.0 * b + beta(delta / 3.0) + beta(delta_prime)) + 2.0 / n.sqrt()
}

#[test]
fn bound_matches_independent_transcription() {
    let params = BoundParams::new(1.0, 0.1, 1).unwrap();
    let conc = ConcentrationParams::sub_gaussian(0.1).unwrap();
    let got = regret_bound(100, 5.0, &params, &conc, 0.1).unwrap();
    let expected = bound_reference(100.0, 5.0, 1.0, 1.0, 1.0, 0.1, 0.1, 0.1);
    assert!(
        (got - expected).abs() <= 1e-10 * expected,
        "{got} vs {expected}"
    );

    for (n, gamma, d, c) in [
        (10usize, 2.0, 2usize, 1.0),
        (1000, 30.0, 3, 0.5),
        (1, 0.0, 1, 2.0),
    ] {
        let params = BoundParams::with_c(2.0, 0.05, c, d).unwrap();
        let conc = ConcentrationParams::sub_gaussian(0.3).unwrap();
        let got = regret_bound(n, gamma, &params, &conc, 0.2).unwrap();
        let expected = bound_reference(n as f64, gamma, 2.0, c, d as f64, 0.2, 0.05, 0.3);
        assert!((got - expected).abs() <= 1e-10 * expected);
    }
}

#[test]
fn bound_with_zero_gain_is_discretization_term() {
    let params = BoundParams::new(1.0, 0.1, 1).unwrap();
    let conc = ConcentrationParams::sub_gaussian(0.1).unwrap();
    assert_eq!(regret_bound(25, 0.0, &params, &conc, 0.1).unwrap(), 0.4);
}

#[test]
fn bound_rejects_invalid_inputs() {
    let params = BoundParams::new(1.0, 0.1, 1).unwrap();
    let conc = ConcentrationParams::sub_gaussian(0.1).unwrap();
    assert!(regret_bound(0, 1.0, &params, &conc, 0.1).is_err());
    assert!(regret_bound(10, -1.0, &params, &conc, 0.1).is_err());
    assert!(regret_bound(10, 1.0, &params, &conc, 0.0).is_err());
    assert!(matches!(
        BoundParams::new(1.0, 1.0, 1),
        Err(Error::InvalidDelta(_))
    ));
    assert!(BoundParams::new(1.0, 0.1, 0).is_err());
}

#[test]
fn lighttail_second_branch() {
    // 2 log(1/δ)/h₀² = 2·ln 20/0.01 ≫ ξ₀ = 1
    let l20 = 20f64.ln();
    let expected = (2.0 * (200.0 * l20) * l20).sqrt() / 0.3;
    let got = beta_lighttail(1.0, 0.1, 0.3, 0.05).unwrap();
    assert!((got - expected).abs() <= 1e-12 * expected);
    assert!((got - 20.0 * l20 / 0.3).abs() <= 1e-12 * expected);
}

#[test]
fn lighttail_first_branch_equals_subgaussian() {
    // Large h₀ makes ξ₀ the active proxy, i.e. sub-Gaussian with R = √ξ₀.
    let a = beta_lighttail(4.0, 100.0, 0.2, 0.05).unwrap();
    let b = beta_subgaussian(2.0, 0.2, 0.05).unwrap();
    assert!((a - b).abs() <= 1e-14 * b);
}

#[test]
fn beta_monotone_in_delta() {
    let mut prev_s = f64::INFINITY;
    let mut prev_l = f64::INFINITY;
    for i in 1..100 {
        let delta = i as f64 / 100.0;
        let s = beta_subgaussian(0.5, 0.1, delta).unwrap();
        let l = beta_lighttail(0.8, 0.5, 0.1, delta).unwrap();
        assert!(s < prev_s && l <= prev_l);
        prev_s = s;
        prev_l = l;
    }
    for bad in [0.0, 1.0, -0.1, f64::NAN] {
        assert!(matches!(
            beta_subgaussian(1.0, 0.1, bad),
            Err(Error::InvalidDelta(_))
        ));
    }
}

#[test]
fn interval_is_symmetric_about_mean() {
    let kernel = KernelSpec::se(0.2).unwrap();
    let post = Posterior::fit(kernel, 0.1, vec![vec![0.2], vec![0.7]], vec![0.5, -0.3]).unwrap();
    let x = [0.4];
    let ci = conf_bounds(&post, &x, 2.0, 1.5).unwrap();
    let mu = post.mean(&x).unwrap();
    let sd = post.std_dev(&x).unwrap();
    assert!(((ci.upper + ci.lower) / 2.0 - mu).abs() < 1e-15);
    assert!((ci.width() - 2.0 * 3.5 * sd).abs() < 1e-14);
    let only_b = conf_bounds(&post, &x, 2.0, 0.0).unwrap();
    assert!((only_b.width() - 4.0 * sd).abs() < 1e-14);
    assert!(conf_bounds(&post, &x, 2.0, -1.0).is_err());
}

#[test]
fn mu_norm_bound_cases() {
    let beta = |d: f64| beta_subgaussian(0.1, 0.1, d);
    let got = mu_norm_bound(1.0, beta, 16, 0.1).unwrap();
    let expected = 1.0 + 4.0 * (2.0 * (80.0f64).ln()).sqrt();
    assert!((got - expected).abs() < 1e-12);
    assert!(mu_norm_bound(1.0, beta, 0, 0.1).is_err());
    // 2δ/n must stay inside (0, 1)
    assert!(mu_norm_bound(1.0, beta, 1, 0.6).is_err());
}

#[test]
fn chowdhury_multiplier() {
    let got = chowdhury_beta(1.0, 0.5, 3.0, 0.05).unwrap();
    assert!((got - (1.0 + 0.5 * (2.0 * (4.0 + 20f64.ln())).sqrt())).abs() < 1e-14);
    assert!(chowdhury_beta(1.0, 0.5, -1.0, 0.05).is_err());
}

use gpbandit::noise::{gaussian_subg_r, laplace_lighttail_params, laplace_mgf, NoiseFamily};
use gpbandit::{ConcentrationParams, NoiseModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn draws(model: &NoiseModel, seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| model.sample(&mut rng)).collect()
}

#[test]
fn pinned_sequences() {
    let g = draws(&NoiseModel::gaussian(0.1).unwrap(), 42, 5);
    assert_eq!(
        g,
        [
            0.04779812383510218,
            0.13340706102318078,
            -0.021086668327103028,
            0.04763469238088214,
            -0.05120906220561634
        ]
    );
    let l = draws(&NoiseModel::laplace(0.1).unwrap(), 42, 5);
    assert_eq!(
        l,
        [
            0.045223032962452975,
            0.2308108472257423,
            -0.0156615441526441,
            0.029399669094895827,
            -0.0549587661104342
        ]
    );
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (
        m,
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0),
    )
}

#[test]
fn gaussian_moments() {
    let sigma = 0.3;
    let (m, v) = mean_var(&draws(&NoiseModel::gaussian(sigma).unwrap(), 7, 1_000_000));
    assert!(m.abs() <= 4.0 * sigma / 1e3, "{m}");
    assert!((v / (sigma * sigma) - 1.0).abs() < 0.01, "{v}");
}

#[test]
fn laplace_moments() {
    let b = 0.2;
    let xs = draws(&NoiseModel::laplace(b).unwrap(), 8, 1_000_000);
    let (m, v) = mean_var(&xs);
    assert!(m.abs() <= 4.0 * (2.0f64).sqrt() * b / 1e3, "{m}");
    assert!((v / (2.0 * b * b) - 1.0).abs() < 0.02, "{v}");
    // E|ε| = b
    let mad = xs.iter().map(|x| x.abs()).sum::<f64>() / xs.len() as f64;
    assert!((mad / b - 1.0).abs() < 0.01);
}

/// `M''(h₀)` by a central second difference of `M`.
fn second_difference(b: f64, h0: f64) -> f64 {
    let e = 1e-5;
    (laplace_mgf(b, h0 + e) - 2.0 * laplace_mgf(b, h0) + laplace_mgf(b, h0 - e)) / (e * e)
}

#[test]
fn laplace_params_against_finite_difference() {
    for (b, h0_expected, xi0_expected) in [(0.1, 5.0, 0.0829629629629), (1.0, 0.5, 224.0 / 27.0)] {
        let (h0, xi0) = laplace_lighttail_params(b).unwrap();
        assert!((h0 - h0_expected).abs() < 1e-12);
        assert!((xi0 - xi0_expected).abs() < 1e-10 * xi0_expected.max(1.0));
        let fd = second_difference(b, h0);
        assert!((fd - xi0).abs() < 1e-4 * xi0, "{fd} vs {xi0}");
    }
    assert!(laplace_lighttail_params(0.0).is_err());
}

#[test]
fn mgf_dominated_by_gaussian_envelope() {
    for b in [0.05, 0.3, 1.0, 4.0] {
        let model = NoiseModel::laplace(b).unwrap();
        let ConcentrationParams::LightTailed { xi0, h0 } = model.concentration() else {
            panic!("laplace must be light-tailed");
        };
        for i in -500..=500 {
            let h = h0 * i as f64 / 500.0;
            let env = (xi0 * h * h / 2.0).exp();
            assert!(model.mgf(h) <= env * (1.0 + 1e-12));
        }
        assert!(model.mgf(1.0 / b).is_infinite());
        let g = NoiseModel::gaussian(b).unwrap();
        assert_eq!(g.concentration(), ConcentrationParams::SubGaussian { r: b });
        for i in -100..=100 {
            let h = i as f64 * 0.1 / b;
            assert!(g.mgf(h) <= (h * h * b * b / 2.0).exp() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn constructors() {
    assert_eq!(gaussian_subg_r(0.1).unwrap(), 0.1);
    assert!(NoiseModel::gaussian(-1.0).is_err());
    assert!(NoiseModel::laplace(f64::NAN).is_err());
    assert_eq!(
        NoiseModel::laplace(0.5).unwrap().family(),
        NoiseFamily::Laplace { scale: 0.5 }
    );
}

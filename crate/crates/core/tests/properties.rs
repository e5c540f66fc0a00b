use approx::assert_relative_eq;
use ndarray::Array1;
use num_complex::Complex64;
use proptest::prelude::*;

use nfsim_core::channel::{compose_sns, ChannelRealization, SnsMask, WavefrontModel};
use nfsim_core::codebook::{build_ff_codebook, distance_rings, Codebook, Codeword};
use nfsim_core::geometry::{ArrayGeometry, PolarPoint};
use nfsim_core::steering::{inner, steering, vector_norm, SteeringModel};
use nfsim_core::stochastic::{sample_drop, ChannelModel, ScenarioConfig};
use nfsim_core::training::{achievable_rate, exhaustive_search};

fn geometry() -> impl Strategy<Value = ArrayGeometry> {
    (1usize..200, 0.2f64..1.5, 1e9f64..60e9).prop_map(|(n, frac, fc)| {
        let d = frac * nfsim_core::SPEED_OF_LIGHT / fc;
        ArrayGeometry::ula(n, d, fc).unwrap()
    })
}

fn user(geom: &ArrayGeometry) -> impl Strategy<Value = PolarPoint> {
    let min = geom.max_element_offset() * 1.01 + 1e-3;
    (-1.0f64..=1.0, min..min + 500.0).prop_map(|(t, r)| PolarPoint::new(t, r).unwrap())
}

fn small_scenario() -> ScenarioConfig {
    ScenarioConfig { geometry: ArrayGeometry::ula_half_wavelength(48, 15e9).unwrap(), r_min: 2.0, r_max: 40.0, ..Default::default() }
}

fn complex_vec(n: usize) -> impl Strategy<Value = Array1<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_unit_norm_and_matched((g, p) in geometry().prop_flat_map(|g| (Just(g), user(&g)))) {
        for model in [SteeringModel::ExactSpherical, SteeringModel::PlanarFF, SteeringModel::FresnelSecondOrder] {
            let v = steering(&g, p, model).unwrap();
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            prop_assert!((inner(&v.entries, &v.entries).norm() - 1.0).abs() < 1e-12);
            let modulus = 1.0 / (g.num_elements() as f64).sqrt();
            prop_assert!(v.entries.iter().all(|z| (z.norm() - modulus).abs() < 1e-12));
        }
    }

    #[test]
    fn drop_factorization_and_budget(index in 0u64..10_000, seed in any::<u64>()) {
        let cfg = ScenarioConfig { master_seed: seed, ..small_scenario() };
        let drop = sample_drop(&cfg, index, None).unwrap();
        prop_assert_eq!(&drop, &sample_drop(&cfg, index, None).unwrap());

        let los = drop.los().amplitude.norm_sqr();
        let nlos: f64 = drop.paths[1..].iter().map(|p| p.amplitude.norm_sqr()).sum();
        let expected = 10f64.powf(-cfg.rice_factor_db / 10.0);
        prop_assert!(((nlos / los) - expected).abs() <= 1e-9 * expected);

        let real = drop.realization(&cfg.geometry, ChannelModel::NfSns).unwrap();
        let again = real.recompose(0).unwrap();
        for (a, b) in again.iter().zip(real.response().iter()) {
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
        // masked per-element path power never exceeds the stationary one
        let a = &real.manifolds[0];
        for m in 0..cfg.geometry.num_elements() {
            let (mut masked, mut full) = (0.0, 0.0);
            for (k, p) in real.paths.iter().enumerate() {
                let base = (a[[m, k]] * p.amplitude).norm_sqr();
                masked += real.mask.values[[m, k]].powi(2) * base;
                full += base;
            }
            prop_assert!(masked <= full);
        }
    }

    #[test]
    fn compose_is_linear_in_cfr(h1 in complex_vec(6), h2 in complex_vec(6), index in 0u64..1000) {
        let cfg = ScenarioConfig { num_nlos_paths: 5, ..small_scenario() };
        let drop = sample_drop(&cfg, index, None).unwrap();
        let real = drop.realization(&cfg.geometry, ChannelModel::NfSns).unwrap();
        let a = &real.manifolds[0];
        let sum = compose_sns(&real.mask, a, &(&h1 + &h2)).unwrap();
        let parts = compose_sns(&real.mask, a, &h1).unwrap() + compose_sns(&real.mask, a, &h2).unwrap();
        for (x, y) in sum.iter().zip(parts.iter()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn search_invariances(h in complex_vec(16), scale_re in -3.0f64..3.0, scale_im in -3.0f64..3.0, phase in 0.0f64..6.28) {
        prop_assume!(vector_norm(&h) > 1e-6);
        let scale = Complex64::new(scale_re, scale_im);
        prop_assume!(scale.norm() > 1e-3);
        let g = ArrayGeometry::ula_half_wavelength(16, 15e9).unwrap();
        let book = build_ff_codebook(&g).unwrap();
        let base = exhaustive_search(&h, &book).unwrap();
        let scaled = exhaustive_search(&h.mapv(|z| z * scale), &book).unwrap();
        prop_assert_eq!(base.best_index, scaled.best_index);
        prop_assert!(base.best_gain <= 1.0 + 1e-12);

        // global phase on every codeword changes no gain
        let rotated = Codebook {
            codewords: book.codewords.iter().map(|c| Codeword { weights: c.weights.mapv(|z| z * Complex64::from_polar(1.0, phase)), ..c.clone() }).collect(),
            ..book.clone()
        };
        let rot = exhaustive_search(&h, &rotated).unwrap();
        prop_assert_eq!(rot.best_index, base.best_index);
        prop_assert!((rot.best_gain - base.best_gain).abs() < 1e-12);

        // adding codewords never lowers the best gain
        let mut bigger = book.clone();
        bigger.codewords.push(Codeword { weights: &h / Complex64::new(vector_norm(&h), 0.0), theta: 0.0, r: f64::INFINITY, angle_index: 0, ring: 1 });
        let more = exhaustive_search(&h, &bigger).unwrap();
        prop_assert!(more.best_gain >= base.best_gain);
        prop_assert!((more.best_gain - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_monotone(h in complex_vec(8), lo in 0.0f64..1e3, extra in 0.0f64..1e3) {
        let w = Codeword { weights: Array1::from_elem(8, Complex64::new(8f64.sqrt().recip(), 0.0)), theta: 0.0, r: f64::INFINITY, angle_index: 0, ring: 0 };
        let a = achievable_rate(&h, &w, lo).unwrap();
        let b = achievable_rate(&h, &w, lo + extra).unwrap();
        prop_assert!(b >= a);
        let louder = h.mapv(|z| z * 2.0);
        prop_assert!(achievable_rate(&louder, &w, lo).unwrap() >= a);
    }

    #[test]
    fn rings_strictly_decrease(theta in -1.0f64..=1.0, beta in 0.5f64..3.0, floor in 0.5f64..20.0) {
        let g = ArrayGeometry::ula_half_wavelength(150, 15e9).unwrap();
        let rings = distance_rings(&g, theta, beta, floor).unwrap();
        prop_assert!(rings[0].is_infinite());
        prop_assert!(rings[1..].windows(2).all(|w| w[0] > w[1]));
        prop_assert!(rings[1..].iter().all(|&r| r >= floor));
    }
}

#[test]
fn realization_round_trip() {
    let cfg = small_scenario();
    let dir = tempfile::tempdir().unwrap();
    for index in [0u64, 7, 123] {
        let drop = sample_drop(&cfg, index, None).unwrap();
        let real = drop.realization(&cfg.geometry, ChannelModel::NfSns).unwrap();
        let path = dir.path().join("channel.csv");
        nfsim_core::io::save_realization(&real, 0, &path).unwrap();
        assert!(dir.path().join("paths.csv").exists());
        let back = nfsim_core::io::load_realization(&path).unwrap();
        assert_eq!(back.paths.len(), real.paths.len());
        assert_eq!(back.mask.values, real.mask.values);
        for (a, b) in back.manifolds[0].iter().zip(real.manifolds[0].iter()) {
            assert_relative_eq!(a.re, b.re, max_relative = 1e-15);
            assert_relative_eq!(a.im, b.im, max_relative = 1e-15);
        }
        for (a, b) in back.response().iter().zip(real.response().iter()) {
            assert!((a - b).norm() <= 1e-14 * b.norm());
        }
        assert_eq!(back.user, real.user);
        assert_eq!(back.geometry, real.geometry);
    }
}

#[test]
fn planar_realization_is_unit_amplitude() {
    let cfg = small_scenario();
    let drop = sample_drop(&cfg, 4, None).unwrap();
    let real = ChannelRealization::build(
        cfg.geometry,
        drop.user,
        drop.paths.clone(),
        SnsMask::all_visible(48, drop.paths.len()),
        vec![15e9, 15.001e9],
        WavefrontModel::Planar,
    )
    .unwrap();
    assert_eq!(real.responses.len(), 2);
    assert!(real.manifolds[1].iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
}

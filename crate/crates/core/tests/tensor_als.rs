mod oracle;

use mtensor::{outer_product3, rank1_approx, AlsConfig, Axis, Dims, FactorTriple, Tensor3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 0.05 {
            return v;
        }
    }
}

#[test]
fn recovers_seeded_rank_one_tensors() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA15);
    for case in 0..40 {
        let (s, a, t) = (rng.gen_range(1..=6), rng.gen_range(1..=5), rng.gen_range(1..=4));
        let scale = rng.gen_range(0.5..10.0);
        let mut truth = FactorTriple::from_unnormalized(
            scale,
            &random_vec(&mut rng, s),
            &random_vec(&mut rng, a),
            &random_vec(&mut rng, t),
        )
        .unwrap();
        truth.normalize_signs();
        let tensor = truth.reconstruct().unwrap();
        let fit = rank1_approx(&tensor, &AlsConfig::default());
        assert!(fit.iterations <= 50, "case {case}: {} iterations", fit.iterations);
        assert!(fit.residual <= 1e-8 * tensor.frobenius_norm(), "case {case}: residual {}", fit.residual);
        assert!((fit.factors.weight - truth.weight).abs() <= 1e-6 * truth.weight.max(1.0));
        for (got, want) in [(&fit.factors.x, &truth.x), (&fit.factors.y, &truth.y), (&fit.factors.z, &truth.z)] {
            for (g, w) in got.iter().zip(want.iter()) {
                assert!((g - w).abs() <= 1e-6, "case {case}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn matches_grid_search_on_2x2x2() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2222);
    for case in 0..5 {
        let vals: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let t = Tensor3::new(Dims::new(2, 2, 2), vals.to_vec()).unwrap();
        let fit = rank1_approx(&t, &AlsConfig::default());
        let grid = oracle::grid_rank1_residual(&vals);
        assert!((fit.residual - grid).abs() <= 1e-3, "case {case}: als {} grid {}", fit.residual, grid);
        assert!(fit.residual <= grid + 1e-12, "ALS should not lose to a coarse grid");
    }
}

#[test]
fn single_transaction_tensor_decomposes_to_basis() {
    let mut t = Tensor3::<f64>::zeros(Dims::new(3, 2, 4)).unwrap();
    t.add_at(1, 0, 2, 100.0).unwrap();
    let fit = rank1_approx(&t, &AlsConfig::default());
    assert_eq!(fit.factors.weight, 100.0);
    assert_eq!(fit.residual, 0.0);
    assert_eq!(fit.factors.x, vec![0.0, 1.0, 0.0]);
    assert_eq!(fit.factors.y, vec![1.0, 0.0]);
    assert_eq!(fit.factors.z, vec![0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn f32_fit_tracks_f64_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vals: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t64 = Tensor3::new(Dims::new(2, 3, 4), vals.clone()).unwrap();
    let t32 = Tensor3::new(Dims::new(2, 3, 4), vals.iter().map(|&v| v as f32).collect()).unwrap();
    let a = rank1_approx(&t64, &AlsConfig::default());
    let b = rank1_approx(&t32, &AlsConfig::new(200, 1e-6f32, 0).unwrap());
    assert!((a.factors.weight - b.factors.weight as f64).abs() < 1e-4);
    assert!((a.residual - b.residual as f64).abs() < 1e-4);
}

fn tensor_strategy() -> impl Strategy<Value = Tensor3<f64>> {
    (1usize..5, 1usize..5, 1usize..5).prop_flat_map(|(s, a, t)| {
        prop::collection::vec(-10.0f64..10.0, s * a * t).prop_map(move |v| Tensor3::new(Dims::new(s, a, t), v).unwrap())
    })
}

fn unit_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n).prop_filter("non-degenerate", |v| v.iter().any(|x| x.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn unfold_preserves_entries(t in tensor_strategy()) {
        for axis in Axis::ALL {
            let m = t.unfold(axis);
            prop_assert_eq!(m.rows(), t.dims().axis_len(axis));
            let mut a: Vec<f64> = m.as_slice().to_vec();
            let mut b: Vec<f64> = t.values().to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn outer_product_is_multiplicative(x in unit_vec(3), y in unit_vec(2), z in unit_vec(4)) {
        let t = outer_product3(&x, &y, &z).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                for k in 0..4 {
                    prop_assert_eq!(t.get(i, j, k), x[i] * y[j] * z[k]);
                }
            }
        }
    }

    #[test]
    fn residual_never_increases(t in tensor_strategy(), seed in any::<u64>()) {
        let fit = rank1_approx(&t, &AlsConfig::new(200, 1e-10, seed).unwrap());
        let slack = 1e-12 * t.frobenius_norm().max(1.0);
        for w in fit.residual_history.windows(2) {
            prop_assert!(w[1] <= w[0] + slack, "{:?}", fit.residual_history);
        }
        prop_assert!(fit.residual <= t.frobenius_norm() + slack);
    }

    #[test]
    fn fit_is_deterministic(t in tensor_strategy(), seed in any::<u64>()) {
        let cfg = AlsConfig::new(200, 1e-10, seed).unwrap();
        let a = rank1_approx(&t, &cfg);
        let b = rank1_approx(&t, &cfg);
        prop_assert_eq!(a.factors, b.factors);
        prop_assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    }

    #[test]
    fn factors_are_unit_and_residual_consistent(t in tensor_strategy()) {
        let fit = rank1_approx(&t, &AlsConfig::default());
        let f = &fit.factors;
        for v in [&f.x, &f.y, &f.z] {
            let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() < 1e-9 || f.weight == 0.0);
        }
        prop_assert!(f.weight >= 0.0);
        let direct = f.residual(&t);
        prop_assert!((direct - fit.residual).abs() <= 1e-9 * t.frobenius_norm().max(1.0));
    }
}

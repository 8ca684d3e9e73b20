mod common;

use common::*;
use hyperpinn::autodiff::{HyperDual, Tape, Var};
use hyperpinn::nets::{forward, init_params, ArchSpec, InitMode};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn reverse_gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let err = expression_gradient_error(&mut rng);
        assert!(err < 1e-6, "trial {trial}: relative error {err:e}");
    }
}

#[test]
fn hyperdual_is_exact_on_quartic_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let c = random_poly(&mut rng);
        let t = f64::from(rng.random_range(-16i32..=16)) / 8.0;
        let x = f64::from(rng.random_range(-16i32..=16)) / 8.0;
        assert_eq!(poly_derivative_mismatch(&c, t, x), 0.0, "{c:?} at ({t}, {x})");
    }
    // arbitrary points: equal up to rounding
    for _ in 0..200 {
        let c = random_poly(&mut rng);
        let (t, x) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        assert!(poly_derivative_mismatch(&c, t, x) < 1e-12);
    }
}

#[test]
fn squared_input_derivative_gradient_matches_differences() {
    for seed in 0..10 {
        let err = nested_gradient_error(seed);
        assert!(err < 1e-5, "seed {seed}: {err:e}");
    }
}

fn grad_of(x: &[f64], build: impl for<'t> Fn(&[Var<'t>]) -> Var<'t>) -> Vec<f64> {
    let tape = Tape::new();
    let leaves: Vec<_> = x.iter().map(|&v| tape.leaf(v)).collect();
    let adj = tape.backward(build(&leaves)).unwrap();
    leaves.iter().map(|&l| adj.grad(l)).collect()
}

#[test]
fn gradient_of_a_sum_is_the_sum_of_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let (e1, e2) = (random_expr(&mut rng, 3, 4), random_expr(&mut rng, 3, 4));
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g1 = grad_of(&x, |l| e1.eval(l));
        let g2 = grad_of(&x, |l| e2.eval(l));
        let gs = grad_of(&x, |l| e1.eval(l) + e2.eval(l));
        for i in 0..3 {
            let want = g1[i] + g2[i];
            assert!((gs[i] - want).abs() <= 1e-12 * (1.0 + want.abs()), "{} vs {want}", gs[i]);
        }
    }
}

proptest! {
    #[test]
    fn zero_seeds_reduce_to_real_forward(
        seed in 0u64..1000,
        input in proptest::collection::vec(-2.0f64..2.0, 3),
    ) {
        let spec = ArchSpec::mlp(3, &[5, 4], 2);
        let theta = init_params(&spec, seed, &InitMode::Standard).unwrap();
        let real = forward(&spec, theta.values(), &input).unwrap();
        let lifted: Vec<HyperDual> = theta.values().iter().map(|&v| HyperDual::constant(v)).collect();
        let hd_in: Vec<HyperDual> = input.iter().map(|&v| HyperDual::constant(v)).collect();
        let hd = forward(&spec, &lifted, &hd_in).unwrap();
        for (a, b) in real.iter().zip(&hd) {
            prop_assert_eq!(*a, b.val);
            prop_assert_eq!((b.dt, b.dx, b.dxx), (0.0, 0.0, 0.0));
        }
    }
}

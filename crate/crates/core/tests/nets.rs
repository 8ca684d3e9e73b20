mod common;

use common::enumerate_parameters;
use hyperpinn::models::{architecture, init_model, ModelKind, Problem};
use hyperpinn::nets::{forward, param_count, Activation, ArchSpec, Net, Parameterization};
use proptest::prelude::*;

fn arb_spec() -> impl Strategy<Value = ArchSpec> {
    (1usize..12, proptest::collection::vec(1usize..40, 0..6), 1usize..12)
        .prop_map(|(i, h, o)| ArchSpec::mlp(i, &h, o))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn param_count_matches_enumeration(spec in arb_spec()) {
        prop_assert_eq!(param_count(&spec), enumerate_parameters(&spec));
        let layers = spec.layers();
        prop_assert_eq!(layers[0].w_offset, 0);
        for pair in layers.windows(2) {
            prop_assert_eq!(pair[0].end(), pair[1].w_offset);
        }
        prop_assert_eq!(layers.last().unwrap().end(), param_count(&spec));
    }

    #[test]
    fn linear_layer_without_bias_is_homogeneous(
        weights in proptest::collection::vec(-3.0f64..3.0, 12),
        input in proptest::collection::vec(-3.0f64..3.0, 4),
        c in -5.0f64..5.0,
    ) {
        let spec = ArchSpec::mlp(4, &[], 3).with_activation(Activation::Identity);
        let mut theta = weights.clone();
        theta.extend([0.0; 3]);
        let scaled: Vec<f64> = input.iter().map(|v| c * v).collect();
        let y = forward(&spec, &theta, &input).unwrap();
        let yc = forward(&spec, &theta, &scaled).unwrap();
        for (a, b) in y.iter().zip(&yc) {
            prop_assert!((c * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn generated_main_network_has_the_main_length(seed in 0u64..500, nu_code in -1.0f64..1.0) {
        let Net::Hyper(h) = init_model(Problem::Burgers, ModelKind::HyperPinn, seed).unwrap() else {
            unreachable!()
        };
        let main = h.generate_main(&Parameterization(vec![nu_code])).unwrap();
        prop_assert_eq!(main.len(), param_count(h.main_spec()));
    }
}

#[test]
fn burgers_counts_and_lorenz_main() {
    let counts: Vec<(usize, usize)> = ModelKind::ALL
        .iter()
        .map(|&k| {
            let a = architecture(Problem::Burgers, k);
            (a.evaluated_spec().param_count(), a.trainable_count())
        })
        .collect();
    assert_eq!(counts, [(393, 9385), (401, 401), (9665, 9665)]);
    let lorenz = architecture(Problem::Lorenz, ModelKind::HyperPinn);
    assert_eq!(lorenz.evaluated_spec().param_count(), 115);
}

#[test]
fn lorenz_counts_follow_the_layer_sizes() {
    let counts: Vec<usize> = ModelKind::ALL
        .iter()
        .map(|&k| architecture(Problem::Lorenz, k).trainable_count())
        .collect();
    // dense-layer arithmetic for 3 → 16,8 → 115, 6 → 16 → 3 and 6 → 256 → 3
    assert_eq!(counts, [(3 * 16 + 16) + (16 * 8 + 8) + (8 * 115 + 115), 6 * 16 + 16 + 16 * 3 + 3, 6 * 256 + 256 + 256 * 3 + 3]);
}

mod common;

use ndarray::Array2;
use rand::Rng;
use strank::losses::LossKind;
use strank::model::Mlp;
use strank::sampling::RngStream;

use common::{max_rel_err, numeric_grad, random_instance};

#[test]
fn loss_gradients_match_central_differences() {
    let mut rng = RngStream::new(11, 0);
    for kind in LossKind::ALL {
        for _ in 0..40 {
            let inst = random_instance(kind, &mut rng);
            let numeric = numeric_grad(&inst.preds, 1e-5, |p| inst.value(p));
            let err = max_rel_err(&inst.grad(), &numeric, 1e-6);
            assert!(err < 1e-4, "{kind:?}: {err}");
        }
    }
}

#[test]
fn relational_gradients_sum_to_zero() {
    // Shift invariance within every pair or list implies zero column sums.
    let mut rng = RngStream::new(12, 0);
    for kind in [LossKind::Rank, LossKind::PairStrank, LossKind::ListStrank, LossKind::Pcc] {
        for _ in 0..50 {
            let mut inst = random_instance(kind, &mut rng);
            inst.spec.size_correction = false;
            let grad = inst.grad();
            for col in grad.columns() {
                assert!(col.sum().abs() < 1e-12, "{kind:?}");
            }
        }
    }
}

fn flatten(model: &Mlp) -> Vec<f64> {
    model
        .layers()
        .iter()
        .flat_map(|l| l.weight.iter().chain(l.bias.iter()).copied().collect::<Vec<_>>())
        .collect()
}

#[test]
fn mlp_backward_matches_central_differences() {
    let mut rng = RngStream::new(13, 0);
    for _ in 0..50 {
        let d = rng.random_range(1..=3);
        let hidden = rng.random_range(1..=6);
        let out = rng.random_range(1..=3);
        let batch = rng.random_range(1..=5);
        let model = Mlp::init(d, hidden, out, &mut rng).unwrap();
        let x = Array2::from_shape_simple_fn((batch, d), || rng.uniform(-1.0, 1.0));
        let d_out = Array2::from_shape_simple_fn((batch, out), || rng.uniform(-1.0, 1.0));
        // Scalar objective <d_out, f(x)> has gradient backward(d_out).
        let objective = |m: &Mlp| (&m.predict(x.view()).unwrap() * &d_out).sum();
        let (_, cache) = model.forward(x.view()).unwrap();
        let grads = model.backward(&cache, d_out.view()).unwrap();
        let analytic: Vec<f64> = grads
            .layers
            .iter()
            .flat_map(|l| l.weight.iter().chain(l.bias.iter()).copied().collect::<Vec<_>>())
            .collect();
        let theta = flatten(&model);
        let h = 1e-5;
        for (k, &a) in analytic.iter().enumerate() {
            let eval = |delta: f64| {
                let mut m = model.clone();
                let mut idx = k;
                for layer in m.layers_mut() {
                    let nw = layer.weight.len();
                    if idx < nw {
                        *layer.weight.iter_mut().nth(idx).unwrap() += delta;
                        break;
                    }
                    idx -= nw;
                    if idx < layer.bias.len() {
                        layer.bias[idx] += delta;
                        break;
                    }
                    idx -= layer.bias.len();
                }
                objective(&m)
            };
            let numeric = (eval(h) - eval(-h)) / (2.0 * h);
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            assert!(err < 1e-5, "param {k} of {}: analytic {a} numeric {numeric}", theta.len());
        }
    }
}

#[test]
fn backward_is_linear_in_output_gradient() {
    let mut rng = RngStream::new(14, 0);
    let model = Mlp::init(2, 8, 2, &mut rng).unwrap();
    let x = Array2::from_shape_simple_fn((6, 2), || rng.uniform(-1.0, 1.0));
    let d = Array2::from_shape_simple_fn((6, 2), || rng.uniform(-1.0, 1.0));
    let (_, cache) = model.forward(x.view()).unwrap();
    let once = model.backward(&cache, d.view()).unwrap();
    let twice = model.backward(&cache, (&d * 2.0).view()).unwrap();
    for (a, b) in once.layers.iter().zip(&twice.layers) {
        for (p, q) in a.weight.iter().zip(&b.weight) {
            assert!((2.0 * p - q).abs() < 1e-12);
        }
    }
    let zero = model.backward(&cache, Array2::zeros((6, 2)).view()).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

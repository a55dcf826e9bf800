use crate::error::{Error, Result};
use crate::model::{GradBuffer, Mlp};

use super::TrainConfig;

/// First and second moment estimates, shape-matched to the model.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimState {
    pub first: GradBuffer,
    pub second: GradBuffer,
    pub step: u64,
}

impl OptimState {
    pub fn new(model: &Mlp) -> Self {
        Self {
            first: GradBuffer::zeros_like(model),
            second: GradBuffer::zeros_like(model),
            step: 0,
        }
    }
}

/// One AdamW update of a flat parameter slice. `step` is the 1-based step
/// number used for bias correction.
#[allow(clippy::too_many_arguments)]
pub fn adamw_update(
    theta: &mut [f64],
    grad: &[f64],
    first: &mut [f64],
    second: &mut [f64],
    step: u64,
    lr: f64,
    config: &TrainConfig,
) {
    let b1 = config.beta1;
    let b2 = config.beta2;
    let c1 = 1.0 - b1.powi(step as i32);
    let c2 = 1.0 - b2.powi(step as i32);
    let decay = 1.0 - lr * config.weight_decay;
    for k in 0..theta.len() {
        let g = grad[k];
        first[k] = b1 * first[k] + (1.0 - b1) * g;
        second[k] = b2 * second[k] + (1.0 - b2) * g * g;
        let m_hat = first[k] / c1;
        let v_hat = second[k] / c2;
        theta[k] = theta[k] * decay - lr * m_hat / (v_hat.sqrt() + config.adam_eps);
    }
}

/// Apply decoupled weight decay and a bias-corrected Adam step to every
/// parameter of `model`.
pub fn adamw_step(
    model: &mut Mlp,
    grads: &GradBuffer,
    state: &mut OptimState,
    lr: f64,
    config: &TrainConfig,
) -> Result<()> {
    if !(lr >= 0.0) {
        return Err(Error::Domain(format!("learning rate must be >= 0, got {lr}")));
    }
    let shape_ok = |g: &GradBuffer| {
        g.layers.len() == model.layers().len()
            && g.layers.iter().zip(model.layers()).all(|(a, b)| {
                a.weight.dim() == b.weight.dim() && a.bias.len() == b.bias.len()
            })
    };
    if !shape_ok(grads) || !shape_ok(&state.first) || !shape_ok(&state.second) {
        return Err(Error::Argument("gradient or optimizer state shape mismatch".into()));
    }
    state.step += 1;
    let step = state.step;
    for (k, layer) in model.layers_mut().iter_mut().enumerate() {
        let g = &grads.layers[k];
        let m = &mut state.first.layers[k];
        let v = &mut state.second.layers[k];
        adamw_update(
            layer.weight.as_slice_mut().expect("standard layout"),
            g.weight.as_slice().expect("standard layout"),
            m.weight.as_slice_mut().expect("standard layout"),
            v.weight.as_slice_mut().expect("standard layout"),
            step,
            lr,
            config,
        );
        adamw_update(
            layer.bias.as_slice_mut().expect("contiguous"),
            g.bias.as_slice().expect("contiguous"),
            m.bias.as_slice_mut().expect("contiguous"),
            v.bias.as_slice_mut().expect("contiguous"),
            step,
            lr,
            config,
        );
    }
    Ok(())
}

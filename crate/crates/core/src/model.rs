//! Rectifier MLP with hand-written forward and backward passes.
//!
//! The default network is `d -> 128 -> 128 -> n_genes` with ReLU between
//! layers and an identity output. `hidden_dim = 0` collapses it to a single
//! linear map (a regression head on precomputed features).

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};

use crate::error::{Error, Result};
use crate::sampling::RngStream;

const CHECKPOINT_MAGIC: &[u8; 8] = b"STRKMLP1";

/// Weight is stored `fan_in x fan_out` so a batch maps as `X W + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Linear {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Linear {
    fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            weight: Array2::zeros((fan_in, fan_out)),
            bias: Array1::zeros(fan_out),
        }
    }

    pub fn fan_in(&self) -> usize {
        self.weight.nrows()
    }

    pub fn fan_out(&self) -> usize {
        self.weight.ncols()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    layers: Vec<Linear>,
    /// Bumped on every mutable access, so caches from older weights are caught.
    version: u64,
}

/// Gradient of a scalar loss with respect to every [`Mlp`] parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct GradBuffer {
    pub layers: Vec<Linear>,
}

impl GradBuffer {
    pub fn zeros_like(model: &Mlp) -> Self {
        Self {
            layers: model.layers.iter().map(|l| Linear::zeros(l.fan_in(), l.fan_out())).collect(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weight *= factor;
            l.bias *= factor;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.weight.iter().chain(l.bias.iter()))
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// Activations retained by [`Mlp::forward`] for the backward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    /// Input to each layer; `inputs[0]` is the batch itself.
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Array2<f64>>,
    version: u64,
    shape: Vec<(usize, usize)>,
}

impl Mlp {
    /// Random init: weights ~ N(0, 2 / fan_in), biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    ///
    /// Nonzero biases spread the rectifier kinks over the input range; with a
    /// one-dimensional input and zero biases every kink starts at the origin.
    pub fn init(
        input_dim: usize,
        hidden_dim: usize,
        output_dim: usize,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(Error::Argument("input and output widths must be at least 1".into()));
        }
        let widths = if hidden_dim == 0 {
            vec![input_dim, output_dim]
        } else {
            vec![input_dim, hidden_dim, hidden_dim, output_dim]
        };
        let layers = widths
            .windows(2)
            .map(|w| {
                let std = (2.0 / w[0] as f64).sqrt();
                let bound = 1.0 / (w[0] as f64).sqrt();
                Linear {
                    weight: Array2::from_shape_simple_fn((w[0], w[1]), || std * rng.standard_normal()),
                    bias: Array1::from_shape_simple_fn(w[1], || rng.uniform(-bound, bound)),
                }
            })
            .collect();
        Ok(Self { layers, version: 0 })
    }

    pub fn from_layers(layers: Vec<Linear>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Argument("a network needs at least one layer".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.bias.len() != l.fan_out() {
                return Err(Error::Argument(format!("layer {k}: bias width mismatch")));
            }
            if k > 0 && layers[k - 1].fan_out() != l.fan_in() {
                return Err(Error::Argument(format!("layer {k}: input width does not chain")));
            }
            if !l.weight.iter().chain(l.bias.iter()).all(|v| v.is_finite()) {
                return Err(Error::Argument(format!("layer {k}: non-finite parameter")));
            }
        }
        Ok(Self { layers, version: 0 })
    }

    pub fn layers(&self) -> &[Linear] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Linear] {
        self.version += 1;
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").fan_out()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    fn shape(&self) -> Vec<(usize, usize)> {
        self.layers.iter().map(|l| l.weight.dim()).collect()
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Argument(format!(
                "input has {} columns, network expects {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, ForwardCache)> {
        self.check_input(&x)?;
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(last);
        let mut h = x.to_owned();
        for (k, layer) in self.layers.iter().enumerate() {
            let z = h.dot(&layer.weight) + &layer.bias;
            inputs.push(h);
            if k == last {
                let cache = ForwardCache {
                    inputs,
                    pre,
                    version: self.version,
                    shape: self.shape(),
                };
                return Ok((z, cache));
            }
            h = z.mapv(|v| v.max(0.0));
            pre.push(z);
        }
        unreachable!("loop returns at the last layer")
    }

    /// Forward pass without keeping activations, in chunks of `chunk` rows.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_input(&x)?;
        const CHUNK: usize = 4096;
        let mut out = Array2::zeros((x.nrows(), self.output_dim()));
        for (src, mut dst) in x
            .axis_chunks_iter(Axis(0), CHUNK)
            .zip(out.axis_chunks_iter_mut(Axis(0), CHUNK))
        {
            let mut h = src.to_owned();
            for (k, layer) in self.layers.iter().enumerate() {
                h = h.dot(&layer.weight) + &layer.bias;
                if k + 1 < self.layers.len() {
                    h.mapv_inplace(|v| v.max(0.0));
                }
            }
            dst.assign(&h);
        }
        Ok(out)
    }

    /// Gradients of a scalar loss given its gradient with respect to the
    /// network output. The rectifier's derivative at exactly 0 is taken as 0.
    pub fn backward(&self, cache: &ForwardCache, d_out: ArrayView2<f64>) -> Result<GradBuffer> {
        if cache.version != self.version || cache.shape != self.shape() {
            return Err(Error::Argument("forward cache does not belong to these parameters".into()));
        }
        let batch = cache.inputs[0].nrows();
        if d_out.dim() != (batch, self.output_dim()) {
            return Err(Error::Argument(format!(
                "output gradient shape {:?}, expected {:?}",
                d_out.dim(),
                (batch, self.output_dim())
            )));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = d_out.to_owned();
        for k in (0..self.layers.len()).rev() {
            let weight = cache.inputs[k].t().dot(&delta).as_standard_layout().into_owned();
            let bias = delta.sum_axis(Axis(0));
            if k > 0 {
                let mut prev = delta.dot(&self.layers[k].weight.t());
                Zip::from(&mut prev)
                    .and(&cache.pre[k - 1])
                    .for_each(|d, &z| {
                        if z <= 0.0 {
                            *d = 0.0;
                        }
                    });
                delta = prev;
            }
            grads.push(Linear { weight, bias });
        }
        grads.reverse();
        Ok(GradBuffer { layers: grads })
    }

    /// Binary checkpoint: magic, layer count, `(fan_in, fan_out)` pairs as
    /// little-endian u64, then each layer's weight (row-major) and bias as
    /// little-endian f64.
    pub fn to_checkpoint_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 16 * self.layers.len() + 8 * self.n_params());
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&(self.layers.len() as u64).to_le_bytes());
        for l in &self.layers {
            out.extend_from_slice(&(l.fan_in() as u64).to_le_bytes());
            out.extend_from_slice(&(l.fan_out() as u64).to_le_bytes());
        }
        for l in &self.layers {
            for v in l.weight.iter().chain(l.bias.iter()) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_checkpoint_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Argument(format!("checkpoint: {m}"));
        let mut words = bytes
            .get(8..)
            .filter(|_| &bytes[..8] == CHECKPOINT_MAGIC)
            .ok_or_else(|| bad("bad magic"))?
            .chunks_exact(8)
            .map(|c| <[u8; 8]>::try_from(c).expect("chunk of 8"));
        let mut next_u64 = || words.next().map(u64::from_le_bytes).ok_or_else(|| bad("truncated"));
        let n_layers = next_u64()? as usize;
        if n_layers == 0 || n_layers > 64 {
            return Err(bad("implausible layer count"));
        }
        let mut dims = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            dims.push((next_u64()? as usize, next_u64()? as usize));
        }
        let mut layers = Vec::with_capacity(n_layers);
        for (fi, fo) in dims {
            let mut take = |n: usize| -> Result<Vec<f64>> {
                (0..n).map(|_| next_u64().map(f64::from_bits)).collect()
            };
            let weight = Array2::from_shape_vec((fi, fo), take(fi * fo)?).expect("sized");
            let bias = Array1::from_vec(take(fo)?);
            layers.push(Linear { weight, bias });
        }
        if next_u64().is_ok() {
            return Err(bad("trailing bytes"));
        }
        Self::from_layers(layers)
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_checkpoint_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load_checkpoint(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_checkpoint_bytes(&bytes)
    }
}

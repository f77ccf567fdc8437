//! A small dense network with a trainable shape parameter per layer.
//!
//! The network regresses `y = sin(2x)` with full-batch gradient descent. Each
//! hidden layer owns one `alpha` shared by all of its units; its gradient is the
//! sum of `d/dalpha` over those units. After every update `alpha` is projected
//! back into `[ALPHA_MIN, ALPHA_MAX]`.
//!
//! Batches are stored row-major: a batch of `n` vectors of width `d` is a flat
//! slice of `n * d` values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::{Activation, ShapeParam};
use crate::error::{Error, Result};
use crate::gradcheck::{central_difference, relative_error, step_size};

pub const ALPHA_MIN: f64 = 1e-3;
pub const ALPHA_MAX: f64 = 1e3;

/// Hidden layer widths used by the demo: `[1, 16, 16, 1]`.
pub const DEMO_LAYER_SIZES: [usize; 4] = [1, 16, 16, 1];

/// Number of points in the toy regression task.
pub const TASK_POINTS: usize = 256;

/// Inputs of the toy task are drawn uniformly from `[-TASK_RANGE, TASK_RANGE]`.
pub const TASK_RANGE: f64 = 3.0;

/// Size of the pre-activation sample used by [`gradient_magnitude_comparison`].
pub const GAIN_SAMPLES: usize = 100_000;

// Stream ids separating the model-init and data RNG streams that share a seed.
const INIT_STREAM: u64 = 1;
const DATA_STREAM: u64 = 2;
const GAIN_STREAM: u64 = 3;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    in_dim: usize,
    out_dim: usize,
    /// Row-major `out_dim x in_dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
    pub alpha: ShapeParam,
    pub alpha_trainable: bool,
}

impl Layer {
    /// Zero-initialized layer.
    pub fn zeros(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        alpha: ShapeParam,
        alpha_trainable: bool,
    ) -> Self {
        Layer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
            activation,
            alpha,
            alpha_trainable,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn alpha_has_gradient(&self) -> bool {
        self.alpha_trainable && self.activation.uses_alpha()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<Layer>,
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases. Every layer but the last uses
    /// `activation`; the last is linear.
    pub fn init(
        layer_sizes: &[usize],
        activation: Activation,
        alpha0: ShapeParam,
        alpha_trainable: bool,
        seed: u64,
    ) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::InvalidConfig(
                "a model needs at least an input and an output size".into(),
            ));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::InvalidConfig("layer sizes must be >= 1".into()));
        }
        let mut rng = rng_for(seed, INIT_STREAM);
        let n_layers = layer_sizes.len() - 1;
        let layers = layer_sizes
            .windows(2)
            .enumerate()
            .map(|(l, dims)| {
                let (fan_in, fan_out) = (dims[0], dims[1]);
                let act = if l + 1 == n_layers {
                    Activation::Linear
                } else {
                    activation
                };
                let mut layer = Layer::zeros(fan_in, fan_out, act, alpha0, alpha_trainable);
                let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
                for w in &mut layer.weights {
                    *w = rng.gen_range(-s..=s);
                }
                layer
            })
            .collect();
        Ok(MlpModel { layers })
    }

    /// Assembles a model from explicit layers, checking adjacent dimensions.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("a model needs at least one layer".into()));
        }
        for layer in &layers {
            if layer.weights.len() != layer.in_dim * layer.out_dim {
                return Err(Error::DimensionMismatch {
                    expected: layer.in_dim * layer.out_dim,
                    got: layer.weights.len(),
                });
            }
            if layer.bias.len() != layer.out_dim {
                return Err(Error::DimensionMismatch {
                    expected: layer.out_dim,
                    got: layer.bias.len(),
                });
            }
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::DimensionMismatch {
                    expected: pair[0].out_dim,
                    got: pair[1].in_dim,
                });
            }
        }
        Ok(MlpModel { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.alpha.get()).collect()
    }

    pub fn forward(&self, inputs: &[f64]) -> Result<ForwardPass> {
        let in_dim = self.input_dim();
        if !inputs.len().is_multiple_of(in_dim) {
            return Err(Error::DimensionMismatch {
                expected: in_dim,
                got: inputs.len() % in_dim,
            });
        }
        let batch = inputs.len() / in_dim;
        let mut layer_inputs = Vec::with_capacity(self.layers.len() + 1);
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        layer_inputs.push(inputs.to_vec());

        for layer in &self.layers {
            let x = layer_inputs.last().expect("non-empty");
            let mut z = vec![0.0; batch * layer.out_dim];
            for b in 0..batch {
                let xb = &x[b * layer.in_dim..(b + 1) * layer.in_dim];
                for o in 0..layer.out_dim {
                    let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                    let dot: f64 = row.iter().zip(xb).map(|(w, v)| w * v).sum();
                    z[b * layer.out_dim + o] = dot + layer.bias[o];
                }
            }
            let y = z
                .iter()
                .map(|&v| layer.activation.apply(v, layer.alpha))
                .collect();
            pre_activations.push(z);
            layer_inputs.push(y);
        }

        Ok(ForwardPass {
            batch,
            dims: self.dims(),
            layer_inputs,
            pre_activations,
        })
    }

    pub fn predict(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let mut pass = self.forward(inputs)?;
        Ok(pass.layer_inputs.pop().expect("outputs"))
    }

    /// Reverse-mode gradients given `dL/d(output)` for every output element.
    pub fn backward(&self, cache: &ForwardPass, loss_grad: &[f64]) -> Result<Gradients> {
        if cache.dims != self.dims() {
            return Err(Error::InvalidConfig(
                "forward cache does not belong to this model".into(),
            ));
        }
        let batch = cache.batch;
        let expected = batch * self.output_dim();
        if loss_grad.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: loss_grad.len(),
            });
        }

        let n = self.layers.len();
        let mut grads = Gradients {
            weights: vec![Vec::new(); n],
            biases: vec![Vec::new(); n],
            alphas: vec![0.0; n],
        };
        let mut upstream = loss_grad.to_vec();

        for (l, layer) in self.layers.iter().enumerate().rev() {
            let z = &cache.pre_activations[l];
            let x = &cache.layer_inputs[l];
            let mut dz = vec![0.0; z.len()];
            let mut dalpha = 0.0;
            for ((d, &zi), &g) in dz.iter_mut().zip(z).zip(&upstream) {
                let ev = layer.activation.eval(zi, layer.alpha);
                *d = g * ev.dx;
                dalpha += g * ev.dalpha;
            }
            grads.alphas[l] = if layer.alpha_has_gradient() { dalpha } else { 0.0 };

            let mut dw = vec![0.0; layer.weights.len()];
            let mut db = vec![0.0; layer.out_dim];
            for b in 0..batch {
                let xb = &x[b * layer.in_dim..(b + 1) * layer.in_dim];
                for o in 0..layer.out_dim {
                    let d = dz[b * layer.out_dim + o];
                    db[o] += d;
                    for (w, &v) in dw[o * layer.in_dim..(o + 1) * layer.in_dim]
                        .iter_mut()
                        .zip(xb)
                    {
                        *w += d * v;
                    }
                }
            }

            if l > 0 {
                let mut down = vec![0.0; batch * layer.in_dim];
                for b in 0..batch {
                    for o in 0..layer.out_dim {
                        let d = dz[b * layer.out_dim + o];
                        let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                        for (g, &w) in down[b * layer.in_dim..(b + 1) * layer.in_dim]
                            .iter_mut()
                            .zip(row)
                        {
                            *g += w * d;
                        }
                    }
                }
                upstream = down;
            }
            grads.weights[l] = dw;
            grads.biases[l] = db;
        }
        Ok(grads)
    }

    /// One gradient-descent step followed by projection of every `alpha`.
    pub fn apply_gradients(&mut self, grads: &Gradients, learning_rate: f64) {
        let lo = ShapeParam::new(ALPHA_MIN).expect("valid bound");
        let hi = ShapeParam::new(ALPHA_MAX).expect("valid bound");
        for (l, layer) in self.layers.iter_mut().enumerate() {
            for (w, g) in layer.weights.iter_mut().zip(&grads.weights[l]) {
                *w -= learning_rate * g;
            }
            for (b, g) in layer.bias.iter_mut().zip(&grads.biases[l]) {
                *b -= learning_rate * g;
            }
            if layer.alpha_has_gradient() {
                let next = layer.alpha.get() - learning_rate * grads.alphas[l];
                layer.alpha = ShapeParam::clamp(next, lo, hi);
            }
        }
    }

    /// Identifiers of every trainable scalar, in a fixed order.
    pub fn parameters(&self) -> Vec<ParamId> {
        let mut ids = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            ids.extend((0..layer.weights.len()).map(|i| ParamId::Weight(l, i)));
            ids.extend((0..layer.out_dim).map(|i| ParamId::Bias(l, i)));
            if layer.alpha_has_gradient() {
                ids.push(ParamId::Alpha(l));
            }
        }
        ids
    }

    pub fn param(&self, id: ParamId) -> f64 {
        match id {
            ParamId::Weight(l, i) => self.layers[l].weights[i],
            ParamId::Bias(l, i) => self.layers[l].bias[i],
            ParamId::Alpha(l) => self.layers[l].alpha.get(),
        }
    }

    /// Fails only for an invalid `alpha`.
    pub fn set_param(&mut self, id: ParamId, value: f64) -> Result<()> {
        match id {
            ParamId::Weight(l, i) => self.layers[l].weights[i] = value,
            ParamId::Bias(l, i) => self.layers[l].bias[i] = value,
            ParamId::Alpha(l) => self.layers[l].alpha = ShapeParam::new(value)?,
        }
        Ok(())
    }

    fn dims(&self) -> Vec<(usize, usize)> {
        self.layers.iter().map(|l| (l.in_dim, l.out_dim)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamId {
    Weight(usize, usize),
    Bias(usize, usize),
    Alpha(usize),
}

/// Intermediates of a forward pass kept for [`MlpModel::backward`].
#[derive(Debug, Clone)]
pub struct ForwardPass {
    batch: usize,
    dims: Vec<(usize, usize)>,
    /// Input of every layer, followed by the network output.
    layer_inputs: Vec<Vec<f64>>,
    pre_activations: Vec<Vec<f64>>,
}

impl ForwardPass {
    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn outputs(&self) -> &[f64] {
        self.layer_inputs.last().expect("outputs")
    }

    pub fn pre_activations(&self, layer: usize) -> &[f64] {
        &self.pre_activations[layer]
    }

    /// Largest local gain `|f'(z)|` over every unit of every non-linear layer.
    pub fn max_activation_gain(&self, model: &MlpModel) -> f64 {
        let mut gain: Option<f64> = None;
        for (layer, z) in model.layers.iter().zip(&self.pre_activations) {
            if layer.activation == Activation::Linear {
                continue;
            }
            for &zi in z {
                let g = layer.activation.eval(zi, layer.alpha).dx.abs();
                gain = Some(gain.map_or(g, |m| m.max(g)));
            }
        }
        gain.unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
}

impl Gradients {
    pub fn get(&self, id: ParamId) -> f64 {
        match id {
            ParamId::Weight(l, i) => self.weights[l][i],
            ParamId::Bias(l, i) => self.biases[l][i],
            ParamId::Alpha(l) => self.alphas[l],
        }
    }
}

/// Mean squared error over every output element and its gradient.
pub fn mse(outputs: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
    if outputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: outputs.len(),
            got: targets.len(),
        });
    }
    if outputs.is_empty() {
        return Err(Error::InvalidConfig("empty batch".into()));
    }
    let n = outputs.len() as f64;
    let mut loss = 0.0;
    let grad = outputs
        .iter()
        .zip(targets)
        .map(|(y, t)| {
            let r = y - t;
            loss += r * r;
            2.0 * r / n
        })
        .collect();
    Ok((loss / n, grad))
}

pub fn loss(model: &MlpModel, inputs: &[f64], targets: &[f64]) -> Result<f64> {
    let pass = model.forward(inputs)?;
    Ok(mse(pass.outputs(), targets)?.0)
}

/// The regression data `y = sin(2x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Task {
    /// `points` inputs uniform on `[-3, 3]`.
    pub fn sin2x(points: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed, DATA_STREAM);
        let inputs: Vec<f64> = (0..points)
            .map(|_| rng.gen_range(-TASK_RANGE..=TASK_RANGE))
            .collect();
        let targets = inputs.iter().map(|x| (2.0 * x).sin()).collect();
        Task { inputs, targets }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    steps: usize,
    learning_rate: f64,
    seed: u64,
    points: usize,
}

impl TrainConfig {
    pub fn new(steps: usize, learning_rate: f64, seed: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidConfig("steps must be >= 1".into()));
        }
        if !(learning_rate.is_finite() && learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be finite and > 0, got {learning_rate}"
            )));
        }
        Ok(TrainConfig {
            steps,
            learning_rate,
            seed,
            points: TASK_POINTS,
        })
    }

    /// Overrides the number of task points (default 256).
    pub fn with_points(mut self, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidConfig("task needs at least one point".into()));
        }
        self.points = points;
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn points(&self) -> usize {
        self.points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// Loss before the update of each step.
    pub losses: Vec<f64>,
    /// Largest activation gain observed in each step's forward pass.
    pub max_gains: Vec<f64>,
    /// Every layer's `alpha` after each step's update.
    pub alphas: Vec<Vec<f64>>,
    /// Loss after the last update.
    pub final_loss: f64,
    pub final_alphas: Vec<f64>,
}

impl TrainTrace {
    pub fn initial_loss(&self) -> f64 {
        self.losses[0]
    }

    /// `final_loss / initial_loss`.
    pub fn loss_ratio(&self) -> f64 {
        self.final_loss / self.initial_loss()
    }
}

/// Full-batch gradient descent on the `sin(2x)` task.
pub fn train(model: &mut MlpModel, config: &TrainConfig) -> Result<TrainTrace> {
    if model.input_dim() != 1 || model.output_dim() != 1 {
        return Err(Error::InvalidConfig(
            "the toy task needs a model with one input and one output".into(),
        ));
    }
    let task = Task::sin2x(config.points, config.seed);
    let mut trace = TrainTrace {
        losses: Vec::with_capacity(config.steps),
        max_gains: Vec::with_capacity(config.steps),
        alphas: Vec::with_capacity(config.steps),
        final_loss: f64::NAN,
        final_alphas: Vec::new(),
    };

    for _ in 0..config.steps {
        let pass = model.forward(&task.inputs)?;
        let (loss, grad) = mse(pass.outputs(), &task.targets)?;
        trace.losses.push(loss);
        trace.max_gains.push(pass.max_activation_gain(model));
        let grads = model.backward(&pass, &grad)?;
        model.apply_gradients(&grads, config.learning_rate);
        trace.alphas.push(model.alphas());
    }
    trace.final_loss = loss(model, &task.inputs, &task.targets)?;
    trace.final_alphas = model.alphas();
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelGradCheck {
    pub params_checked: usize,
    pub max_rel_err: f64,
    pub worst_param: Option<ParamId>,
    pub tol: f64,
    pub passed: bool,
}

/// Compares [`MlpModel::backward`] against central differences of the MSE
/// loss for every trainable parameter.
pub fn check_model_gradients(
    model: &MlpModel,
    inputs: &[f64],
    targets: &[f64],
    tol: f64,
) -> Result<ModelGradCheck> {
    let pass = model.forward(inputs)?;
    let (_, grad) = mse(pass.outputs(), targets)?;
    let analytic = model.backward(&pass, &grad)?;

    let mut probe = model.clone();
    let mut max_err: f64 = 0.0;
    let mut worst = None;
    let params = model.parameters();
    for &id in &params {
        let v = model.param(id);
        let mut h = step_size(v);
        if let ParamId::Alpha(_) = id {
            h = h.min(0.5 * v);
        }
        let numeric = central_difference(
            |t| {
                probe.set_param(id, t).expect("perturbed alpha stays positive");
                loss(&probe, inputs, targets).unwrap_or(f64::NAN)
            },
            v,
            h,
        )?;
        probe.set_param(id, v)?;
        let err = relative_error(analytic.get(id), numeric);
        if err > max_err || worst.is_none() {
            max_err = max_err.max(err);
            worst = Some(id);
        }
    }

    Ok(ModelGradCheck {
        params_checked: params.len(),
        max_rel_err: max_err,
        worst_param: worst,
        tol,
        passed: max_err <= tol,
    })
}

/// Largest `elu_dx` and `celu_dx` over pseudorandom pre-activations on `[-4, 4]`.
pub fn gradient_magnitude_comparison(alpha: ShapeParam, seed: u64) -> (f64, f64) {
    let mut rng = rng_for(seed, GAIN_STREAM);
    let mut elu_max = f64::NEG_INFINITY;
    let mut celu_max = f64::NEG_INFINITY;
    for _ in 0..GAIN_SAMPLES {
        let z = rng.gen_range(-4.0..=4.0);
        elu_max = elu_max.max(crate::activation::elu_dx(z, alpha));
        celu_max = celu_max.max(crate::activation::celu_dx(z, alpha));
    }
    (elu_max, celu_max)
}

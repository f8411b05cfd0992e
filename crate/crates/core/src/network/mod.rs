//! Logistic multilayer perceptron with zero or one hidden layer, trained
//! per pattern by backpropagation with a momentum term.
//!
//! Biases are stored as the last row of each weight matrix, i.e. as weights
//! from an extra input unit whose activation is always 1.

mod io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{argument, Error, Result};

pub use io::{read_model, write_model, ModelFile};

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
pub const DEFAULT_MOMENTUM: f64 = 0.9;
pub const DEFAULT_ERROR_THRESHOLD: f64 = 0.1;
pub const DEFAULT_INIT_RANGE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkShape {
    pub input: usize,
    /// 0 means no hidden layer.
    pub hidden: usize,
    pub output: usize,
}

impl NetworkShape {
    pub fn new(input: usize, hidden: usize, output: usize) -> Result<Self> {
        if input == 0 || output == 0 {
            return Err(argument(format!(
                "network needs at least one input and one output unit, got {input}x{hidden}x{output}"
            )));
        }
        Ok(NetworkShape {
            input,
            hidden,
            output,
        })
    }

    /// `(inputs, outputs)` of each weight matrix, bottom to top.
    fn layer_dims(&self) -> Vec<(usize, usize)> {
        if self.hidden == 0 {
            vec![(self.input, self.output)]
        } else {
            vec![(self.input, self.hidden), (self.hidden, self.output)]
        }
    }
}

/// Weight matrix of `(inputs + 1) x outputs`, row-major; the last row holds
/// the biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            inputs,
            outputs,
            weights: vec![0.0; (inputs + 1) * outputs],
        }
    }

    pub fn rows(&self) -> usize {
        self.inputs + 1
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.outputs..(i + 1) * self.outputs]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.outputs + j]
    }

    pub fn bias(&self, j: usize) -> f64 {
        self.weight(self.inputs, j)
    }

    /// Logistic activations of this layer for `input`.
    pub fn activate(&self, input: &[f64]) -> Vec<f64> {
        let mut net = self.row(self.inputs).to_vec();
        for (i, &a) in input.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (n, &w) in net.iter_mut().zip(self.row(i)) {
                *n += a * w;
            }
        }
        net.into_iter().map(logistic).collect()
    }
}

/// `1 / (1 + e^-x)`, kept strictly inside (0, 1) even where f64 would
/// round to an endpoint.
pub fn logistic(x: f64) -> f64 {
    let a = 1.0 / (1.0 + (-x).exp());
    a.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingHyperparams {
    pub learning_rate: f64,
    pub momentum: f64,
    pub error_threshold: f64,
    pub seed: u64,
}

impl Default for TrainingHyperparams {
    fn default() -> Self {
        TrainingHyperparams {
            learning_rate: DEFAULT_LEARNING_RATE,
            momentum: DEFAULT_MOMENTUM,
            error_threshold: DEFAULT_ERROR_THRESHOLD,
            seed: 0,
        }
    }
}

impl TrainingHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if !(self.error_threshold >= 0.0 && self.error_threshold.is_finite()) {
            return Err(Error::Config(format!(
                "error_threshold must be >= 0, got {}",
                self.error_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    /// Hidden activations, when the network has a hidden layer.
    pub hidden: Option<Vec<f64>>,
    pub output: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub shape: NetworkShape,
    pub layers: Vec<Layer>,
    /// Previous weight change per layer, same layout as the weights.
    pub momentum_state: Vec<Vec<f64>>,
}

impl Network {
    /// Network with every weight (biases included) drawn uniformly from
    /// `[-init_range, init_range]`, reproducibly from `seed`.
    pub fn init(shape: NetworkShape, seed: u64, init_range: f64) -> Result<Self> {
        if !(init_range >= 0.0 && init_range.is_finite()) {
            return Err(argument(format!(
                "init_range must be >= 0, got {init_range}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers: Vec<Layer> = shape
            .layer_dims()
            .into_iter()
            .map(|(i, o)| {
                let mut layer = Layer::zeros(i, o);
                for w in layer.weights.iter_mut() {
                    *w = rng.gen_range(-init_range..=init_range);
                }
                layer
            })
            .collect();
        Ok(Self::from_layers(shape, layers))
    }

    pub(crate) fn from_layers(shape: NetworkShape, layers: Vec<Layer>) -> Self {
        let momentum_state = layers.iter().map(|l| vec![0.0; l.weights.len()]).collect();
        Network {
            shape,
            layers,
            momentum_state,
        }
    }

    pub fn output_layer(&self) -> &Layer {
        self.layers.last().expect("at least one layer")
    }

    pub fn forward(&self, input: &[f64]) -> Result<ForwardPass> {
        if input.len() != self.shape.input {
            return Err(argument(format!(
                "input has {} values, network expects {}",
                input.len(),
                self.shape.input
            )));
        }
        if let Some(x) = input.iter().find(|x| !x.is_finite()) {
            return Err(argument(format!("non-finite input {x}")));
        }
        Ok(match self.layers.as_slice() {
            [out] => ForwardPass {
                hidden: None,
                output: out.activate(input),
            },
            [hid, out] => {
                let hidden = hid.activate(input);
                let output = out.activate(&hidden);
                ForwardPass {
                    hidden: Some(hidden),
                    output,
                }
            }
            _ => unreachable!("networks have one or two layers"),
        })
    }

    /// Applies one momentum step to every weight. `layer_inputs[l]` is the
    /// activation vector feeding layer `l` and `deltas[l]` the error signals
    /// of its units, both from the same forward pass. Nothing is modified if
    /// any value is non-finite; a weight that overflows is reported as a
    /// numeric error after the step.
    pub fn update_weights(
        &mut self,
        layer_inputs: &[&[f64]],
        deltas: &[&[f64]],
        hp: &TrainingHyperparams,
    ) -> Result<()> {
        if layer_inputs.len() != self.layers.len() || deltas.len() != self.layers.len() {
            return Err(argument(
                "one input and one delta vector per layer expected",
            ));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if layer_inputs[l].len() != layer.inputs || deltas[l].len() != layer.outputs {
                return Err(argument(format!("dimension mismatch at layer {l}")));
            }
            let bad = layer_inputs[l]
                .iter()
                .chain(deltas[l])
                .find(|x| !x.is_finite());
            if let Some(x) = bad {
                return Err(Error::Numeric(format!(
                    "non-finite activation or delta {x} at layer {l}"
                )));
            }
        }

        let eta = hp.learning_rate;
        let alpha = hp.momentum;
        let mut overflow = None;
        for (l, layer) in self.layers.iter_mut().enumerate() {
            let prev = &mut self.momentum_state[l];
            let outputs = layer.outputs;
            let inputs = layer_inputs[l];
            let delta = deltas[l];
            // the bias row sees a constant input of 1
            for (i, &a) in inputs.iter().chain(std::iter::once(&1.0)).enumerate() {
                let base = i * outputs;
                for (j, &d) in delta.iter().enumerate() {
                    let k = base + j;
                    let change = eta * a * d + alpha * prev[k];
                    layer.weights[k] += change;
                    prev[k] = change;
                    if overflow.is_none() && !layer.weights[k].is_finite() {
                        overflow = Some(l);
                    }
                }
            }
        }
        match overflow {
            None => Ok(()),
            Some(l) => Err(Error::Numeric(format!("weight overflow in layer {l}"))),
        }
    }

    /// Forward pass, deltas and update for one training pattern. Returns the
    /// pre-update output activations.
    pub fn train_pattern(
        &mut self,
        input: &[f64],
        target: &[f64],
        hp: &TrainingHyperparams,
    ) -> Result<Vec<f64>> {
        let pass = self.forward(input)?;
        let out_deltas = output_deltas(target, &pass.output, hp.error_threshold)?;
        match &pass.hidden {
            None => self.update_weights(&[input], &[&out_deltas], hp)?,
            Some(hidden) => {
                let hid_deltas = hidden_deltas(hidden, &out_deltas, self.output_layer())?;
                self.update_weights(&[input, hidden], &[&hid_deltas, &out_deltas], hp)?;
            }
        }
        Ok(pass.output)
    }
}

/// Output error signals `a(1-a)(t-a)`, zeroed wherever `|t - a|` is below
/// `error_threshold`.
pub fn output_deltas(target: &[f64], output: &[f64], error_threshold: f64) -> Result<Vec<f64>> {
    if target.len() != output.len() {
        return Err(argument(format!(
            "target has {} values, output has {}",
            target.len(),
            output.len()
        )));
    }
    Ok(target
        .iter()
        .zip(output)
        .map(|(&t, &a)| {
            let err = t - a;
            if err.abs() < error_threshold {
                0.0
            } else {
                a * (1.0 - a) * err
            }
        })
        .collect())
}

/// Hidden error signals `a_j(1-a_j) * sum_k delta_k w_jk`. The bias row of
/// `output_layer` takes no part.
pub fn hidden_deltas(hidden: &[f64], out_deltas: &[f64], output_layer: &Layer) -> Result<Vec<f64>> {
    if hidden.len() != output_layer.inputs || out_deltas.len() != output_layer.outputs {
        return Err(argument(format!(
            "hidden deltas: {} hidden / {} output values for a {}x{} layer",
            hidden.len(),
            out_deltas.len(),
            output_layer.inputs,
            output_layer.outputs
        )));
    }
    Ok(hidden
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let back: f64 = output_layer
                .row(j)
                .iter()
                .zip(out_deltas)
                .map(|(w, d)| w * d)
                .sum();
            a * (1.0 - a) * back
        })
        .collect())
}

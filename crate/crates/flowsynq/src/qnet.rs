//! Action-value approximators behind one training interface.
//!
//! Two families implement the same contract (binary state vector in, one
//! value per action out): a small dense network with one ReLU hidden layer,
//! and the parameterized circuits of [`crate::circuits`] with their linear
//! read-out. Training minimizes squared error against externally supplied
//! targets; gradients come from plain backpropagation for the dense net and
//! from the reverse-sweep differentiation of the simulator for the circuits,
//! restricted to the one output each sample actually took.
//!
//! Models serialize to a small text checkpoint that stores every parameter
//! as the hex encoding of its bit pattern, so a save/load round trip is
//! bitwise exact.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;

use crate::circuits::{self, CircuitSpec, EncodingKind, ParamVector};
use crate::error::{Error, Result};
use crate::statevec;

/// Hidden width of the dense baseline.
pub const DEFAULT_HIDDEN: usize = 128;

/// Which approximator family a model belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Dense,
    BasisReupload,
    AngleX,
    AngleXyz,
}

impl ModelKind {
    fn token(self) -> &'static str {
        match self {
            ModelKind::Dense => "dense",
            ModelKind::BasisReupload => "basis_reupload",
            ModelKind::AngleX => "angle_x",
            ModelKind::AngleXyz => "angle_xyz",
        }
    }

    fn from_token(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(ModelKind::Dense),
            "basis_reupload" => Ok(ModelKind::BasisReupload),
            "angle_x" => Ok(ModelKind::AngleX),
            "angle_xyz" => Ok(ModelKind::AngleXyz),
            other => Err(Error::Checkpoint(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Dense network `input -> hidden ReLU -> affine output`, parameters flat in
/// the order `[W1 | b1 | W2 | b2]` with both weight blocks row-major
/// (`W1[j * input + i]`, `W2[a * hidden + j]`).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseNet {
    input_dim: usize,
    hidden: usize,
    action_count: usize,
    params: Vec<f64>,
}

impl DenseNet {
    pub fn param_count_for(input_dim: usize, hidden: usize, action_count: usize) -> usize {
        input_dim * hidden + hidden + hidden * action_count + action_count
    }

    /// Fresh net: weights uniform in `(-1/sqrt(fan_in), 1/sqrt(fan_in))`
    /// drawn first for the hidden block then the output block, biases zero.
    pub fn new<R: Rng>(
        input_dim: usize,
        hidden: usize,
        action_count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if input_dim == 0 || hidden == 0 || action_count == 0 {
            return Err(Error::Domain(
                "dense net dimensions must be positive".into(),
            ));
        }
        let mut params = vec![0.0; Self::param_count_for(input_dim, hidden, action_count)];
        let bound1 = 1.0 / (input_dim as f64).sqrt();
        for p in params.iter_mut().take(input_dim * hidden) {
            *p = rng.gen_range(-bound1..bound1);
        }
        let w2_start = input_dim * hidden + hidden;
        let bound2 = 1.0 / (hidden as f64).sqrt();
        for p in params
            .iter_mut()
            .skip(w2_start)
            .take(hidden * action_count)
        {
            *p = rng.gen_range(-bound2..bound2);
        }
        Ok(DenseNet {
            input_dim,
            hidden,
            action_count,
            params,
        })
    }

    fn segments(&self) -> (usize, usize, usize) {
        let b1 = self.input_dim * self.hidden;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.hidden * self.action_count;
        (b1, w2, b2)
    }

    /// Forward pass returning the pre-activations as well, for backprop.
    fn forward_full(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (b1_off, w2_off, b2_off) = self.segments();
        let mut z1 = vec![0.0; self.hidden];
        for j in 0..self.hidden {
            let mut acc = self.params[b1_off + j];
            let row = &self.params[j * self.input_dim..(j + 1) * self.input_dim];
            for (wi, xi) in row.iter().zip(x) {
                acc += wi * xi;
            }
            z1[j] = acc;
        }
        let mut q = vec![0.0; self.action_count];
        for a in 0..self.action_count {
            let mut acc = self.params[b2_off + a];
            let row = &self.params[w2_off + a * self.hidden..w2_off + (a + 1) * self.hidden];
            for (wj, zj) in row.iter().zip(&z1) {
                acc += wj * zj.max(0.0);
            }
            q[a] = acc;
        }
        (z1, q)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "dense net expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        Ok(self.forward_full(x).1)
    }

    /// Accumulate `residual * dQ[action]/dparams` into `grad`.
    fn accumulate_grad(&self, x: &[f64], action: usize, residual: f64, grad: &mut [f64]) {
        let (b1_off, w2_off, b2_off) = self.segments();
        let (z1, _) = self.forward_full(x);
        grad[b2_off + action] += residual;
        for j in 0..self.hidden {
            let h = z1[j].max(0.0);
            grad[w2_off + action * self.hidden + j] += residual * h;
            if z1[j] > 0.0 {
                let dz = residual * self.params[w2_off + action * self.hidden + j];
                grad[b1_off + j] += dz;
                let row = &mut grad[j * self.input_dim..(j + 1) * self.input_dim];
                for (g, xi) in row.iter_mut().zip(x) {
                    *g += dz * xi;
                }
            }
        }
    }
}

/// A circuit together with its trainable parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PqcModel {
    spec: CircuitSpec,
    params: ParamVector,
}

/// One trainable action-value model of either family.
#[derive(Clone, Debug, PartialEq)]
pub enum QModel {
    Classical(DenseNet),
    Quantum(PqcModel),
}

impl QModel {
    /// Dense baseline at the default hidden width.
    pub fn classical<R: Rng>(input_dim: usize, action_count: usize, rng: &mut R) -> Result<Self> {
        Self::classical_with_hidden(input_dim, DEFAULT_HIDDEN, action_count, rng)
    }

    pub fn classical_with_hidden<R: Rng>(
        input_dim: usize,
        hidden: usize,
        action_count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        Ok(QModel::Classical(DenseNet::new(
            input_dim,
            hidden,
            action_count,
            rng,
        )?))
    }

    /// Circuit model with freshly initialized parameters.
    pub fn quantum<R: Rng>(spec: CircuitSpec, rng: &mut R) -> Self {
        let params = ParamVector::init(&spec, rng);
        QModel::Quantum(PqcModel { spec, params })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            QModel::Classical(_) => ModelKind::Dense,
            QModel::Quantum(m) => match m.spec.encoding() {
                EncodingKind::BasisReupload => ModelKind::BasisReupload,
                EncodingKind::AngleX => ModelKind::AngleX,
                EncodingKind::AngleXyz => ModelKind::AngleXyz,
            },
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            QModel::Classical(n) => n.input_dim,
            QModel::Quantum(m) => m.spec.feature_count(),
        }
    }

    pub fn action_count(&self) -> usize {
        match self {
            QModel::Classical(n) => n.action_count,
            QModel::Quantum(m) => m.spec.action_count(),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            QModel::Classical(n) => n.params.len(),
            QModel::Quantum(m) => m.spec.param_count(),
        }
    }

    /// The circuit behind a quantum model, if any.
    pub fn circuit(&self) -> Option<&CircuitSpec> {
        match self {
            QModel::Classical(_) => None,
            QModel::Quantum(m) => Some(&m.spec),
        }
    }

    fn check_state(&self, state: &[u8]) -> Result<Vec<f64>> {
        if state.len() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "model expects {} state bits, got {}",
                self.input_dim(),
                state.len()
            )));
        }
        state
            .iter()
            .enumerate()
            .map(|(i, &b)| match b {
                0 => Ok(0.0),
                1 => Ok(1.0),
                other => Err(Error::Domain(format!(
                    "state bit {i} must be 0 or 1, got {other}"
                ))),
            })
            .collect()
    }

    /// Action values for one binary state vector.
    pub fn predict(&self, state: &[u8]) -> Result<Vec<f64>> {
        let x = self.check_state(state)?;
        match self {
            QModel::Classical(n) => n.forward(&x),
            QModel::Quantum(m) => circuits::q_values(&m.spec, &m.params, &x),
        }
    }

    /// Copy of the flat parameter vector (dense: `[W1|b1|W2|b2]`, circuit:
    /// `[angles|scales|weights]`).
    pub fn params_flat(&self) -> Vec<f64> {
        match self {
            QModel::Classical(n) => n.params.clone(),
            QModel::Quantum(m) => m.params.to_flat(),
        }
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        match self {
            QModel::Classical(n) => {
                if flat.len() != n.params.len() {
                    return Err(Error::ParamShape(format!(
                        "dense net has {} parameters, got {}",
                        n.params.len(),
                        flat.len()
                    )));
                }
                n.params.copy_from_slice(flat);
                Ok(())
            }
            QModel::Quantum(m) => m.params.assign_flat(flat),
        }
    }

    /// True when two models share an architecture (parameters aside).
    pub fn arch_matches(&self, other: &QModel) -> bool {
        match (self, other) {
            (QModel::Classical(a), QModel::Classical(b)) => {
                a.input_dim == b.input_dim
                    && a.hidden == b.hidden
                    && a.action_count == b.action_count
            }
            (QModel::Quantum(a), QModel::Quantum(b)) => a.spec == b.spec,
            _ => false,
        }
    }

    /// Write a checkpoint that reads back bitwise identical.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "flowsynq-model v1")?;
        writeln!(out, "kind {}", self.kind().token())?;
        writeln!(out, "inputs {}", self.input_dim())?;
        match self {
            QModel::Classical(n) => writeln!(out, "hidden {}", n.hidden)?,
            QModel::Quantum(m) => {
                writeln!(out, "qubits {}", m.spec.num_qubits())?;
                writeln!(out, "layers {}", m.spec.num_layers())?;
            }
        }
        writeln!(out, "actions {}", self.action_count())?;
        let flat = self.params_flat();
        writeln!(out, "params {}", flat.len())?;
        for v in &flat {
            writeln!(out, "{:016x}", v.to_bits())?;
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Read a checkpoint written by [`QModel::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::Checkpoint("file truncated".into()))
        };
        if next()? != "flowsynq-model v1" {
            return Err(Error::Checkpoint("unrecognized header".into()));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = next()?;
            line.strip_prefix(&format!("{name} "))
                .map(str::to_string)
                .ok_or_else(|| Error::Checkpoint(format!("expected {name} line, got {line:?}")))
        };
        let parse = |s: String| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Checkpoint(format!("bad integer {s:?}")))
        };
        let kind = ModelKind::from_token(&field("kind")?)?;
        let inputs = parse(field("inputs")?)?;
        let mut model = match kind {
            ModelKind::Dense => {
                let hidden = parse(field("hidden")?)?;
                let actions = parse(field("actions")?)?;
                QModel::Classical(DenseNet {
                    input_dim: inputs,
                    hidden,
                    action_count: actions,
                    params: vec![0.0; DenseNet::param_count_for(inputs, hidden, actions)],
                })
            }
            quantum => {
                let qubits = parse(field("qubits")?)?;
                let layers = parse(field("layers")?)?;
                let actions = parse(field("actions")?)?;
                let spec = match quantum {
                    ModelKind::BasisReupload => {
                        if qubits != inputs {
                            return Err(Error::Checkpoint(format!(
                                "basis_reupload register must match inputs, \
                                 got {qubits} qubits for {inputs} inputs"
                            )));
                        }
                        circuits::build_basis_reupload(inputs, actions, layers)?
                    }
                    ModelKind::AngleX => circuits::build_angle_x(inputs, actions, qubits, layers)?,
                    ModelKind::AngleXyz => {
                        circuits::build_angle_xyz(inputs, actions, qubits, layers)?
                    }
                    ModelKind::Dense => unreachable!(),
                };
                QModel::Quantum(PqcModel {
                    params: ParamVector::zeros(&spec),
                    spec,
                })
            }
        };
        let count = parse(field("params")?)?;
        if count != model.param_count() {
            return Err(Error::Checkpoint(format!(
                "architecture has {} parameters, file declares {count}",
                model.param_count()
            )));
        }
        let mut flat = Vec::with_capacity(count);
        for _ in 0..count {
            let line = next()?;
            let bits = u64::from_str_radix(line.trim(), 16)
                .map_err(|_| Error::Checkpoint(format!("bad parameter line {line:?}")))?;
            flat.push(f64::from_bits(bits));
        }
        model.set_params_flat(&flat)?;
        Ok(model)
    }
}

/// Dense-baseline size at the default hidden width.
pub fn classical_param_count(input_dim: usize, action_count: usize) -> usize {
    DenseNet::param_count_for(input_dim, DEFAULT_HIDDEN, action_count)
}

/// Copy the source's parameters into the frozen copy used for bootstrap
/// targets. The two models must share an architecture.
pub fn sync_target(source: &QModel, target: &mut QModel) -> Result<()> {
    if !source.arch_matches(target) {
        return Err(Error::ParamShape(
            "cannot sync models with different architectures".into(),
        ));
    }
    target.set_params_flat(&source.params_flat())
}

/// Gradient step rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

/// Optimizer state sized for one model's flat parameter vector.
#[derive(Clone, Debug)]
pub struct OptimizerState {
    kind: OptimizerKind,
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl OptimizerState {
    /// Adam with the usual moment constants (0.9, 0.999, 1e-8).
    pub fn adam(learning_rate: f64, param_count: usize) -> Self {
        OptimizerState {
            kind: OptimizerKind::Adam,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    /// Plain gradient descent.
    pub fn sgd(learning_rate: f64, _param_count: usize) -> Self {
        OptimizerState {
            kind: OptimizerKind::Sgd,
            learning_rate,
            beta1: 0.0,
            beta2: 0.0,
            epsilon: 0.0,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn new(kind: OptimizerKind, learning_rate: f64, param_count: usize) -> Self {
        match kind {
            OptimizerKind::Adam => Self::adam(learning_rate, param_count),
            OptimizerKind::Sgd => Self::sgd(learning_rate, param_count),
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    /// One in-place update of `params` from `grads`.
    pub fn apply(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::Dimension(format!(
                "{} parameters but {} gradient entries",
                params.len(),
                grads.len()
            )));
        }
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grads) {
                    *p -= self.learning_rate * g;
                }
            }
            OptimizerKind::Adam => {
                if params.len() != self.m.len() {
                    return Err(Error::Dimension(format!(
                        "optimizer sized for {} parameters, got {}",
                        self.m.len(),
                        params.len()
                    )));
                }
                self.step += 1;
                let bc1 = 1.0 - self.beta1.powi(self.step as i32);
                let bc2 = 1.0 - self.beta2.powi(self.step as i32);
                for i in 0..params.len() {
                    self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
                    self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
                    let m_hat = self.m[i] / bc1;
                    let v_hat = self.v[i] / bc2;
                    params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
                }
            }
        }
        Ok(())
    }
}

/// One supervised sample: the value of `action` in `state` should move
/// toward `target`.
#[derive(Clone, Debug)]
pub struct TrainSample {
    pub state: Vec<u8>,
    pub action: usize,
    pub target: f64,
}

/// Mean squared error over the batch and its gradient with respect to the
/// flat parameters. Each sample touches only the output it took, so the
/// circuit gradient uses the row-restricted reverse sweep.
pub fn loss_and_gradient(model: &QModel, batch: &[TrainSample]) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::Dimension("empty training batch".into()));
    }
    let mut loss = 0.0;
    let mut grad = vec![0.0; model.param_count()];
    let scale = 1.0 / batch.len() as f64;
    for sample in batch {
        if sample.action >= model.action_count() {
            return Err(Error::Dimension(format!(
                "action {} out of range, model has {}",
                sample.action,
                model.action_count()
            )));
        }
        match model {
            QModel::Classical(net) => {
                let x = model.check_state(&sample.state)?;
                let q = net.forward(&x)?[sample.action];
                let residual = q - sample.target;
                loss += scale * residual * residual;
                net.accumulate_grad(&x, sample.action, scale * 2.0 * residual, &mut grad);
            }
            QModel::Quantum(m) => {
                let x = model.check_state(&sample.state)?;
                let (q, row) =
                    statevec::value_and_grad_row(&m.spec, &m.params, &x, sample.action)?;
                let residual = q - sample.target;
                loss += scale * residual * residual;
                for (g, r) in grad.iter_mut().zip(&row) {
                    *g += scale * 2.0 * residual * r;
                }
            }
        }
    }
    Ok((loss, grad))
}

/// One optimizer step against the batch. Returns the loss measured before
/// the update. Fails without touching the model if the loss or any gradient
/// entry is non-finite.
pub fn train_step(
    model: &mut QModel,
    opt: &mut OptimizerState,
    batch: &[TrainSample],
) -> Result<f64> {
    let (loss, grad) = loss_and_gradient(model, batch)?;
    if !loss.is_finite() {
        return Err(Error::Training(format!("non-finite loss {loss}")));
    }
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::Training(format!(
            "non-finite gradient entry at index {i}"
        )));
    }
    let mut params = model.params_flat();
    opt.apply(&mut params, &grad)?;
    model.set_params_flat(&params)?;
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_angle_x, build_angle_xyz};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_sizes_for_the_three_scenarios() {
        assert_eq!(classical_param_count(12, 4), 2180);
        assert_eq!(classical_param_count(20, 5), 3333);
        assert_eq!(classical_param_count(30, 6), 4742);
    }

    #[test]
    fn dense_forward_matches_an_explicit_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (input, hidden, actions) = (5, 7, 3);
        let model = QModel::classical_with_hidden(input, hidden, actions, &mut rng).unwrap();
        let p = model.params_flat();
        let state: Vec<u8> = vec![1, 0, 1, 1, 0];
        let x: Vec<f64> = state.iter().map(|&b| f64::from(b)).collect();

        // Independent triple-loop over the documented layout.
        let b1_off = input * hidden;
        let w2_off = b1_off + hidden;
        let b2_off = w2_off + hidden * actions;
        let mut want = vec![0.0; actions];
        for (a, w) in want.iter_mut().enumerate() {
            let mut acc = p[b2_off + a];
            for j in 0..hidden {
                let mut z = p[b1_off + j];
                for i in 0..input {
                    z += p[j * input + i] * x[i];
                }
                acc += p[w2_off + a * hidden + j] * z.max(0.0);
            }
            *w = acc;
        }
        let got = model.predict(&state).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_input_reads_the_output_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut model = QModel::classical_with_hidden(4, 8, 2, &mut rng).unwrap();
        let mut p = vec![0.0; model.param_count()];
        // Hidden biases zero, output biases set: ReLU of zero contributes
        // nothing and the prediction is exactly the output bias.
        let b2_off = 4 * 8 + 8 + 8 * 2;
        p[b2_off] = 2.5;
        p[b2_off + 1] = -1.25;
        model.set_params_flat(&p).unwrap();
        assert_eq!(model.predict(&[0, 0, 0, 0]).unwrap(), vec![2.5, -1.25]);
    }

    #[test]
    fn quantum_predict_delegates_to_the_circuit_read_out() {
        let spec = build_angle_xyz(6, 3, 3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = QModel::quantum(spec.clone(), &mut rng);
        let state = [1u8, 0, 0, 1, 1, 0];
        let x: Vec<f64> = state.iter().map(|&b| f64::from(b)).collect();
        let direct = match &model {
            QModel::Quantum(m) => circuits::q_values(&spec, &m.params, &x).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(model.predict(&state).unwrap(), direct);
    }

    #[test]
    fn predict_validates_the_state_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = QModel::classical_with_hidden(3, 4, 2, &mut rng).unwrap();
        assert!(matches!(
            model.predict(&[1, 0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            model.predict(&[1, 0, 2]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn one_sgd_step_on_a_tiny_net_matches_hand_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut model = QModel::classical_with_hidden(1, 1, 1, &mut rng).unwrap();
        model.set_params_flat(&[1.0, 0.5, 2.0, 0.25]).unwrap();
        let mut opt = OptimizerState::sgd(0.1, model.param_count());
        let batch = [TrainSample {
            state: vec![1],
            action: 0,
            target: 3.0,
        }];
        // z1 = 1.5, q = 3.25, residual 0.25: loss 0.0625 and gradients
        // (1.0, 1.0, 0.75, 0.5) on (w1, b1, w2, b2).
        let loss = train_step(&mut model, &mut opt, &batch).unwrap();
        assert!((loss - 0.0625).abs() < 1e-12);
        let p = model.params_flat();
        for (got, want) in p.iter().zip([0.9, 0.4, 1.925, 0.2]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn a_perfectly_fit_batch_leaves_the_model_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut model = QModel::classical_with_hidden(3, 5, 2, &mut rng).unwrap();
        let before = model.params_flat();
        let state = vec![1u8, 1, 0];
        let targets = model.predict(&state).unwrap();
        let batch: Vec<TrainSample> = (0..2)
            .map(|a| TrainSample {
                state: state.clone(),
                action: a,
                target: targets[a],
            })
            .collect();
        let mut opt = OptimizerState::sgd(0.5, model.param_count());
        let loss = train_step(&mut model, &mut opt, &batch).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(model.params_flat(), before);
    }

    #[test]
    fn circuit_loss_gradient_matches_finite_differences() {
        let spec = build_angle_x(4, 2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut model = QModel::quantum(spec, &mut rng);
        let batch = vec![
            TrainSample {
                state: vec![1, 0, 1, 1],
                action: 0,
                target: 0.4,
            },
            TrainSample {
                state: vec![0, 1, 0, 0],
                action: 1,
                target: -0.2,
            },
            TrainSample {
                state: vec![1, 1, 0, 1],
                action: 0,
                target: 0.9,
            },
        ];
        let (_, grad) = loss_and_gradient(&model, &batch).unwrap();

        let base = model.params_flat();
        let h = 1e-5;
        for i in 0..base.len() {
            let mut loss_at = |v: f64| {
                let mut p = base.clone();
                p[i] = v;
                model.set_params_flat(&p).unwrap();
                let (l, _) = loss_and_gradient(&model, &batch).unwrap();
                l
            };
            let fd = (loss_at(base[i] + h) - loss_at(base[i] - h)) / (2.0 * h);
            let tol = 1e-5 * fd.abs().max(1.0);
            assert!((fd - grad[i]).abs() < tol, "param {i}: {fd} vs {}", grad[i]);
        }
        model.set_params_flat(&base).unwrap();
    }

    #[test]
    fn adam_with_zero_rate_changes_nothing_bitwise() {
        let spec = build_angle_xyz(4, 2, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut model = QModel::quantum(spec, &mut rng);
        let before = model.params_flat();
        let mut opt = OptimizerState::adam(0.0, model.param_count());
        let batch = [TrainSample {
            state: vec![1, 0, 0, 1],
            action: 1,
            target: 5.0,
        }];
        train_step(&mut model, &mut opt, &batch).unwrap();
        assert_eq!(model.params_flat(), before);
    }

    #[test]
    fn the_first_adam_step_is_a_signed_unit_step() {
        // With fresh moments, m_hat/sqrt(v_hat) is the gradient sign, so
        // every touched parameter moves by about the learning rate.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut model = QModel::classical_with_hidden(2, 3, 2, &mut rng).unwrap();
        let before = model.params_flat();
        let (_, grad) = loss_and_gradient(
            &model,
            &[TrainSample {
                state: vec![1, 1],
                action: 0,
                target: 4.0,
            }],
        )
        .unwrap();
        let mut opt = OptimizerState::adam(0.01, model.param_count());
        train_step(
            &mut model,
            &mut opt,
            &[TrainSample {
                state: vec![1, 1],
                action: 0,
                target: 4.0,
            }],
        )
        .unwrap();
        let after = model.params_flat();
        for i in 0..before.len() {
            if grad[i].abs() > 1e-9 {
                let step = before[i] - after[i];
                assert!((step - 0.01 * grad[i].signum()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn non_finite_targets_are_rejected_before_any_update() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut model = QModel::classical_with_hidden(2, 3, 1, &mut rng).unwrap();
        let before = model.params_flat();
        let mut opt = OptimizerState::sgd(0.1, model.param_count());
        let batch = [TrainSample {
            state: vec![1, 0],
            action: 0,
            target: f64::INFINITY,
        }];
        assert!(matches!(
            train_step(&mut model, &mut opt, &batch),
            Err(Error::Training(_))
        ));
        assert_eq!(model.params_flat(), before);
    }

    #[test]
    fn empty_batches_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let model = QModel::classical_with_hidden(2, 3, 1, &mut rng).unwrap();
        assert!(loss_and_gradient(&model, &[]).is_err());
    }

    #[test]
    fn target_sync_copies_parameters_deeply() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let spec = build_angle_x(4, 2, 2, 2).unwrap();
        let mut source = QModel::quantum(spec.clone(), &mut rng);
        let mut target = QModel::quantum(spec, &mut rng);
        assert_ne!(source.params_flat(), target.params_flat());

        sync_target(&source, &mut target).unwrap();
        assert_eq!(source.params_flat(), target.params_flat());

        // Later source updates must not leak into the frozen copy.
        let snapshot = target.params_flat();
        let mut p = source.params_flat();
        p[0] += 1.0;
        source.set_params_flat(&p).unwrap();
        assert_eq!(target.params_flat(), snapshot);
    }

    #[test]
    fn target_sync_requires_matching_architectures() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let dense = QModel::classical_with_hidden(4, 4, 2, &mut rng).unwrap();
        let mut quantum = QModel::quantum(build_angle_x(4, 2, 2, 2).unwrap(), &mut rng);
        assert!(sync_target(&dense, &mut quantum).is_err());

        let mut narrow = QModel::classical_with_hidden(4, 3, 2, &mut rng).unwrap();
        assert!(sync_target(&dense, &mut narrow).is_err());
    }

    #[test]
    fn checkpoints_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);

        let dense = QModel::classical(12, 4, &mut rng).unwrap();
        let path = dir.path().join("dense.ckpt");
        dense.save(&path).unwrap();
        let back = QModel::load(&path).unwrap();
        assert_eq!(back, dense);

        for model in [
            QModel::quantum(crate::circuits::build_basis_reupload(12, 4, 1).unwrap(), &mut rng),
            QModel::quantum(build_angle_x(12, 4, 4, 3).unwrap(), &mut rng),
            QModel::quantum(build_angle_xyz(12, 4, 4, 1).unwrap(), &mut rng),
        ] {
            let path = dir.path().join(format!("{:?}.ckpt", model.kind()));
            model.save(&path).unwrap();
            let back = QModel::load(&path).unwrap();
            assert_eq!(back, model);
            let state = vec![0u8; 12];
            assert_eq!(
                back.predict(&state).unwrap(),
                model.predict(&state).unwrap()
            );
        }
    }

    #[test]
    fn corrupted_checkpoints_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        std::fs::write(&path, "flowsynq-model v1\nkind dense\ninputs 2\nhidden 2\n").unwrap();
        assert!(matches!(QModel::load(&path), Err(Error::Checkpoint(_))));

        std::fs::write(&path, "not a checkpoint\n").unwrap();
        assert!(matches!(QModel::load(&path), Err(Error::Checkpoint(_))));
    }
}

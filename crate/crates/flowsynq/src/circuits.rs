//! Parameterized circuit families for state-value read-out.
//!
//! All three families share one trainable layout. A circuit over `n_q` qubits
//! with `L` layers carries:
//!
//! * `angles`: one rotation triplet `RX, RY, RZ` per qubit per layer plus a
//!   closing triplet layer, `3 * n_q * (L + 1)` entries total;
//! * `scales`: one multiplier per encoded rotation slot (the slot's angle is
//!   `scale * feature`);
//! * `weights`: one read-out weight per output, `Q_a = weights[a] * <Z_a>`
//!   measured on qubit `a`.
//!
//! The families differ in how the `n_x` input features enter the register:
//!
//! * [`build_basis_reupload`]: the binary feature vector selects the initial
//!   basis state of an `n_x`-qubit register and is re-uploaded in full as
//!   `RX` rotations after every entangling block (`n_x` scale slots per
//!   layer);
//! * [`build_angle_x`]: features enter only as `RX` angles, one slot per
//!   qubit per layer, consumed in feature order and cycling back to feature 0
//!   when exhausted (`n_q` slots per layer);
//! * [`build_angle_xyz`]: as above but each qubit contributes an `RX`, `RY`,
//!   and `RZ` slot per layer (`3 * n_q` slots per layer).
//!
//! The angle families need enough slots to touch every feature at least once,
//! which gives the layer minima [`min_layers_angle_x`] (`ceil(n_x / n_q)`)
//! and [`min_layers_angle_xyz`] (`ceil(n_x / (3 * n_q))`).

use rand::Rng;

use crate::error::{Error, Result};
use crate::statevec::{self, AngleSource, GateKind, GateOp};

/// How a circuit takes its input features.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingKind {
    /// Basis-state initialization plus a full re-upload per layer.
    BasisReupload,
    /// `RX`-only angle encoding, sequential feature consumption.
    AngleX,
    /// Three-axis angle encoding, sequential feature consumption.
    AngleXyz,
}

/// Immutable description of one executable circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    num_qubits: usize,
    num_layers: usize,
    feature_count: usize,
    action_count: usize,
    gates: Vec<GateOp>,
    observable_qubits: Vec<usize>,
    encoding: EncodingKind,
    angle_count: usize,
    scale_count: usize,
}

impl CircuitSpec {
    /// Assemble a spec from explicit parts, validating the structural rules:
    /// indices in range, trainable tables dense, every feature encoded at
    /// least once, one observable qubit per output.
    pub fn from_parts(
        num_qubits: usize,
        num_layers: usize,
        feature_count: usize,
        action_count: usize,
        gates: Vec<GateOp>,
        observable_qubits: Vec<usize>,
        encoding: EncodingKind,
    ) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Domain("a circuit needs at least one qubit".into()));
        }
        if action_count == 0 {
            return Err(Error::Domain("a circuit needs at least one output".into()));
        }
        if observable_qubits.len() != action_count {
            return Err(Error::InvalidCircuit(format!(
                "{} outputs need {} observable qubits, got {}",
                action_count,
                action_count,
                observable_qubits.len()
            )));
        }
        for &q in &observable_qubits {
            if q >= num_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "observable qubit {q} out of range for {num_qubits} qubits"
                )));
            }
        }
        {
            let mut seen = observable_qubits.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != observable_qubits.len() {
                return Err(Error::InvalidCircuit(
                    "observable qubits must be distinct".into(),
                ));
            }
        }

        let mut angle_used = Vec::new();
        let mut scale_used = Vec::new();
        let mut feature_used = vec![false; feature_count];
        for (i, g) in gates.iter().enumerate() {
            if g.target >= num_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "gate {i}: target {} out of range",
                    g.target
                )));
            }
            match g.kind {
                GateKind::Cz => {
                    let c = g.control.ok_or_else(|| {
                        Error::InvalidCircuit(format!("gate {i}: cz needs two qubits"))
                    })?;
                    if c >= num_qubits || c == g.target {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {i}: bad cz qubit pair ({c}, {})",
                            g.target
                        )));
                    }
                }
                _ => {
                    if g.control.is_some() {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {i}: rotations take no second qubit"
                        )));
                    }
                }
            }
            match g.angle {
                AngleSource::Fixed(_) => {}
                AngleSource::Trainable(k) => mark(&mut angle_used, k),
                AngleSource::Encoded { feature, scale } => {
                    if feature >= feature_count {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {i}: feature {feature} out of range"
                        )));
                    }
                    feature_used[feature] = true;
                    mark(&mut scale_used, scale);
                }
            }
        }
        let angle_count = dense_len(&angle_used, "trainable angle")?;
        let scale_count = dense_len(&scale_used, "scale")?;
        if let Some(f) = feature_used.iter().position(|&u| !u) {
            return Err(Error::InvalidCircuit(format!(
                "feature {f} is never encoded by any gate"
            )));
        }

        Ok(CircuitSpec {
            num_qubits,
            num_layers,
            feature_count,
            action_count,
            gates,
            observable_qubits,
            encoding,
            angle_count,
            scale_count,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn observable_qubits(&self) -> &[usize] {
        &self.observable_qubits
    }

    pub fn encoding(&self) -> EncodingKind {
        self.encoding
    }

    /// Length of the trainable angle table.
    pub fn angle_count(&self) -> usize {
        self.angle_count
    }

    /// Length of the encoding scale table.
    pub fn scale_count(&self) -> usize {
        self.scale_count
    }

    /// Total trainable parameters: angles, scales, and one weight per output.
    pub fn param_count(&self) -> usize {
        self.angle_count + self.scale_count + self.action_count
    }
}

fn mark(used: &mut Vec<bool>, index: usize) {
    if index >= used.len() {
        used.resize(index + 1, false);
    }
    used[index] = true;
}

fn dense_len(used: &[bool], what: &str) -> Result<usize> {
    if let Some(k) = used.iter().position(|&u| !u) {
        return Err(Error::InvalidCircuit(format!(
            "{what} index {k} is unused but a higher index is referenced"
        )));
    }
    Ok(used.len())
}

/// Trainable parameters of one circuit, split by role.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    /// Rotation angles, one per trainable rotation slot.
    pub angles: Vec<f64>,
    /// Encoding multipliers, one per encoded rotation slot.
    pub scales: Vec<f64>,
    /// Linear read-out weights, one per output.
    pub weights: Vec<f64>,
}

impl ParamVector {
    /// All-zero parameters shaped for `spec`.
    pub fn zeros(spec: &CircuitSpec) -> Self {
        ParamVector {
            angles: vec![0.0; spec.angle_count()],
            scales: vec![0.0; spec.scale_count()],
            weights: vec![0.0; spec.action_count()],
        }
    }

    /// Fresh trainable state: angles uniform in `(-pi, pi)`, scales and
    /// weights at one so encoding and read-out start as the identity.
    pub fn init<R: Rng>(spec: &CircuitSpec, rng: &mut R) -> Self {
        let angles = (0..spec.angle_count())
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        ParamVector {
            angles,
            scales: vec![1.0; spec.scale_count()],
            weights: vec![1.0; spec.action_count()],
        }
    }

    pub fn check_shape(&self, spec: &CircuitSpec) -> Result<()> {
        if self.angles.len() != spec.angle_count()
            || self.scales.len() != spec.scale_count()
            || self.weights.len() != spec.action_count()
        {
            return Err(Error::ParamShape(format!(
                "expected {}/{}/{} angles/scales/weights, got {}/{}/{}",
                spec.angle_count(),
                spec.scale_count(),
                spec.action_count(),
                self.angles.len(),
                self.scales.len(),
                self.weights.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.angles.len() + self.scales.len() + self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concatenate into the flat layout `[angles | scales | weights]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.len());
        flat.extend_from_slice(&self.angles);
        flat.extend_from_slice(&self.scales);
        flat.extend_from_slice(&self.weights);
        flat
    }

    /// Overwrite from the flat layout `[angles | scales | weights]`.
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.len() {
            return Err(Error::ParamShape(format!(
                "flat vector has {} entries, parameters need {}",
                flat.len(),
                self.len()
            )));
        }
        let (a, rest) = flat.split_at(self.angles.len());
        let (s, w) = rest.split_at(self.scales.len());
        self.angles.copy_from_slice(a);
        self.scales.copy_from_slice(s);
        self.weights.copy_from_slice(w);
        Ok(())
    }
}

/// Fewest layers that let the `RX`-only angle encoding touch every feature.
pub fn min_layers_angle_x(feature_count: usize, num_qubits: usize) -> Result<usize> {
    if feature_count == 0 || num_qubits == 0 {
        return Err(Error::Domain(
            "layer minimum needs positive feature and qubit counts".into(),
        ));
    }
    Ok(feature_count.div_ceil(num_qubits))
}

/// Fewest layers for the three-axis angle encoding.
pub fn min_layers_angle_xyz(feature_count: usize, num_qubits: usize) -> Result<usize> {
    if feature_count == 0 || num_qubits == 0 {
        return Err(Error::Domain(
            "layer minimum needs positive feature and qubit counts".into(),
        ));
    }
    Ok(feature_count.div_ceil(3 * num_qubits))
}

fn push_triplets(gates: &mut Vec<GateOp>, num_qubits: usize, next_angle: &mut usize) {
    for q in 0..num_qubits {
        gates.push(GateOp::rx(q, AngleSource::Trainable(*next_angle)));
        gates.push(GateOp::ry(q, AngleSource::Trainable(*next_angle + 1)));
        gates.push(GateOp::rz(q, AngleSource::Trainable(*next_angle + 2)));
        *next_angle += 3;
    }
}

// A two-qubit ring would apply the same cz twice, cancelling it, so the ring
// degenerates to a single entangler there and to nothing on one qubit.
fn push_ring(gates: &mut Vec<GateOp>, num_qubits: usize) {
    match num_qubits {
        0 | 1 => {}
        2 => gates.push(GateOp::cz(0, 1)),
        n => {
            for q in 0..n {
                gates.push(GateOp::cz(q, (q + 1) % n));
            }
        }
    }
}

fn check_common(feature_count: usize, action_count: usize, num_qubits: usize) -> Result<()> {
    if feature_count == 0 {
        return Err(Error::Domain("feature count must be positive".into()));
    }
    if action_count == 0 {
        return Err(Error::Domain("action count must be positive".into()));
    }
    if action_count > num_qubits {
        return Err(Error::ParamShape(format!(
            "{action_count} outputs need {action_count} distinct observable qubits, \
             only {num_qubits} qubits available"
        )));
    }
    Ok(())
}

/// Basis-encoded re-uploading family. The register width equals the feature
/// count; each layer is a rotation-triplet block, the entangling ring, and a
/// full `RX` re-upload of the feature vector, closed by a final triplet block.
pub fn build_basis_reupload(
    feature_count: usize,
    action_count: usize,
    num_layers: usize,
) -> Result<CircuitSpec> {
    let num_qubits = feature_count;
    check_common(feature_count, action_count, num_qubits)?;
    if num_layers == 0 {
        return Err(Error::InsufficientLayers(
            "the re-uploading family needs at least one layer".into(),
        ));
    }
    let mut gates = Vec::new();
    let mut next_angle = 0;
    let mut next_scale = 0;
    for _ in 0..num_layers {
        push_triplets(&mut gates, num_qubits, &mut next_angle);
        push_ring(&mut gates, num_qubits);
        for f in 0..feature_count {
            gates.push(GateOp::rx(
                f,
                AngleSource::Encoded {
                    feature: f,
                    scale: next_scale,
                },
            ));
            next_scale += 1;
        }
    }
    push_triplets(&mut gates, num_qubits, &mut next_angle);
    CircuitSpec::from_parts(
        num_qubits,
        num_layers,
        feature_count,
        action_count,
        gates,
        (0..action_count).collect(),
        EncodingKind::BasisReupload,
    )
}

/// `RX`-only angle-encoded family on a register of chosen width. Each layer
/// is an encoding block (one `RX` per qubit, features consumed in order and
/// cycling), a rotation-triplet block, and the entangling ring, closed by a
/// final triplet block.
pub fn build_angle_x(
    feature_count: usize,
    action_count: usize,
    num_qubits: usize,
    num_layers: usize,
) -> Result<CircuitSpec> {
    if num_qubits == 0 {
        return Err(Error::Domain("qubit count must be positive".into()));
    }
    check_common(feature_count, action_count, num_qubits)?;
    let min = min_layers_angle_x(feature_count, num_qubits)?;
    if num_layers < min {
        return Err(Error::InsufficientLayers(format!(
            "{feature_count} features on {num_qubits} qubits need at least {min} layers, \
             got {num_layers}"
        )));
    }
    let mut gates = Vec::new();
    let mut next_angle = 0;
    let mut slot = 0usize;
    for _ in 0..num_layers {
        for q in 0..num_qubits {
            gates.push(GateOp::rx(
                q,
                AngleSource::Encoded {
                    feature: slot % feature_count,
                    scale: slot,
                },
            ));
            slot += 1;
        }
        push_triplets(&mut gates, num_qubits, &mut next_angle);
        push_ring(&mut gates, num_qubits);
    }
    push_triplets(&mut gates, num_qubits, &mut next_angle);
    CircuitSpec::from_parts(
        num_qubits,
        num_layers,
        feature_count,
        action_count,
        gates,
        (0..action_count).collect(),
        EncodingKind::AngleX,
    )
}

/// Three-axis angle-encoded family: as [`build_angle_x`] but every qubit
/// contributes an `RX`, `RY`, and `RZ` encoding slot per layer, tripling the
/// features a layer can absorb.
pub fn build_angle_xyz(
    feature_count: usize,
    action_count: usize,
    num_qubits: usize,
    num_layers: usize,
) -> Result<CircuitSpec> {
    if num_qubits == 0 {
        return Err(Error::Domain("qubit count must be positive".into()));
    }
    check_common(feature_count, action_count, num_qubits)?;
    let min = min_layers_angle_xyz(feature_count, num_qubits)?;
    if num_layers < min {
        return Err(Error::InsufficientLayers(format!(
            "{feature_count} features on {num_qubits} qubits need at least {min} layers, \
             got {num_layers}"
        )));
    }
    let mut gates = Vec::new();
    let mut next_angle = 0;
    let mut slot = 0usize;
    for _ in 0..num_layers {
        for q in 0..num_qubits {
            for axis in 0..3 {
                let source = AngleSource::Encoded {
                    feature: slot % feature_count,
                    scale: slot,
                };
                gates.push(match axis {
                    0 => GateOp::rx(q, source),
                    1 => GateOp::ry(q, source),
                    _ => GateOp::rz(q, source),
                });
                slot += 1;
            }
        }
        push_triplets(&mut gates, num_qubits, &mut next_angle);
        push_ring(&mut gates, num_qubits);
    }
    push_triplets(&mut gates, num_qubits, &mut next_angle);
    CircuitSpec::from_parts(
        num_qubits,
        num_layers,
        feature_count,
        action_count,
        gates,
        (0..action_count).collect(),
        EncodingKind::AngleXyz,
    )
}

/// Action values for a binary state vector: run the circuit and apply the
/// linear read-out `Q_a = weights[a] * <Z_a>`.
pub fn q_values(spec: &CircuitSpec, params: &ParamVector, state: &[f64]) -> Result<Vec<f64>> {
    for (i, &x) in state.iter().enumerate() {
        if x != 0.0 && x != 1.0 {
            return Err(Error::Domain(format!(
                "state entries must be 0 or 1, entry {i} is {x}"
            )));
        }
    }
    let expectations = statevec::run_circuit(spec, params, state)?;
    Ok(expectations
        .iter()
        .zip(&params.weights)
        .map(|(e, w)| w * e)
        .collect())
}

//! Dense statevector simulation of small qubit registers.
//!
//! A register of `n` qubits is a vector of `2^n` complex amplitudes indexed so
//! that bit `q` of the amplitude index holds the computational-basis value of
//! qubit `q` (qubit 0 is the least significant bit). Rotations follow the
//! half-angle convention `RX(theta) = exp(-i * theta * X / 2)`, likewise for
//! `RY`/`RZ`, and `CZ` flips the sign of amplitudes whose two qubits are both
//! set. Expectation values of Pauli-Z are read directly from the amplitudes,
//! so every run of a circuit is exact and two runs with the same inputs give
//! bitwise identical results.
//!
//! Gradients of circuit read-outs come in two analytic flavours that must
//! agree with each other: shift-rule differentiation (two extra circuit runs
//! per parameterized gate) and a reverse sweep over the gate list (one extra
//! pass per observable). Both return the Jacobian of the weighted read-outs
//! with respect to the full parameter layout `[angles | scales | weights]`.

use num_complex::Complex64;

use crate::circuits::{CircuitSpec, EncodingKind, ParamVector};
use crate::error::{Error, Result};

/// Hard default for the largest register this process will allocate.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Environment variable that overrides [`DEFAULT_QUBIT_CAP`].
pub const QUBIT_CAP_ENV: &str = "FLOWSYNQ_QUBIT_CAP";

/// Current qubit capacity cap: the environment override if it parses as a
/// positive integer, the built-in default otherwise.
pub fn qubit_cap() -> usize {
    std::env::var(QUBIT_CAP_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_QUBIT_CAP)
}

fn check_capacity(num_qubits: usize) -> Result<()> {
    let cap = qubit_cap();
    if num_qubits > cap {
        return Err(Error::Capacity {
            requested: num_qubits,
            cap,
            env: QUBIT_CAP_ENV,
        });
    }
    Ok(())
}

/// Which rotation generator (or fixed entangler) a gate applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cz,
}

/// Where a gate's rotation angle comes from when a circuit is executed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleSource {
    /// A literal angle baked into the circuit.
    Fixed(f64),
    /// Index into the trainable angle table.
    Trainable(usize),
    /// `scales[scale] * features[feature]`, the re-uploading encoding form.
    Encoded { feature: usize, scale: usize },
}

/// One gate in a circuit program.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    /// Second qubit of a `CZ`; rotations leave this `None`.
    pub control: Option<usize>,
    pub angle: AngleSource,
}

impl GateOp {
    pub fn rx(target: usize, angle: AngleSource) -> Self {
        GateOp {
            kind: GateKind::Rx,
            target,
            control: None,
            angle,
        }
    }

    pub fn ry(target: usize, angle: AngleSource) -> Self {
        GateOp {
            kind: GateKind::Ry,
            target,
            control: None,
            angle,
        }
    }

    pub fn rz(target: usize, angle: AngleSource) -> Self {
        GateOp {
            kind: GateKind::Rz,
            target,
            control: None,
            angle,
        }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        GateOp {
            kind: GateKind::Cz,
            target: b,
            control: Some(a),
            angle: AngleSource::Fixed(0.0),
        }
    }

    /// True when executing the gate needs an angle resolved from parameters.
    pub fn is_parameterized(&self) -> bool {
        !matches!(self.angle, AngleSource::Fixed(_))
    }
}

/// Dense complex state of a qubit register.
#[derive(Clone, Debug)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// All-zeros register `|0...0>`.
    pub fn zeros(num_qubits: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { num_qubits, amps })
    }

    /// Computational basis state selected by one bit per qubit.
    ///
    /// `bits[q]` (0 or 1) is the value of qubit `q`, so `bits = [1, 0, 1]`
    /// puts the single unit amplitude at index `0b101 = 5`.
    pub fn basis(num_qubits: usize, bits: &[u8]) -> Result<Self> {
        check_capacity(num_qubits)?;
        if bits.len() != num_qubits {
            return Err(Error::Dimension(format!(
                "basis state needs {num_qubits} bits, got {}",
                bits.len()
            )));
        }
        let mut index = 0usize;
        for (q, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => index |= 1 << q,
                other => {
                    return Err(Error::Domain(format!(
                        "basis bit for qubit {q} must be 0 or 1, got {other}"
                    )))
                }
            }
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Statevector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Sum of squared amplitude magnitudes; 1 up to rounding for any state
    /// produced by the gates in this module.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::Dimension(format!(
                "qubit {qubit} out of range for a {}-qubit register",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Apply one gate with an already resolved angle (ignored for `CZ`).
    pub fn apply(&mut self, gate: &GateOp, angle: f64) -> Result<()> {
        self.check_qubit(gate.target)?;
        match gate.kind {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                if gate.control.is_some() {
                    return Err(Error::InvalidCircuit(
                        "rotation gates take no second qubit".into(),
                    ));
                }
            }
            GateKind::Cz => {
                let c = gate.control.ok_or_else(|| {
                    Error::InvalidCircuit("cz needs two qubits, control missing".into())
                })?;
                self.check_qubit(c)?;
                if c == gate.target {
                    return Err(Error::InvalidCircuit(
                        "cz qubits must be distinct".into(),
                    ));
                }
            }
        }

        let t = gate.target;
        match gate.kind {
            GateKind::Rx => {
                let (s, c) = (angle / 2.0).sin_cos();
                let ms = Complex64::new(0.0, -s);
                self.map_pairs(t, |a, b| (c * a + ms * b, ms * a + c * b));
            }
            GateKind::Ry => {
                let (s, c) = (angle / 2.0).sin_cos();
                self.map_pairs(t, |a, b| (c * a - s * b, s * a + c * b));
            }
            GateKind::Rz => {
                let (s, c) = (angle / 2.0).sin_cos();
                let p0 = Complex64::new(c, -s);
                let p1 = Complex64::new(c, s);
                let step = 1usize << t;
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if i & step == 0 { p0 } else { p1 };
                }
            }
            GateKind::Cz => {
                let mask = (1usize << t) | (1usize << gate.control.unwrap());
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(())
    }

    /// Visit the amplitude pairs that differ only in bit `target`.
    fn map_pairs<F>(&mut self, target: usize, f: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let step = 1usize << target;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for offset in base..base + step {
                let i = offset;
                let j = offset + step;
                let (a, b) = (self.amps[i], self.amps[j]);
                let (na, nb) = f(a, b);
                self.amps[i] = na;
                self.amps[j] = nb;
            }
            base += 2 * step;
        }
    }

    /// Exact `<Z>` on one qubit: +1 weight for amplitudes with the bit clear,
    /// -1 for amplitudes with the bit set.
    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let step = 1usize << qubit;
        let mut acc = 0.0;
        for (i, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            acc += if i & step == 0 { p } else { -p };
        }
        Ok(acc)
    }

    /// Overwrite `dst` with the Pauli generator of `kind` applied to `self`.
    /// Used by the reverse-sweep differentiation; `Cz` is not a generator.
    fn pauli_into(&self, kind: GateKind, target: usize, dst: &mut [Complex64]) {
        let step = 1usize << target;
        match kind {
            GateKind::Rx => {
                // X: swap the pair.
                for i in 0..self.amps.len() {
                    dst[i] = self.amps[i ^ step];
                }
            }
            GateKind::Ry => {
                // Y: |0> -> i|1>, |1> -> -i|0> on the target bit.
                for i in 0..self.amps.len() {
                    let other = self.amps[i ^ step];
                    dst[i] = if i & step == 0 {
                        Complex64::new(other.im, -other.re) // -i * amp(bit=1)
                    } else {
                        Complex64::new(-other.im, other.re) // i * amp(bit=0)
                    };
                }
            }
            GateKind::Rz => {
                for i in 0..self.amps.len() {
                    let a = self.amps[i];
                    dst[i] = if i & step == 0 { a } else { -a };
                }
            }
            GateKind::Cz => unreachable!("cz carries no trainable angle"),
        }
    }
}

/// Row-major Jacobian of the weighted circuit read-outs.
///
/// Row `a` is output `a`; columns follow the flat parameter layout
/// `[angles | scales | weights]` of the circuit the Jacobian came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian {
    outputs: usize,
    params: usize,
    data: Vec<f64>,
}

impl Jacobian {
    fn zeros(outputs: usize, params: usize) -> Self {
        Jacobian {
            outputs,
            params,
            data: vec![0.0; outputs * params],
        }
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn get(&self, output: usize, param: usize) -> f64 {
        self.data[output * self.params + param]
    }

    fn add(&mut self, output: usize, param: usize, value: f64) {
        self.data[output * self.params + param] += value;
    }

    pub fn row(&self, output: usize) -> &[f64] {
        &self.data[output * self.params..(output + 1) * self.params]
    }
}

/// Resolve every gate's angle against the parameter tables and features.
/// Index checks happened when the spec was built, so lookups are direct.
fn resolve_angles(spec: &CircuitSpec, params: &ParamVector, features: &[f64]) -> Vec<f64> {
    spec.gates()
        .iter()
        .map(|g| match g.angle {
            AngleSource::Fixed(v) => v,
            AngleSource::Trainable(k) => params.angles[k],
            AngleSource::Encoded { feature, scale } => params.scales[scale] * features[feature],
        })
        .collect()
}

fn check_inputs(spec: &CircuitSpec, params: &ParamVector, features: &[f64]) -> Result<()> {
    if features.len() != spec.feature_count() {
        return Err(Error::Dimension(format!(
            "circuit expects {} features, got {}",
            spec.feature_count(),
            features.len()
        )));
    }
    params.check_shape(spec)?;
    if spec.encoding() == EncodingKind::BasisReupload {
        for (i, &x) in features.iter().enumerate() {
            if x != 0.0 && x != 1.0 {
                return Err(Error::Domain(format!(
                    "basis encoding needs binary features, feature {i} is {x}"
                )));
            }
        }
    }
    Ok(())
}

/// Initial register for a circuit: basis-encoded features for the
/// re-uploading basis variant, `|0...0>` for the angle variants.
fn initial_state(spec: &CircuitSpec, features: &[f64]) -> Result<Statevector> {
    match spec.encoding() {
        EncodingKind::BasisReupload => {
            let bits: Vec<u8> = features.iter().map(|&x| x as u8).collect();
            Statevector::basis(spec.num_qubits(), &bits)
        }
        EncodingKind::AngleX | EncodingKind::AngleXyz => Statevector::zeros(spec.num_qubits()),
    }
}

fn execute(spec: &CircuitSpec, angles: &[f64], features: &[f64]) -> Result<Statevector> {
    let mut state = initial_state(spec, features)?;
    for (g, &angle) in spec.gates().iter().zip(angles) {
        state.apply(g, angle)?;
    }
    Ok(state)
}

fn observe(spec: &CircuitSpec, state: &Statevector) -> Result<Vec<f64>> {
    spec.observable_qubits()
        .iter()
        .map(|&q| state.expect_z(q))
        .collect()
}

/// Run a circuit and return `<Z>` for each observable qubit, in spec order.
pub fn run_circuit(
    spec: &CircuitSpec,
    params: &ParamVector,
    features: &[f64],
) -> Result<Vec<f64>> {
    check_inputs(spec, params, features)?;
    let angles = resolve_angles(spec, params, features);
    let state = execute(spec, &angles, features)?;
    observe(spec, &state)
}

/// Map per-gate angle derivatives of the raw expectations into the Jacobian
/// of the weighted read-outs `Q_a = weights[a] * <Z_a>` over the full layout.
fn assemble_jacobian(
    spec: &CircuitSpec,
    params: &ParamVector,
    features: &[f64],
    expectations: &[f64],
    gate_derivs: &[Vec<f64>],
) -> Jacobian {
    let n_out = spec.action_count();
    let mut jac = Jacobian::zeros(n_out, spec.param_count());
    let scale_off = spec.angle_count();
    let weight_off = scale_off + spec.scale_count();
    for a in 0..n_out {
        let w = params.weights[a];
        for (g, gate) in spec.gates().iter().enumerate() {
            let d = gate_derivs[a][g];
            match gate.angle {
                AngleSource::Fixed(_) => {}
                AngleSource::Trainable(k) => jac.add(a, k, w * d),
                AngleSource::Encoded { feature, scale } => {
                    jac.add(a, scale_off + scale, w * features[feature] * d)
                }
            }
        }
        jac.add(a, weight_off + a, expectations[a]);
    }
    jac
}

/// Jacobian of the weighted read-outs by shift-rule differentiation: every
/// parameterized gate is re-run with its angle displaced by plus and minus a
/// quarter turn and the halved difference is the exact angle derivative.
pub fn gradient_param_shift(
    spec: &CircuitSpec,
    params: &ParamVector,
    features: &[f64],
) -> Result<Jacobian> {
    check_inputs(spec, params, features)?;
    check_differentiable(spec)?;
    let angles = resolve_angles(spec, params, features);
    let base = observe(spec, &execute(spec, &angles, features)?)?;

    let n_out = spec.action_count();
    let mut gate_derivs = vec![vec![0.0; spec.gates().len()]; n_out];
    let mut shifted = angles.clone();
    for (g, gate) in spec.gates().iter().enumerate() {
        if !gate.is_parameterized() {
            continue;
        }
        shifted[g] = angles[g] + std::f64::consts::FRAC_PI_2;
        let plus = observe(spec, &execute(spec, &shifted, features)?)?;
        shifted[g] = angles[g] - std::f64::consts::FRAC_PI_2;
        let minus = observe(spec, &execute(spec, &shifted, features)?)?;
        shifted[g] = angles[g];
        for a in 0..n_out {
            gate_derivs[a][g] = (plus[a] - minus[a]) / 2.0;
        }
    }
    Ok(assemble_jacobian(spec, params, features, &base, &gate_derivs))
}

/// Jacobian of the weighted read-outs by a reverse sweep: one forward run,
/// then the gate list is undone once while a carried copy of each observable
/// picks up the angle derivatives. Agrees with the shift rule to rounding.
pub fn gradient_adjoint(
    spec: &CircuitSpec,
    params: &ParamVector,
    features: &[f64],
) -> Result<Jacobian> {
    let rows: Vec<usize> = (0..spec.action_count()).collect();
    let (expectations, gate_derivs) = adjoint_sweep(spec, params, features, &rows)?;
    Ok(assemble_jacobian(
        spec,
        params,
        features,
        &expectations,
        &gate_derivs,
    ))
}

/// Weighted read-out and its gradient row for a single output, sharing the
/// reverse sweep. This is the training fast path: cost is independent of the
/// number of outputs and parameters.
pub(crate) fn value_and_grad_row(
    spec: &CircuitSpec,
    params: &ParamVector,
    features: &[f64],
    output: usize,
) -> Result<(f64, Vec<f64>)> {
    if output >= spec.action_count() {
        return Err(Error::Dimension(format!(
            "output {output} out of range, circuit has {}",
            spec.action_count()
        )));
    }
    let (expectations, gate_derivs) = adjoint_sweep(spec, params, features, &[output])?;
    // adjoint_sweep returns data indexed by requested row, re-expand to the
    // full output count for the shared assembler.
    let mut exp_full = vec![0.0; spec.action_count()];
    exp_full[output] = expectations[0];
    let mut derivs_full = vec![vec![0.0; spec.gates().len()]; spec.action_count()];
    derivs_full[output] = gate_derivs.into_iter().next().unwrap();
    let jac = assemble_jacobian(spec, params, features, &exp_full, &derivs_full);
    let q = params.weights[output] * exp_full[output];
    Ok((q, jac.row(output).to_vec()))
}

fn check_differentiable(spec: &CircuitSpec) -> Result<()> {
    for (g, gate) in spec.gates().iter().enumerate() {
        if gate.kind == GateKind::Cz && gate.is_parameterized() {
            return Err(Error::UnsupportedGate(format!(
                "gate {g}: cz cannot carry a trainable angle"
            )));
        }
    }
    Ok(())
}

/// Shared reverse sweep. Returns the raw expectations of the requested rows
/// (indexed as given) and per-gate angle derivatives `d<Z_row>/d(angle_g)`.
fn adjoint_sweep(
    spec: &CircuitSpec,
    params: &ParamVector,
    features: &[f64],
    rows: &[usize],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check_inputs(spec, params, features)?;
    check_differentiable(spec)?;
    let angles = resolve_angles(spec, params, features);
    let mut phi = execute(spec, &angles, features)?;

    let obs_qubits: Vec<usize> = rows
        .iter()
        .map(|&r| spec.observable_qubits()[r])
        .collect();
    let expectations: Vec<f64> = obs_qubits
        .iter()
        .map(|&q| phi.expect_z(q))
        .collect::<Result<_>>()?;

    // One carried copy per requested observable: Z_q applied to the final
    // state, then undone gate by gate alongside phi.
    let mut lams: Vec<Statevector> = obs_qubits
        .iter()
        .map(|&q| {
            let mut lam = phi.clone();
            let step = 1usize << q;
            for (i, amp) in lam.amps.iter_mut().enumerate() {
                if i & step != 0 {
                    *amp = -*amp;
                }
            }
            lam
        })
        .collect();

    let mut gate_derivs = vec![vec![0.0; spec.gates().len()]; rows.len()];
    let mut scratch = vec![Complex64::new(0.0, 0.0); phi.amps.len()];

    for (g, gate) in spec.gates().iter().enumerate().rev() {
        if gate.is_parameterized() {
            // d<Z>/d(angle) = Im(<lam | G | phi>) with phi the state after
            // this gate; the half-angle convention absorbs the 1/2 factor.
            phi.pauli_into(gate.kind, gate.target, &mut scratch);
            for (r, lam) in lams.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, s) in lam.amps.iter().zip(scratch.iter()) {
                    acc += l.conj() * s;
                }
                gate_derivs[r][g] = acc.im;
            }
        }
        // Undo the gate on phi and every carried copy. Rotations invert by
        // negating the angle; cz is its own inverse.
        let inverse_angle = -angles[g];
        phi.apply(gate, inverse_angle)?;
        for lam in lams.iter_mut() {
            lam.apply(gate, inverse_angle)?;
        }
    }
    Ok((expectations, gate_derivs))
}

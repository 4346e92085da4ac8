//! Shared oracles for the integration suite.
//!
//! Everything here re-derives simulator semantics from first principles
//! (dense matrices, Kronecker embedding, central differences) with no code
//! shared with the implementation under test.

use flowsynq::circuits::{q_values, CircuitSpec, EncodingKind, ParamVector};
use flowsynq::statevec::{AngleSource, GateKind, GateOp};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex64;
pub type Matrix = Vec<Vec<C64>>;

pub fn identity(dim: usize) -> Matrix {
    let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    m
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut m = vec![vec![C64::new(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

/// Textbook half-angle rotation matrices.
pub fn rotation_2x2(kind: GateKind, theta: f64) -> Matrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let z = C64::new(0.0, 0.0);
    match kind {
        GateKind::Rx => vec![
            vec![C64::new(c, 0.0), C64::new(0.0, -s)],
            vec![C64::new(0.0, -s), C64::new(c, 0.0)],
        ],
        GateKind::Ry => vec![
            vec![C64::new(c, 0.0), C64::new(-s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(c, 0.0)],
        ],
        GateKind::Rz => vec![
            vec![C64::from_polar(1.0, -theta / 2.0), z],
            vec![z, C64::from_polar(1.0, theta / 2.0)],
        ],
        GateKind::Cz => panic!("not a single-qubit gate"),
    }
}

/// Embed one gate into the full 2^n unitary. Amplitude index bit q is
/// qubit q, so a gate on qubit t sits as I_(2^(n-1-t)) (x) u (x) I_(2^t);
/// CZ is diagonal with -1 wherever both its qubits are set.
pub fn embedded_matrix(op: &GateOp, angle: f64, num_qubits: usize) -> Matrix {
    let dim = 1usize << num_qubits;
    if op.kind == GateKind::Cz {
        let (a, b) = (op.control.unwrap(), op.target);
        let mut m = identity(dim);
        for (i, row) in m.iter_mut().enumerate() {
            if i >> a & 1 == 1 && i >> b & 1 == 1 {
                row[i] = C64::new(-1.0, 0.0);
            }
        }
        return m;
    }
    let u = rotation_2x2(op.kind, angle);
    let t = op.target;
    kron(
        &identity(1 << (num_qubits - 1 - t)),
        &kron(&u, &identity(1 << t)),
    )
}

pub fn matvec(m: &Matrix, v: &[C64]) -> Vec<C64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// The same angle-resolution rule the executor documents, rebuilt here.
pub fn resolve_angle(op: &GateOp, params: &ParamVector, features: &[f64]) -> f64 {
    match op.angle {
        AngleSource::Fixed(a) => a,
        AngleSource::Trainable(k) => params.angles[k],
        AngleSource::Encoded { feature, scale } => params.scales[scale] * features[feature],
    }
}

/// Run a circuit the slow way: one dense matrix-vector product per gate
/// starting from |0...0>, returning the final state.
pub fn full_matrix_state(spec: &CircuitSpec, params: &ParamVector, features: &[f64]) -> Vec<C64> {
    let dim = 1usize << spec.num_qubits();
    let mut state = vec![C64::new(0.0, 0.0); dim];
    state[0] = C64::new(1.0, 0.0);
    for op in spec.gates() {
        let angle = resolve_angle(op, params, features);
        state = matvec(&embedded_matrix(op, angle, spec.num_qubits()), &state);
    }
    state
}

/// Z expectation of one qubit from raw amplitudes.
pub fn expect_z_of(state: &[C64], qubit: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(i, amp)| {
            let sign = if i >> qubit & 1 == 1 { -1.0 } else { 1.0 };
            sign * amp.norm_sqr()
        })
        .sum()
}

pub struct RandomCircuit {
    pub spec: CircuitSpec,
    pub params: ParamVector,
    pub features: Vec<f64>,
}

/// A random well-formed circuit of up to five qubits mixing all four gate
/// kinds and all three angle sources, with real-valued features (so the
/// initial state is |0...0>).
pub fn random_circuit(rng: &mut ChaCha8Rng) -> RandomCircuit {
    let n = rng.gen_range(1..=5);
    let n_features = rng.gen_range(1..=6);
    let mut gates = Vec::new();
    let mut next_trainable = 0usize;
    let mut next_scale = 0usize;

    // Cover every feature first so the description validates.
    for f in 0..n_features {
        gates.push(GateOp::rx(
            f % n,
            AngleSource::Encoded {
                feature: f,
                scale: next_scale,
            },
        ));
        next_scale += 1;
    }
    for _ in 0..rng.gen_range(5..=40) {
        let pick = rng.gen_range(0..4);
        if pick == 3 {
            if n >= 2 {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                gates.push(GateOp::cz(a, b));
            }
            continue;
        }
        let source = match rng.gen_range(0..3) {
            0 => AngleSource::Fixed(rng.gen_range(-3.0..3.0)),
            1 => {
                next_trainable += 1;
                AngleSource::Trainable(next_trainable - 1)
            }
            _ => {
                next_scale += 1;
                AngleSource::Encoded {
                    feature: rng.gen_range(0..n_features),
                    scale: next_scale - 1,
                }
            }
        };
        let target = rng.gen_range(0..n);
        gates.push(match pick {
            0 => GateOp::rx(target, source),
            1 => GateOp::ry(target, source),
            _ => GateOp::rz(target, source),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    order.truncate(rng.gen_range(1..=n));

    let spec = CircuitSpec::from_parts(n, 1, n_features, order.len(), gates, order, EncodingKind::AngleX)
        .expect("generated circuit is well formed");
    let mut params = ParamVector::init(&spec, rng);
    for s in params.scales.iter_mut() {
        *s = rng.gen_range(-1.5..1.5);
    }
    for w in params.weights.iter_mut() {
        *w = rng.gen_range(-2.0..2.0);
    }
    let features = (0..n_features).map(|_| rng.gen_range(-1.0..1.0)).collect();
    RandomCircuit {
        spec,
        params,
        features,
    }
}

/// Central-difference jacobian of the weighted read-outs over the flat
/// parameter layout.
pub fn fd_jacobian(
    spec: &CircuitSpec,
    params: &ParamVector,
    features: &[f64],
    h: f64,
) -> Vec<Vec<f64>> {
    let flat = params.to_flat();
    let mut probe = params.clone();
    let mut jac = vec![vec![0.0; flat.len()]; spec.action_count()];
    for p in 0..flat.len() {
        let mut at = |v: f64| -> Vec<f64> {
            let mut bumped = flat.clone();
            bumped[p] = v;
            probe.assign_flat(&bumped).unwrap();
            q_values(spec, &probe, features).unwrap()
        };
        let plus = at(flat[p] + h);
        let minus = at(flat[p] - h);
        for (o, row) in jac.iter_mut().enumerate() {
            row[p] = (plus[o] - minus[o]) / (2.0 * h);
        }
    }
    jac
}

/// |a - b| within `tol` scaled by the larger magnitude (floor 1).
pub fn within_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

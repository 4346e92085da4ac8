//! Two exact gradient routes and a numerical cross-check.
//!
//! The shift rule evaluates the circuit twice per resolved angle; the
//! adjoint route sweeps the statevector backward once. Both are exact,
//! so they agree to rounding, and central finite differences land within
//! truncation error of either.
//!
//! Run with: cargo run --example gradient_methods

use flowsynq::circuits::{build_angle_x, q_values, ParamVector};
use flowsynq::statevec::{gradient_adjoint, gradient_param_shift};
use flowsynq::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let spec = build_angle_x(4, 2, 2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = ParamVector::init(&spec, &mut rng);
    let x = [1.0, 0.0, 1.0, 1.0];

    let shift = gradient_param_shift(&spec, &params, &x)?;
    let adjoint = gradient_adjoint(&spec, &params, &x)?;

    let mut worst = 0.0f64;
    for o in 0..shift.outputs() {
        for p in 0..shift.params() {
            worst = worst.max((shift.get(o, p) - adjoint.get(o, p)).abs());
        }
    }
    println!(
        "jacobian {} outputs x {} params",
        shift.outputs(),
        shift.params()
    );
    println!("largest shift-vs-adjoint deviation: {worst:.3e}");

    // Central differences over the flat layout [angles | scales | weights]
    // as an independent check on a handful of entries.
    let flat = params.to_flat();
    let h = 1e-6;
    println!("{:>6} {:>14} {:>14} {:>10}", "param", "adjoint", "numeric", "delta");
    for p in [0, 3, spec.angle_count(), flat.len() - 2] {
        let mut probe = params.clone();
        let mut value_at = |v: f64| -> Result<f64> {
            let mut bumped = flat.clone();
            bumped[p] = v;
            probe.assign_flat(&bumped)?;
            Ok(q_values(&spec, &probe, &x)?[0])
        };
        let numeric = (value_at(flat[p] + h)? - value_at(flat[p] - h)?) / (2.0 * h);
        let exact = adjoint.get(0, p);
        println!(
            "{p:>6} {exact:>14.9} {numeric:>14.9} {:>10.2e}",
            (exact - numeric).abs()
        );
    }
    Ok(())
}

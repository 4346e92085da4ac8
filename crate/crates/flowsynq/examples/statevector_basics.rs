//! A short tour of the dense simulator: registers, gates, and read-out.
//!
//! Run with: cargo run --example statevector_basics

use std::f64::consts::{FRAC_PI_2, PI};

use flowsynq::statevec::{qubit_cap, AngleSource, GateOp, Statevector};
use flowsynq::Result;

fn main() -> Result<()> {
    // Amplitude indices are little-endian: qubit q contributes bit q, so
    // the bit pattern [1, 0, 1] lands on index 1 + 4 = 5.
    let psi = Statevector::basis(3, &[1, 0, 1])?;
    println!("|101> amplitude at index 5: {}", psi.amplitudes()[5]);

    // A half turn around X flips a qubit (up to a global phase). Gates
    // carry an angle source for the differentiators; plain use passes the
    // resolved angle alongside.
    let mut psi = Statevector::zeros(2)?;
    psi.apply(&GateOp::rx(0, AngleSource::Fixed(PI)), PI)?;
    println!("after RX(pi) on qubit 0:  <Z0> = {:+.3}", psi.expect_z(0)?);
    println!("qubit 1 untouched:        <Z1> = {:+.3}", psi.expect_z(1)?);

    // A quarter turn leaves an even superposition, so <Z> vanishes.
    psi.apply(&GateOp::ry(1, AngleSource::Fixed(FRAC_PI_2)), FRAC_PI_2)?;
    println!("after RY(pi/2) on qubit 1: <Z1> = {:+.3}", psi.expect_z(1)?);

    // CZ flips the sign of the |11> component and nothing else.
    let mut pair = Statevector::zeros(2)?;
    for q in 0..2 {
        pair.apply(&GateOp::ry(q, AngleSource::Fixed(FRAC_PI_2)), FRAC_PI_2)?;
    }
    pair.apply(&GateOp::cz(0, 1), 0.0)?;
    println!("uniform state after CZ:");
    for (i, amp) in pair.amplitudes().iter().enumerate() {
        println!("  |{i:02b}>  {amp}");
    }
    println!("norm^2 = {:.15}", pair.norm_sqr());

    // Oversized registers are refused before anything is allocated; the
    // cap is overridable through the environment.
    println!("register cap: {} qubits", qubit_cap());
    if let Err(e) = Statevector::zeros(qubit_cap() + 1) {
        println!("oversized register: {e}");
    }
    Ok(())
}

//! The three circuit families at the sizes the workbench trains.
//!
//! Run with: cargo run --example circuit_architectures

use flowsynq::circuits::{
    build_angle_x, build_angle_xyz, build_basis_reupload, min_layers_angle_x,
    min_layers_angle_xyz, CircuitSpec,
};
use flowsynq::qnet::classical_param_count;
use flowsynq::Result;

fn row(family: &str, spec: &CircuitSpec) {
    println!(
        "{:<16} {:>6} {:>6} {:>6} {:>8}",
        family,
        spec.feature_count(),
        spec.num_qubits(),
        spec.num_layers(),
        spec.param_count()
    );
}

fn main() -> Result<()> {
    println!(
        "{:<16} {:>6} {:>6} {:>6} {:>8}",
        "family", "inputs", "qubits", "layers", "params"
    );

    // The three problem sizes: (input bits, actions).
    for (n_x, n_a) in [(12, 4), (20, 5), (30, 6)] {
        // Basis re-upload pins one qubit per input bit; a single layer is
        // already a complete network.
        row("basis_reupload", &build_basis_reupload(n_x, n_a, 1)?);

        // The angle families compress the input into one qubit per action
        // and need enough layers to encode every feature at least once.
        let l = min_layers_angle_x(n_x, n_a)?;
        row("angle_x", &build_angle_x(n_x, n_a, n_a, l)?);
        let l = min_layers_angle_xyz(n_x, n_a)?;
        row("angle_xyz", &build_angle_xyz(n_x, n_a, n_a, l)?);

        println!(
            "{:<16} {:>6} {:>6} {:>6} {:>8}",
            "dense", n_x, "-", "-", classical_param_count(n_x, n_a)
        );
    }

    // Depth is free above the minimum: the deep configurations trade
    // simulation time for parameter head room at the largest size.
    println!();
    row("angle_x deep", &build_angle_x(30, 6, 6, 30)?);
    row("angle_xyz deep", &build_angle_xyz(30, 6, 6, 20)?);

    // Below the encoding minimum there is no room for every feature.
    println!();
    if let Err(e) = build_angle_x(12, 4, 4, 2) {
        println!("layers below the minimum: {e}");
    }
    Ok(())
}

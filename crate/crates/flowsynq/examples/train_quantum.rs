//! Train the cheapest circuit model on the smallest design space.
//!
//! The three-axis angle encoding packs all 12 input bits into a single
//! layer on 4 qubits, 40 trainable parameters in total, so the dense
//! simulation stays fast enough for a desk-scale run.
//!
//! Run with: cargo run --release --example train_quantum

use flowsynq::agent::{Hyperparams, Trainer};
use flowsynq::circuits::build_angle_xyz;
use flowsynq::flowsheet::Scenario;
use flowsynq::hdasim::Calibration;
use flowsynq::qnet::QModel;
use flowsynq::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let scenario = Scenario::new(1)?;
    let spec = build_angle_xyz(
        scenario.state_dim(),
        scenario.action_count(),
        scenario.action_count(),
        1,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = QModel::quantum(spec, &mut rng);
    println!(
        "angle_xyz model, {} qubits, {} parameters",
        model.circuit().unwrap().num_qubits(),
        model.param_count()
    );

    let hp = Hyperparams {
        episodes: 400,
        ..Hyperparams::default()
    };
    let mut trainer = Trainer::new(scenario.clone(), Calibration::default(), hp, model, rng)?;
    let (metrics, _) = trainer.train()?;
    println!(
        "opt_sf {}  uniq_sf {}  feas_sf {}  first_opt {:?}  runtime {:.2}s",
        metrics.opt_sf, metrics.uniq_sf, metrics.feas_sf, metrics.first_opt_episode,
        metrics.runtime_s
    );
    println!(
        "design-space optimum reward: {:.3}",
        trainer.optimal_reward()
    );

    // Q-values are weighted Pauli-Z expectations of the trained circuit.
    let q = trainer.model().predict(&scenario.encode(&scenario.reset()))?;
    println!("Q at the empty structure: {q:?}");
    Ok(())
}

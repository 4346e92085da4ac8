//! Save a trained model and restore it bit for bit.
//!
//! Checkpoints store every parameter as the hex image of its float bits,
//! so a restored model predicts exactly what the saved one did.
//!
//! Run with: cargo run --example checkpoints

use flowsynq::agent::{Hyperparams, Trainer};
use flowsynq::flowsheet::Scenario;
use flowsynq::hdasim::Calibration;
use flowsynq::circuits::build_angle_x;
use flowsynq::qnet::QModel;
use flowsynq::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let scenario = Scenario::new(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = build_angle_x(scenario.state_dim(), scenario.action_count(), 4, 3)?;
    let model = QModel::quantum(spec, &mut rng);

    // A short run to move the parameters off their initialization.
    let hp = Hyperparams {
        episodes: 40,
        ..Hyperparams::default()
    };
    let mut trainer = Trainer::new(scenario.clone(), Calibration::default(), hp, model, rng)?;
    trainer.train()?;

    let path = std::env::temp_dir().join("flowsynq_example.ckpt");
    trainer.model().save(&path)?;
    println!("saved {} ({} parameters)", path.display(), trainer.model().param_count());

    let restored = QModel::load(&path)?;
    let probe = scenario.encode(&scenario.reset());
    let before = trainer.model().predict(&probe)?;
    let after = restored.predict(&probe)?;
    println!("original predictions: {before:?}");
    println!("restored predictions: {after:?}");
    assert!(
        before
            .iter()
            .zip(&after)
            .all(|(a, b)| a.to_bits() == b.to_bits()),
        "round trip must be exact"
    );
    println!("bitwise identical: yes");

    // The checkpoint header is readable on its own.
    let text = std::fs::read_to_string(&path)?;
    println!("\nheader:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}

//! One seeded training run of the dense baseline on the smallest space.
//!
//! Run with: cargo run --release --example train_classical

use flowsynq::agent::{Hyperparams, Trainer};
use flowsynq::flowsheet::Scenario;
use flowsynq::hdasim::Calibration;
use flowsynq::qnet::QModel;
use flowsynq::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let scenario = Scenario::new(1)?;
    // One generator drives the whole run: model init first, then the
    // per-step exploration and batch draws.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let model = QModel::classical(scenario.state_dim(), scenario.action_count(), &mut rng)?;
    println!("dense model, {} parameters", model.param_count());

    let hp = Hyperparams {
        episodes: 600,
        ..Hyperparams::default()
    };
    let mut trainer = Trainer::new(scenario.clone(), Calibration::default(), hp, model, rng)?;
    let (metrics, logs) = trainer.train()?;

    println!(
        "episodes {}  opt_sf {}  uniq_sf {}  feas_sf {}  first_opt {:?}  runtime {:.2}s",
        logs.len(),
        metrics.opt_sf,
        metrics.uniq_sf,
        metrics.feas_sf,
        metrics.first_opt_episode,
        metrics.runtime_s
    );

    // Greedy roll-out with the trained model: follow the argmax action
    // from the empty structure and watch what it builds.
    let mut state = scenario.reset();
    print!("greedy roll-out: {}", scenario.signature(&state));
    for _ in 0..4 {
        let q = trainer.model().predict(&scenario.encode(&state))?;
        // Same tie rule as the trainer: argmax, lowest index wins.
        let mut best = 0;
        for a in 1..q.len() {
            if q[a] > q[best] {
                best = a;
            }
        }
        state = scenario.apply(&state, best)?.0;
        print!(" -> {}", scenario.signature(&state));
    }
    println!();
    Ok(())
}

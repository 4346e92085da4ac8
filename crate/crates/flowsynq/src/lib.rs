//! Classical and quantum Q-learning on a toy flowsheet-synthesis task.
//!
//! A process structure is built unit by unit as a Markov decision process:
//! states are serial unit trains, actions append or remove units, and the
//! reward of a structurally sound train comes from a small calibrated
//! process evaluator. Deep Q-learning drives either a dense network or one
//! of three parameterized-circuit families simulated on a dense
//! statevector, all behind one training interface, with every run
//! reproducible bit for bit from its seed.
//!
//! Module map:
//! - [`statevec`]: the simulator, with exact expectations and two exact
//!   differentiation routes (parameter shift and adjoint sweep)
//! - [`circuits`]: the circuit families and their parameter layout
//! - [`qnet`]: trainable approximators, optimizers, checkpoints
//! - [`flowsheet`]: the environment: unit trains, screening, encoding
//! - [`hdasim`]: the process evaluator and the reward it induces
//! - [`agent`]: replay buffer, ε-greedy policy, the training loop
//! - [`runner`]: config files, seeded runs, batches, report files
//!
//! Each capability has a runnable walk-through under `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `statevector_basics` | registers, gates, read-out, the qubit cap |
//! | `circuit_architectures` | the three circuit families and their sizes |
//! | `gradient_methods` | shift rule vs adjoint sweep vs finite differences |
//! | `design_space_oracle` | exhaustive enumeration and scoring |
//! | `hda_evaluator` | stream walks and whole-train evaluation |
//! | `train_classical` | a seeded dense-baseline training run |
//! | `train_quantum` | a seeded circuit-model training run |
//! | `batch_experiments` | derived seeds and mean/std aggregates |
//! | `checkpoints` | bitwise model save and restore |
//!
//! Start with `cargo run --release --example train_classical`. The
//! `flowsynq` binary wraps the same machinery behind `run`, `batch`, and
//! `oracle` subcommands.

pub mod agent;
pub mod circuits;
mod error;
pub mod flowsheet;
pub mod hdasim;
pub mod qnet;
pub mod runner;
pub mod statevec;

pub use error::{Error, Result};

//! ε-greedy Q-learning on the flowsheet environment.
//!
//! The trainer is agnostic to the approximator family: it drives any
//! [`QModel`] with the same loop of ε-greedy action selection, structural
//! screening, evaluation of screened structures, replay storage, and
//! squared-error regression against bootstrap targets from a periodically
//! synchronized frozen copy of the model.
//!
//! Every random draw comes from one explicitly seeded generator in a fixed
//! order (model initialization by the caller, then per step: one exploration
//! draw, one action draw only when exploring, then the batch index draws),
//! so a run is reproducible bit for bit from its seed.

use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flowsheet::{FlowsheetState, Scenario, ScreenReason, ScreenResult, DEFAULT_HORIZON};
use crate::hdasim::{self, Calibration, SimResult};
use crate::qnet::{self, OptimizerKind, OptimizerState, QModel, TrainSample};

/// One environment interaction, as stored for replay.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub state: Vec<u8>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<u8>,
}

/// Fixed-capacity transition store; the oldest entry is evicted first.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        Ok(ReplayBuffer {
            capacity,
            items: VecDeque::new(),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.items[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// `count` uniform indices drawn with replacement.
    pub fn sample_indices<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<usize> {
        assert!(!self.items.is_empty(), "sampling from an empty buffer");
        (0..count).map(|_| rng.gen_range(0..self.items.len())).collect()
    }
}

/// Training-loop constants. The defaults are the reference configuration;
/// any field may be overridden before constructing a [`Trainer`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperparams {
    pub learning_rate: f64,
    /// Discount factor γ, strictly inside (0, 1).
    pub discount: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Synchronize the frozen target copy every this many gradient steps.
    pub target_sync_every: usize,
    pub epsilon_init: f64,
    /// Per-episode multiplicative decay rate d; episode e explores with
    /// ε₀ · (1 − d)^e.
    pub epsilon_decay: f64,
    pub episodes: usize,
    pub horizon: usize,
    pub optimizer: OptimizerKind,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 0.01,
            discount: 0.5,
            batch_size: 32,
            buffer_capacity: 20_000,
            target_sync_every: 200,
            epsilon_init: 0.08,
            epsilon_decay: 0.01,
            episodes: 3000,
            horizon: DEFAULT_HORIZON,
            optimizer: OptimizerKind::Adam,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::Config(format!(
                "discount must lie strictly inside (0, 1), got {}",
                self.discount
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon_init) {
            return Err(Error::Config(format!(
                "initial exploration rate must lie in [0, 1], got {}",
                self.epsilon_init
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon_decay) {
            return Err(Error::Config(format!(
                "exploration decay rate must lie in [0, 1], got {}",
                self.epsilon_decay
            )));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Config(format!(
                "learning rate must be finite and nonnegative, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        if self.target_sync_every == 0 {
            return Err(Error::Config("target sync period must be positive".into()));
        }
        Ok(())
    }
}

/// Exploration rate for a zero-based episode index.
pub fn epsilon_at(hp: &Hyperparams, episode: usize) -> f64 {
    hp.epsilon_init * (1.0 - hp.epsilon_decay).powi(episode as i32)
}

/// ε-greedy selection: a uniform action with probability ε, otherwise the
/// argmax with ties broken toward the lowest index. Consumes one draw for
/// the exploration coin and a second only when exploring.
pub fn select_action<R: Rng>(q_values: &[f64], epsilon: f64, rng: &mut R) -> usize {
    assert!(!q_values.is_empty(), "empty action-value vector");
    assert!((0.0..=1.0).contains(&epsilon), "exploration rate {epsilon}");
    if rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..q_values.len());
    }
    let mut best = 0;
    for (a, &q) in q_values.iter().enumerate().skip(1) {
        if q > q_values[best] {
            best = a;
        }
    }
    best
}

/// Regression target per transition: `y = r + γ · max_a Q_frozen(s', a)`.
pub fn bellman_targets(
    transitions: &[&Transition],
    target: &QModel,
    discount: f64,
) -> Result<Vec<f64>> {
    if transitions.is_empty() {
        return Err(Error::Dimension("empty target batch".into()));
    }
    transitions
        .iter()
        .map(|t| {
            let next_q = target.predict(&t.next_state)?;
            let best = next_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(t.reward + discount * best)
        })
        .collect()
}

/// What happened at one step of an episode.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// One-based step index within the episode.
    pub step: usize,
    pub action: usize,
    /// Screening verdict for the post-action structure (an invalid
    /// manipulation screens as such without touching the structure).
    pub screen: ScreenReason,
    pub reward: f64,
    /// Signature of the post-action structure.
    pub signature: String,
}

/// All step records of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeLog {
    /// One-based episode index.
    pub episode: usize,
    pub steps: Vec<StepRecord>,
}

/// Aggregate counters over a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    /// Episodes in which at least one simulation hit the design-space
    /// maximum reward.
    pub opt_sf: usize,
    /// Distinct screened structures simulated at least once.
    pub uniq_sf: usize,
    /// Distinct simulated structures that met the product specification.
    pub feas_sf: usize,
    /// One-based index of the first optimum-finding episode, if any.
    pub first_opt_episode: Option<usize>,
    pub runtime_s: f64,
}

struct StepOutcome {
    next: FlowsheetState,
    screen: ScreenResult,
    sim: Option<SimResult>,
    transition: Transition,
    record: StepRecord,
}

/// The single environment-step rule shared by training and scripted
/// replays: apply the action (an invalid manipulation leaves the structure
/// unchanged and screens as INVALID_MANIPULATION), screen, and simulate
/// only structures that pass.
fn env_step(
    scenario: &Scenario,
    calibration: &Calibration,
    state: &FlowsheetState,
    action: usize,
    step: usize,
) -> Result<StepOutcome> {
    let state_bits = scenario.encode(state);
    let (next, valid) = scenario.apply(state, action)?;
    let screen = if valid {
        scenario.screen(&next)
    } else {
        ScreenResult::fail(ScreenReason::InvalidManipulation)
    };
    let sim = screen.passed.then(|| hdasim::evaluate(scenario, &next, calibration));
    let reward = hdasim::reward(screen, sim.as_ref(), calibration);
    let transition = Transition {
        state: state_bits,
        action,
        reward,
        next_state: scenario.encode(&next),
    };
    let record = StepRecord {
        step,
        action,
        screen: screen.reason,
        reward,
        signature: scenario.signature(&next),
    };
    Ok(StepOutcome {
        next,
        screen,
        sim,
        transition,
        record,
    })
}

/// Replay a fixed action sequence through the environment, storing every
/// transition, with no model in the loop. Returns the step records.
pub fn scripted_episode(
    scenario: &Scenario,
    calibration: &Calibration,
    actions: &[usize],
    buffer: &mut ReplayBuffer,
) -> Result<Vec<StepRecord>> {
    let mut state = scenario.reset();
    let mut records = Vec::with_capacity(actions.len());
    for (i, &action) in actions.iter().enumerate() {
        let out = env_step(scenario, calibration, &state, action, i + 1)?;
        buffer.push(out.transition);
        records.push(out.record);
        state = out.next;
    }
    Ok(records)
}

/// One seeded training run: model, frozen target copy, optimizer, replay
/// buffer, and metric counters.
pub struct Trainer {
    scenario: Scenario,
    calibration: Calibration,
    hp: Hyperparams,
    model: QModel,
    target: QModel,
    opt: OptimizerState,
    buffer: ReplayBuffer,
    rng: ChaCha8Rng,
    grad_steps: usize,
    episodes_run: usize,
    optimal_reward: f64,
    simulated: BTreeSet<String>,
    feasible: BTreeSet<String>,
    opt_episodes: usize,
    first_opt: Option<usize>,
}

impl Trainer {
    /// The generator must be the one that initialized `model`, so the whole
    /// run consumes a single seeded stream.
    pub fn new(
        scenario: Scenario,
        calibration: Calibration,
        hp: Hyperparams,
        model: QModel,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        hp.validate()?;
        if model.input_dim() != scenario.state_dim() {
            return Err(Error::Dimension(format!(
                "model expects {} inputs but the scenario encodes {} bits",
                model.input_dim(),
                scenario.state_dim()
            )));
        }
        if model.action_count() != scenario.action_count() {
            return Err(Error::Dimension(format!(
                "model predicts {} actions but the scenario has {}",
                model.action_count(),
                scenario.action_count()
            )));
        }
        let scenario = scenario.with_horizon(hp.horizon);
        let optimal_reward = hdasim::evaluate_screened(&scenario, &calibration)
            .iter()
            .map(|(_, sim)| sim.reward)
            .fold(f64::NEG_INFINITY, f64::max);
        let target = model.clone();
        let opt = OptimizerState::new(hp.optimizer, hp.learning_rate, model.param_count());
        let buffer = ReplayBuffer::new(hp.buffer_capacity)?;
        Ok(Trainer {
            scenario,
            calibration,
            hp,
            model,
            target,
            opt,
            buffer,
            rng,
            grad_steps: 0,
            episodes_run: 0,
            optimal_reward,
            simulated: BTreeSet::new(),
            feasible: BTreeSet::new(),
            opt_episodes: 0,
            first_opt: None,
        })
    }

    pub fn model(&self) -> &QModel {
        &self.model
    }

    pub fn target(&self) -> &QModel {
        &self.target
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hp
    }

    /// Best reward over the enumerated design space, the bar for an
    /// optimum-finding episode.
    pub fn optimal_reward(&self) -> f64 {
        self.optimal_reward
    }

    pub fn episodes_run(&self) -> usize {
        self.episodes_run
    }

    /// Run the next episode: T ε-greedy steps, storing every transition
    /// and taking one gradient step per screened-OK step once the buffer
    /// holds a full batch.
    pub fn run_episode(&mut self) -> Result<EpisodeLog> {
        let episode = self.episodes_run + 1;
        let epsilon = epsilon_at(&self.hp, self.episodes_run);
        let mut state = self.scenario.reset();
        let mut steps = Vec::with_capacity(self.hp.horizon);
        let mut found_optimum = false;

        for step in 1..=self.hp.horizon {
            let q = self.model.predict(&self.scenario.encode(&state))?;
            let action = select_action(&q, epsilon, &mut self.rng);
            let out = env_step(&self.scenario, &self.calibration, &state, action, step)?;

            if let Some(sim) = &out.sim {
                let signature = self.scenario.signature(&out.next);
                if sim.spec_met {
                    self.feasible.insert(signature.clone());
                }
                self.simulated.insert(signature);
                if sim.reward == self.optimal_reward {
                    found_optimum = true;
                }
            }
            self.buffer.push(out.transition);

            // A failed screen contributes its transition but no gradient
            // step; training also waits for one full batch of history.
            if out.screen.passed && self.buffer.len() >= self.hp.batch_size {
                self.gradient_step()?;
            }

            steps.push(out.record);
            state = out.next;
        }

        self.episodes_run = episode;
        if found_optimum {
            self.opt_episodes += 1;
            self.first_opt.get_or_insert(episode);
        }
        Ok(EpisodeLog { episode, steps })
    }

    fn gradient_step(&mut self) -> Result<()> {
        let indices = self
            .buffer
            .sample_indices(&mut self.rng, self.hp.batch_size);
        let batch: Vec<&Transition> = indices.iter().map(|&i| self.buffer.get(i)).collect();
        let targets = bellman_targets(&batch, &self.target, self.hp.discount)?;
        let samples: Vec<TrainSample> = batch
            .iter()
            .zip(&targets)
            .map(|(t, &y)| TrainSample {
                state: t.state.clone(),
                action: t.action,
                target: y,
            })
            .collect();
        qnet::train_step(&mut self.model, &mut self.opt, &samples)?;
        self.grad_steps += 1;
        if self.grad_steps % self.hp.target_sync_every == 0 {
            qnet::sync_target(&self.model, &mut self.target)?;
        }
        Ok(())
    }

    /// Run the configured number of episodes and report the counters.
    pub fn train(&mut self) -> Result<(RunMetrics, Vec<EpisodeLog>)> {
        let start = Instant::now();
        let mut logs = Vec::with_capacity(self.hp.episodes);
        for _ in 0..self.hp.episodes {
            logs.push(self.run_episode()?);
        }
        let metrics = RunMetrics {
            opt_sf: self.opt_episodes,
            uniq_sf: self.simulated.len(),
            feas_sf: self.feasible.len(),
            first_opt_episode: self.first_opt,
            runtime_s: start.elapsed().as_secs_f64(),
        };
        Ok((metrics, logs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn tiny_model(scenario: &Scenario, rng: &mut ChaCha8Rng) -> QModel {
        QModel::classical_with_hidden(scenario.state_dim(), 8, scenario.action_count(), rng)
            .unwrap()
    }

    fn transition(reward: f64) -> Transition {
        Transition {
            state: vec![0; 4],
            action: 0,
            reward,
            next_state: vec![1; 4],
        }
    }

    #[test]
    fn greedy_selection_takes_the_argmax_with_low_index_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_action(&[1.0, 3.0, 2.0], 0.0, &mut rng), 1);
        assert_eq!(select_action(&[2.0, 2.0, 0.0], 0.0, &mut rng), 0);
        assert_eq!(select_action(&[-5.0], 0.0, &mut rng), 0);
    }

    #[test]
    fn forced_exploration_is_uniform_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let q = [0.0, 9.0, 0.0, 0.0];
        let mut counts = [0usize; 4];
        let draws = 10_000;
        for _ in 0..draws {
            counts[select_action(&q, 1.0, &mut rng)] += 1;
        }
        // Binomial(10000, 1/4): σ = sqrt(10000 · 3/16) ≈ 37.5.
        for c in counts {
            assert!(
                (c as f64 - 2500.0).abs() <= 3.0 * 37.5,
                "count {c} outside 3σ of uniform"
            );
        }
    }

    #[test]
    fn exploration_decays_geometrically() {
        let hp = Hyperparams::default();
        assert_eq!(epsilon_at(&hp, 0), 0.08);
        assert!((epsilon_at(&hp, 1) - 0.0792).abs() < 1e-15);
        assert!(epsilon_at(&hp, 4000) < 1e-10);
    }

    #[test]
    fn bellman_targets_bootstrap_from_the_frozen_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut zero = QModel::classical_with_hidden(4, 4, 2, &mut rng).unwrap();
        zero.set_params_flat(&vec![0.0; zero.param_count()]).unwrap();
        let a = transition(1.0);
        let b = transition(-10.0);
        let ys = bellman_targets(&[&a, &b], &zero, 0.5).unwrap();
        assert_eq!(ys, vec![1.0, -10.0]);
    }

    #[test]
    fn bellman_targets_add_the_discounted_best_next_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut target = QModel::classical_with_hidden(4, 4, 2, &mut rng).unwrap();
        // Zero weights, output biases (2.0, -1.0): max next value is 2.
        let mut p = vec![0.0; target.param_count()];
        let b2 = 4 * 4 + 4 + 4 * 2;
        p[b2] = 2.0;
        p[b2 + 1] = -1.0;
        target.set_params_flat(&p).unwrap();
        let t = transition(1.0);
        let ys = bellman_targets(&[&t], &target, 0.5).unwrap();
        assert_eq!(ys, vec![2.0]);
    }

    #[test]
    fn buffer_evicts_oldest_first_and_never_exceeds_capacity() {
        let mut buffer = ReplayBuffer::new(3).unwrap();
        for r in 0..5 {
            buffer.push(transition(r as f64));
            assert!(buffer.len() <= 3);
        }
        let rewards: Vec<f64> = buffer.iter().map(|t| t.reward).collect();
        assert_eq!(rewards, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn sampling_is_with_replacement() {
        let mut buffer = ReplayBuffer::new(4).unwrap();
        buffer.push(transition(0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // One stored item can still fill a batch of five.
        assert_eq!(buffer.sample_indices(&mut rng, 5), vec![0; 5]);
    }

    #[test]
    fn hyperparameter_bounds_are_enforced() {
        for (field, hp) in [
            ("discount low", Hyperparams { discount: 0.0, ..Default::default() }),
            ("discount high", Hyperparams { discount: 1.0, ..Default::default() }),
            ("epsilon", Hyperparams { epsilon_init: 1.5, ..Default::default() }),
            ("decay", Hyperparams { epsilon_decay: -0.1, ..Default::default() }),
            ("batch", Hyperparams { batch_size: 0, ..Default::default() }),
            ("sync", Hyperparams { target_sync_every: 0, ..Default::default() }),
        ] {
            assert!(hp.validate().is_err(), "{field} accepted");
        }
        assert!(Hyperparams::default().validate().is_ok());
    }

    #[test]
    fn trainer_rejects_a_model_sized_for_another_scenario() {
        let scenario = Scenario::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let wrong = QModel::classical_with_hidden(20, 8, 5, &mut rng).unwrap();
        let err = Trainer::new(
            scenario,
            Calibration::default(),
            Hyperparams::default(),
            wrong,
            rng,
        );
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn the_scripted_heater_reactor_episode_hits_the_documented_rewards() {
        let scenario = Scenario::new(1).unwrap();
        let calib = Calibration::default();
        let mut buffer = ReplayBuffer::new(100).unwrap();
        // Unit 0 is the reactor and unit 1 the heater, so: append heater,
        // append reactor, then no-ops.
        let records =
            scripted_episode(&scenario, &calib, &[1, 0, 3, 3, 3], &mut buffer).unwrap();
        let rewards: Vec<f64> = records.iter().map(|r| r.reward).collect();
        assert_eq!(rewards[0], -10.0);
        for r in &rewards[1..] {
            assert!((r - 1350.0).abs() < 1e-9, "reward {r}");
        }
        assert_eq!(records[0].screen, ScreenReason::NoReactor);
        assert_eq!(records[0].signature, "H");
        assert!(records[1..].iter().all(|r| r.screen == ScreenReason::Ok));
        assert!(records[1..].iter().all(|r| r.signature == "H-R"));
        assert_eq!(buffer.len(), 5);
        // The stored next-state bits follow the connectivity encoding.
        let heater_only = scenario
            .encode(&scenario.apply(&scenario.reset(), 1).unwrap().0);
        assert_eq!(buffer.get(0).state, vec![0; 12]);
        assert_eq!(buffer.get(0).next_state, heater_only);
        assert_eq!(buffer.get(1).state, heater_only);
    }

    #[test]
    fn zero_episodes_give_zero_counters() {
        let scenario = Scenario::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let model = tiny_model(&scenario, &mut rng);
        let hp = Hyperparams {
            episodes: 0,
            ..Default::default()
        };
        let mut trainer =
            Trainer::new(scenario, Calibration::default(), hp, model, rng).unwrap();
        let (metrics, logs) = trainer.train().unwrap();
        assert!(logs.is_empty());
        assert_eq!(metrics.opt_sf, 0);
        assert_eq!(metrics.uniq_sf, 0);
        assert_eq!(metrics.feas_sf, 0);
        assert_eq!(metrics.first_opt_episode, None);
    }

    #[test]
    fn forced_exploration_covers_the_whole_screened_space() {
        let scenario = Scenario::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let model = tiny_model(&scenario, &mut rng);
        let hp = Hyperparams {
            epsilon_init: 1.0,
            epsilon_decay: 0.0,
            episodes: 80,
            ..Default::default()
        };
        let mut trainer =
            Trainer::new(scenario, Calibration::default(), hp, model, rng).unwrap();
        let (metrics, logs) = trainer.train().unwrap();
        assert_eq!(logs.len(), 80);
        assert_eq!(metrics.uniq_sf, 3);
        assert_eq!(metrics.feas_sf, 1);
        assert!(metrics.opt_sf <= 80);
        assert!(metrics.opt_sf >= 1);
        assert_eq!(
            metrics.first_opt_episode.is_some(),
            metrics.opt_sf > 0
        );
    }

    #[test]
    fn counter_inequalities_hold_on_a_short_run() {
        let scenario = Scenario::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let model = tiny_model(&scenario, &mut rng);
        let hp = Hyperparams {
            epsilon_init: 0.5,
            episodes: 40,
            ..Default::default()
        };
        let mut trainer =
            Trainer::new(scenario, Calibration::default(), hp, model, rng).unwrap();
        let (metrics, _) = trainer.train().unwrap();
        assert!(metrics.opt_sf <= 40);
        assert!(metrics.feas_sf <= metrics.uniq_sf);
        assert!(metrics.uniq_sf <= 11);
    }

    #[test]
    fn the_frozen_copy_only_moves_at_synchronization_points() {
        let scenario = Scenario::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let model = tiny_model(&scenario, &mut rng);
        let hp = Hyperparams {
            episodes: 12,
            target_sync_every: 1_000_000,
            ..Default::default()
        };
        let mut trainer =
            Trainer::new(scenario, Calibration::default(), hp, model, rng).unwrap();
        let frozen = trainer.target().params_flat();
        trainer.train().unwrap();
        // Gradient steps ran (the model moved) but the sync period was
        // never reached, so the target still holds its initial parameters.
        assert_ne!(trainer.model().params_flat(), frozen);
        assert_eq!(trainer.target().params_flat(), frozen);
    }

    #[test]
    fn identical_seeds_reproduce_the_run_bitwise() {
        let build = || {
            let scenario = Scenario::new(1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let model = tiny_model(&scenario, &mut rng);
            let hp = Hyperparams {
                episodes: 30,
                ..Default::default()
            };
            Trainer::new(scenario, Calibration::default(), hp, model, rng).unwrap()
        };
        let (m1, l1) = build().train().unwrap();
        let (m2, l2) = build().train().unwrap();
        assert_eq!(l1, l2);
        assert_eq!(m1.opt_sf, m2.opt_sf);
        assert_eq!(m1.uniq_sf, m2.uniq_sf);
        assert_eq!(m1.feas_sf, m2.feas_sf);
        assert_eq!(m1.first_opt_episode, m2.first_opt_episode);
    }

    #[test]
    fn episode_logs_carry_one_based_contiguous_indices() {
        let scenario = Scenario::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let model = tiny_model(&scenario, &mut rng);
        let hp = Hyperparams {
            episodes: 3,
            horizon: 4,
            ..Default::default()
        };
        let mut trainer =
            Trainer::new(scenario, Calibration::default(), hp, model, rng).unwrap();
        let (_, logs) = trainer.train().unwrap();
        for (i, log) in logs.iter().enumerate() {
            assert_eq!(log.episode, i + 1);
            assert_eq!(log.steps.len(), 4);
            for (j, s) in log.steps.iter().enumerate() {
                assert_eq!(s.step, j + 1);
            }
        }
    }
}

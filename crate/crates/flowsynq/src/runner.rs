//! Experiment plumbing: config files, seeded runs, and report files.
//!
//! A run is described by a small TOML file and/or command-line overrides
//! (flags win field by field), resolved into a fully validated
//! [`RunConfig`] before any output file is touched. One resolved config
//! trains one seeded agent and writes two artifacts into its output
//! directory: `metrics.csv` (one row of summary counters) and
//! `episodes.log` (one `key=value` line per environment step). Batches
//! repeat configs with derived seeds and add an `aggregate.csv` in a
//! runs-then-mean-then-std layout.
//!
//! Everything written is plain text with deterministic formatting, so two
//! runs of the same config and seed produce identical bytes everywhere
//! except the wall-clock runtime column.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::agent::{EpisodeLog, Hyperparams, RunMetrics, Trainer};
use crate::circuits::{
    build_angle_x, build_angle_xyz, build_basis_reupload, min_layers_angle_x,
    min_layers_angle_xyz,
};
use crate::error::{Error, Result};
use crate::flowsheet::{Scenario, UnitKind};
use crate::hdasim::{self, Calibration};
use crate::qnet::{OptimizerKind, QModel};
use crate::statevec;

/// Which approximator family drives a run, under its external token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgentKind {
    Classical,
    V1,
    V2,
    V3,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [AgentKind::Classical, AgentKind::V1, AgentKind::V2, AgentKind::V3];

    pub fn is_quantum(self) -> bool {
        !matches!(self, AgentKind::Classical)
    }

    pub fn token(self) -> &'static str {
        match self {
            AgentKind::Classical => "classical",
            AgentKind::V1 => "v1",
            AgentKind::V2 => "v2",
            AgentKind::V3 => "v3",
        }
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(AgentKind::Classical),
            "v1" => Ok(AgentKind::V1),
            "v2" => Ok(AgentKind::V2),
            "v3" => Ok(AgentKind::V3),
            other => Err(Error::Config(format!(
                "unknown agent {other:?}; expected classical, v1, v2, or v3"
            ))),
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Config-file image before resolution. Every field is optional so files
/// and command-line overlays can each fill any subset; unknown keys are
/// rejected outright.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Option<u8>,
    pub agent: Option<String>,
    pub episodes: Option<usize>,
    pub horizon: Option<usize>,
    pub qubits: Option<usize>,
    pub layers: Option<usize>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub hyperparams: Option<RawHyperparams>,
    pub calibration: Option<RawCalibration>,
    pub screening: Option<RawScreening>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHyperparams {
    pub learning_rate: Option<f64>,
    pub discount: Option<f64>,
    pub batch_size: Option<usize>,
    pub buffer_capacity: Option<usize>,
    pub target_sync_every: Option<usize>,
    pub epsilon_init: Option<f64>,
    pub epsilon_decay: Option<f64>,
    /// `adam` (default) or `sgd`.
    pub optimizer: Option<String>,
}

/// Optional overrides for the process model; unset fields keep the
/// calibrated defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCalibration {
    pub heater_outlet_k: Option<f64>,
    pub cooler_outlet_k: Option<f64>,
    pub reactor_min_k: Option<f64>,
    pub reactor_max_k: Option<f64>,
    pub reactor_conversion: Option<f64>,
    pub full_vapor_min_k: Option<f64>,
    pub partial_vapor_min_k: Option<f64>,
    pub partial_benzene_vapor: Option<f64>,
    pub partial_toluene_vapor: Option<f64>,
    pub cold_benzene_vapor: Option<f64>,
    pub cold_toluene_vapor: Option<f64>,
    pub purity_spec: Option<f64>,
    pub min_product_flow: Option<f64>,
    pub reward_scale: Option<f64>,
    pub screen_penalty: Option<f64>,
    pub off_spec_reward: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScreening {
    /// Replaces the default forbidden-adjacency list when present, e.g.
    /// `forbidden_adjacent = [["heater", "cooler"]]`. Pairs are unordered.
    pub forbidden_adjacent: Option<Vec<(String, String)>>,
}

impl RawConfig {
    /// Parse a TOML config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))
    }

    /// Field-by-field overlay; `over` wins wherever it is set.
    pub fn merged(mut self, over: &RawConfig) -> RawConfig {
        fn pick<T: Clone>(base: &mut Option<T>, over: &Option<T>) {
            if over.is_some() {
                *base = over.clone();
            }
        }
        pick(&mut self.scenario, &over.scenario);
        pick(&mut self.agent, &over.agent);
        pick(&mut self.episodes, &over.episodes);
        pick(&mut self.horizon, &over.horizon);
        pick(&mut self.qubits, &over.qubits);
        pick(&mut self.layers, &over.layers);
        pick(&mut self.preset, &over.preset);
        pick(&mut self.seed, &over.seed);
        pick(&mut self.out_dir, &over.out_dir);
        pick(&mut self.hyperparams, &over.hyperparams);
        pick(&mut self.calibration, &over.calibration);
        pick(&mut self.screening, &over.screening);
        self
    }
}

/// Fully resolved and validated run description.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub agent: AgentKind,
    /// Register width; `None` for the classical agent.
    pub qubits: Option<usize>,
    /// Circuit depth; `None` for the classical agent.
    pub layers: Option<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub hp: Hyperparams,
    pub calibration: Calibration,
}

fn apply_calibration(raw: &RawCalibration, calib: &mut Calibration) {
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = raw.$field { calib.$field = v; })*
        };
    }
    set!(
        heater_outlet_k,
        cooler_outlet_k,
        reactor_min_k,
        reactor_max_k,
        reactor_conversion,
        full_vapor_min_k,
        partial_vapor_min_k,
        partial_benzene_vapor,
        partial_toluene_vapor,
        cold_benzene_vapor,
        cold_toluene_vapor,
        purity_spec,
        min_product_flow,
        reward_scale,
        screen_penalty,
        off_spec_reward
    );
}

/// Resolve a raw config: fill defaults, fix the architecture shape, and
/// reject anything inconsistent or over the register capacity before any
/// output file exists.
pub fn resolve(raw: &RawConfig) -> Result<RunConfig> {
    let scenario_id = raw
        .scenario
        .ok_or_else(|| Error::Config("missing required key: scenario".into()))?;
    let agent: AgentKind = raw
        .agent
        .as_deref()
        .ok_or_else(|| Error::Config("missing required key: agent".into()))?
        .parse()?;

    let mut scenario = Scenario::new(scenario_id)?;
    if let Some(screening) = &raw.screening {
        if let Some(pairs) = &screening.forbidden_adjacent {
            let parsed: Vec<(UnitKind, UnitKind)> = pairs
                .iter()
                .map(|(a, b)| Ok((a.parse::<UnitKind>()?, b.parse::<UnitKind>()?)))
                .collect::<Result<_>>()?;
            scenario = scenario.with_forbidden(parsed);
        }
    }

    let mut hp = Hyperparams::default();
    if let Some(rh) = &raw.hyperparams {
        if let Some(v) = rh.learning_rate {
            hp.learning_rate = v;
        }
        if let Some(v) = rh.discount {
            hp.discount = v;
        }
        if let Some(v) = rh.batch_size {
            hp.batch_size = v;
        }
        if let Some(v) = rh.buffer_capacity {
            hp.buffer_capacity = v;
        }
        if let Some(v) = rh.target_sync_every {
            hp.target_sync_every = v;
        }
        if let Some(v) = rh.epsilon_init {
            hp.epsilon_init = v;
        }
        if let Some(v) = rh.epsilon_decay {
            hp.epsilon_decay = v;
        }
        if let Some(name) = &rh.optimizer {
            hp.optimizer = match name.to_ascii_lowercase().as_str() {
                "adam" => OptimizerKind::Adam,
                "sgd" => OptimizerKind::Sgd,
                other => {
                    return Err(Error::Config(format!(
                        "unknown optimizer {other:?}; expected adam or sgd"
                    )))
                }
            };
        }
    }
    if let Some(m) = raw.episodes {
        hp.episodes = m;
    }
    if let Some(t) = raw.horizon {
        hp.horizon = t;
    }
    hp.validate()?;
    scenario = scenario.with_horizon(hp.horizon);

    let mut calibration = Calibration::default();
    if let Some(rc) = &raw.calibration {
        apply_calibration(rc, &mut calibration);
    }

    match &raw.preset {
        None => {}
        Some(p) if p == "pb" => {
            if raw.layers.is_some() {
                return Err(Error::Config(
                    "preset pb fixes the layer count; drop the explicit layers override".into(),
                ));
            }
            if !matches!(agent, AgentKind::V2 | AgentKind::V3) {
                return Err(Error::Config(format!(
                    "preset pb applies only to agents v2 and v3, not {agent}"
                )));
            }
        }
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; the only preset is pb"
            )));
        }
    }

    let (qubits, layers) = match agent {
        AgentKind::Classical => {
            if raw.qubits.is_some() || raw.layers.is_some() {
                return Err(Error::Config(
                    "qubits/layers apply only to quantum agents".into(),
                ));
            }
            (None, None)
        }
        AgentKind::V1 => {
            // Basis encoding pins one qubit per input bit.
            let required = scenario.state_dim();
            if let Some(q) = raw.qubits {
                if q != required {
                    return Err(Error::Config(format!(
                        "agent v1 fixes the register to the {required}-bit input \
                         encoding; got qubits = {q}"
                    )));
                }
            }
            (Some(required), Some(raw.layers.unwrap_or(1)))
        }
        AgentKind::V2 => {
            let qubits = raw.qubits.unwrap_or_else(|| scenario.action_count());
            let layers = match &raw.preset {
                Some(_) => 30,
                None => match raw.layers {
                    Some(l) => l,
                    None => min_layers_angle_x(scenario.state_dim(), qubits)?,
                },
            };
            (Some(qubits), Some(layers))
        }
        AgentKind::V3 => {
            let qubits = raw.qubits.unwrap_or_else(|| scenario.action_count());
            let layers = match &raw.preset {
                Some(_) => 20,
                None => match raw.layers {
                    Some(l) => l,
                    None => min_layers_angle_xyz(scenario.state_dim(), qubits)?,
                },
            };
            (Some(qubits), Some(layers))
        }
    };

    if let Some(q) = qubits {
        let cap = statevec::qubit_cap();
        if q > cap {
            return Err(Error::Capacity {
                requested: q,
                cap,
                env: statevec::QUBIT_CAP_ENV,
            });
        }
    }

    Ok(RunConfig {
        scenario,
        agent,
        qubits,
        layers,
        seed: raw.seed.unwrap_or(1),
        out_dir: raw.out_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
        hp,
        calibration,
    })
}

/// Build the configured model, drawing its initial parameters from `rng`.
pub fn build_model(config: &RunConfig, rng: &mut ChaCha8Rng) -> Result<QModel> {
    let n_x = config.scenario.state_dim();
    let n_a = config.scenario.action_count();
    match config.agent {
        AgentKind::Classical => QModel::classical(n_x, n_a, rng),
        quantum => {
            let qubits = config.qubits.expect("resolved quantum config");
            let layers = config.layers.expect("resolved quantum config");
            let spec = match quantum {
                AgentKind::V1 => build_basis_reupload(n_x, n_a, layers)?,
                AgentKind::V2 => build_angle_x(n_x, n_a, qubits, layers)?,
                AgentKind::V3 => build_angle_xyz(n_x, n_a, qubits, layers)?,
                AgentKind::Classical => unreachable!(),
            };
            Ok(QModel::quantum(spec, rng))
        }
    }
}

/// Outcome of one completed run, as reported in `metrics.csv`.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub run_id: String,
    pub agent: AgentKind,
    pub scenario_id: u8,
    pub seed: u64,
    pub param_count: usize,
    pub metrics: RunMetrics,
}

/// Train one run without touching the filesystem.
pub fn execute(config: &RunConfig, run_id: &str) -> Result<(RunReport, Vec<EpisodeLog>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let model = build_model(config, &mut rng)?;
    let param_count = model.param_count();
    let mut trainer = Trainer::new(
        config.scenario.clone(),
        config.calibration,
        config.hp,
        model,
        rng,
    )?;
    let (metrics, logs) = trainer.train()?;
    let report = RunReport {
        run_id: run_id.to_string(),
        agent: config.agent,
        scenario_id: config.scenario.id(),
        seed: config.seed,
        param_count,
        metrics,
    };
    Ok((report, logs))
}

pub const METRICS_HEADER: &str =
    "run_id,agent,scenario,seed,param_count,opt_sf,uniq_sf,feas_sf,first_opt_episode,runtime_s";

fn metrics_row(r: &RunReport) -> String {
    let first_opt = r
        .metrics
        .first_opt_episode
        .map_or(String::new(), |e| e.to_string());
    format!(
        "{},{},{},{},{},{},{},{},{},{:.3}",
        r.run_id,
        r.agent,
        r.scenario_id,
        r.seed,
        r.param_count,
        r.metrics.opt_sf,
        r.metrics.uniq_sf,
        r.metrics.feas_sf,
        first_opt,
        r.metrics.runtime_s
    )
}

/// One `key=value` line per step; rewards keep full float precision so
/// every metric can be recomputed from the log alone.
fn episode_lines(logs: &[EpisodeLog]) -> String {
    let mut text = String::new();
    for log in logs {
        for s in &log.steps {
            text.push_str(&format!(
                "episode={} step={} action={} screen={} reward={} sig={}\n",
                log.episode, s.step, s.action, s.screen, s.reward, s.signature
            ));
        }
    }
    text
}

/// Train one config and write `metrics.csv` and `episodes.log` into its
/// output directory. Nothing is written if the run fails.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let (report, logs) = execute(config, "r000")?;
    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(
        config.out_dir.join("metrics.csv"),
        format!("{METRICS_HEADER}\n{}\n", metrics_row(&report)),
    )?;
    std::fs::write(config.out_dir.join("episodes.log"), episode_lines(&logs))?;
    Ok(report)
}

fn mean_and_sample_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Repeat each config `repeat` times with seeds `base, base+1, ...`, and
/// write per-run metrics and logs plus `aggregate.csv` (per-run rows, then
/// a mean row and a sample-standard-deviation row per config). Failed runs
/// are reported on stderr and excluded from the aggregate.
pub fn batch(configs: &[RunConfig], repeat: usize, out_dir: &Path) -> Result<Vec<RunReport>> {
    if configs.is_empty() {
        return Err(Error::Config("batch needs at least one config".into()));
    }
    if repeat == 0 {
        return Err(Error::Config("repeat must be positive".into()));
    }
    if repeat == 1 {
        eprintln!("warning: single-run batch, deviations reported as 0");
    }

    let mut reports = Vec::new();
    let mut metrics_text = format!("{METRICS_HEADER}\n");
    let mut aggregate_text =
        String::from("agent,scenario,run,opt_sf,uniq_sf,feas_sf,first_opt_episode,runtime_s\n");
    std::fs::create_dir_all(out_dir)?;

    for (ci, base) in configs.iter().enumerate() {
        let mut block = Vec::new();
        for rep in 0..repeat {
            let mut config = base.clone();
            config.seed = base.seed.wrapping_add(rep as u64);
            let run_id = format!("c{ci:02}r{rep:03}");
            match execute(&config, &run_id) {
                Ok((report, logs)) => {
                    std::fs::write(
                        out_dir.join(format!("episodes_{run_id}.log")),
                        episode_lines(&logs),
                    )?;
                    metrics_text.push_str(&metrics_row(&report));
                    metrics_text.push('\n');
                    block.push(report);
                }
                Err(e) => {
                    eprintln!("warning: run {run_id} failed and is excluded: {e}");
                }
            }
        }

        for r in &block {
            let first_opt = r
                .metrics
                .first_opt_episode
                .map_or(String::new(), |e| e.to_string());
            aggregate_text.push_str(&format!(
                "{},{},{},{},{},{},{},{:.3}\n",
                r.agent,
                r.scenario_id,
                r.run_id,
                r.metrics.opt_sf,
                r.metrics.uniq_sf,
                r.metrics.feas_sf,
                first_opt,
                r.metrics.runtime_s
            ));
        }
        if block.is_empty() {
            eprintln!(
                "warning: every run of config {ci} failed, no aggregate for it"
            );
            continue;
        }

        let column = |f: &dyn Fn(&RunReport) -> f64| -> Vec<f64> {
            block.iter().map(|r| f(r)).collect()
        };
        let opt = mean_and_sample_std(&column(&|r| r.metrics.opt_sf as f64));
        let uniq = mean_and_sample_std(&column(&|r| r.metrics.uniq_sf as f64));
        let feas = mean_and_sample_std(&column(&|r| r.metrics.feas_sf as f64));
        let runtime = mean_and_sample_std(&column(&|r| r.metrics.runtime_s));
        // First-find statistics cover only the runs that found the optimum.
        let firsts: Vec<f64> = block
            .iter()
            .filter_map(|r| r.metrics.first_opt_episode.map(|e| e as f64))
            .collect();
        let first = if firsts.is_empty() {
            (String::new(), String::new())
        } else {
            let (m, s) = mean_and_sample_std(&firsts);
            (format!("{m:.3}"), format!("{s:.3}"))
        };
        let (agent, scenario_id) = (block[0].agent, block[0].scenario_id);
        aggregate_text.push_str(&format!(
            "{agent},{scenario_id},mean,{:.3},{:.3},{:.3},{},{:.3}\n",
            opt.0, uniq.0, feas.0, first.0, runtime.0
        ));
        aggregate_text.push_str(&format!(
            "{agent},{scenario_id},std,{:.3},{:.3},{:.3},{},{:.3}\n",
            opt.1, uniq.1, feas.1, first.1, runtime.1
        ));
        reports.extend(block);
    }

    std::fs::write(out_dir.join("metrics.csv"), metrics_text)?;
    std::fs::write(out_dir.join("aggregate.csv"), aggregate_text)?;
    Ok(reports)
}

/// One enumerated design point in the oracle report.
#[derive(Clone, Debug)]
pub struct OracleRow {
    pub signature: String,
    pub flow: f64,
    pub purity: f64,
    pub spec_met: bool,
    pub reward: f64,
}

/// Evaluate every screened structure, best reward first (signature breaks
/// ties). Pure: depends only on the scenario and calibration.
pub fn oracle_report(scenario: &Scenario, calibration: &Calibration) -> Vec<OracleRow> {
    let mut rows: Vec<OracleRow> = hdasim::evaluate_screened(scenario, calibration)
        .iter()
        .map(|(state, sim)| OracleRow {
            signature: scenario.signature(state),
            flow: sim.benzene_product_flow,
            purity: sim.product_purity,
            spec_met: sim.spec_met,
            reward: sim.reward,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.reward
            .partial_cmp(&a.reward)
            .expect("finite rewards")
            .then_with(|| a.signature.cmp(&b.signature))
    });
    rows
}

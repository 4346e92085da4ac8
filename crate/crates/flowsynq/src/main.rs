use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flowsynq::flowsheet::Scenario;
use flowsynq::hdasim::Calibration;
use flowsynq::runner::{self, RawConfig, RunReport};
use flowsynq::Result;

#[derive(Parser)]
#[command(
    name = "flowsynq",
    version,
    about = "Classical and quantum Q-learning workbench for serial flowsheet synthesis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one seeded agent and write metrics.csv and episodes.log.
    Run(RunArgs),
    /// Repeat configurations with derived seeds and aggregate the results.
    Batch(BatchArgs),
    /// Enumerate and evaluate every structure that passes screening.
    Oracle(OracleArgs),
}

/// Flags shared by `run` and `batch`; each overrides the matching config
/// file key.
#[derive(Args)]
struct Overrides {
    /// Problem size: 1, 2, or 3.
    #[arg(long)]
    scenario: Option<u8>,
    /// Approximator: classical, v1, v2, or v3.
    #[arg(long)]
    agent: Option<String>,
    /// Training episodes.
    #[arg(long)]
    episodes: Option<usize>,
    /// Environment steps per episode.
    #[arg(long)]
    horizon: Option<usize>,
    /// Base random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Register width (quantum agents only).
    #[arg(long)]
    qubits: Option<usize>,
    /// Circuit depth (quantum agents only).
    #[arg(long)]
    layers: Option<usize>,
    /// Named preset; `pb` selects the deep v2/v3 circuits.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long = "out")]
    out_dir: Option<PathBuf>,
}

impl Overrides {
    fn to_raw(&self) -> RawConfig {
        RawConfig {
            scenario: self.scenario,
            agent: self.agent.clone(),
            episodes: self.episodes,
            horizon: self.horizon,
            qubits: self.qubits,
            layers: self.layers,
            preset: self.preset.clone(),
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct BatchArgs {
    /// TOML config files, one per condition (repeatable).
    #[arg(long = "config")]
    configs: Vec<PathBuf>,
    /// Seeded repetitions per config.
    #[arg(long, default_value_t = 10)]
    repeat: usize,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct OracleArgs {
    /// Problem size: 1, 2, or 3.
    #[arg(long)]
    scenario: u8,
}

/// Write to stdout, treating a closed pipe as success so `head`-style
/// consumers do not turn a report into a panic.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(Into::into),
    }
}

fn report_line(r: &RunReport) -> String {
    let first_opt = r
        .metrics
        .first_opt_episode
        .map_or("-".to_string(), |e| e.to_string());
    format!(
        "{} agent={} scenario={} seed={} params={} opt_sf={} uniq_sf={} feas_sf={} \
         first_opt={} runtime_s={:.3}\n",
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

fn cmd_run(args: &RunArgs) -> Result<()> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_path(path)?,
        None => RawConfig::default(),
    };
    raw = raw.merged(&args.overrides.to_raw());
    let config = runner::resolve(&raw)?;
    let report = runner::run(&config)?;
    emit(&report_line(&report))?;
    emit(&format!("wrote {}\n", config.out_dir.display()))
}

fn cmd_batch(args: &BatchArgs) -> Result<()> {
    let overlay = args.overrides.to_raw();
    let raws: Vec<RawConfig> = if args.configs.is_empty() {
        vec![RawConfig::default()]
    } else {
        args.configs
            .iter()
            .map(|p| RawConfig::from_path(p))
            .collect::<Result<_>>()?
    };
    let configs: Vec<runner::RunConfig> = raws
        .into_iter()
        .map(|r| runner::resolve(&r.merged(&overlay)))
        .collect::<Result<_>>()?;
    let out_dir = configs[0].out_dir.clone();
    let reports = runner::batch(&configs, args.repeat, &out_dir)?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&report_line(r));
    }
    text.push_str(&format!("wrote {}\n", out_dir.display()));
    emit(&text)
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let scenario = Scenario::new(args.scenario)?;
    let rows = runner::oracle_report(&scenario, &Calibration::default());
    let mut text = format!(
        "{:<10} {:>10} {:>8} {:>5} {:>12}\n",
        "signature", "flow", "purity", "spec", "reward"
    );
    for row in &rows {
        text.push_str(&format!(
            "{:<10} {:>10.6} {:>8.6} {:>5} {:>12.6}\n",
            row.signature,
            row.flow,
            row.purity,
            if row.spec_met { "yes" } else { "no" },
            row.reward
        ));
    }
    let feasible = rows.iter().filter(|r| r.spec_met).count();
    text.push_str(&format!(
        "{} screened structures, {} feasible\n",
        rows.len(),
        feasible
    ));
    emit(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Batch(args) => cmd_batch(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! Run a small batch: two agent kinds, three derived seeds each.
//!
//! Run i of a config uses seed base + i, so a batch is as reproducible
//! as a single run. Per-run logs, a metrics table, and a mean/std
//! aggregate all land in one output directory.
//!
//! Run with: cargo run --release --example batch_experiments

use flowsynq::runner::{batch, resolve, RawConfig};
use flowsynq::Result;

fn main() -> Result<()> {
    let base = RawConfig {
        scenario: Some(1),
        agent: Some("classical".into()),
        episodes: Some(150),
        seed: Some(11),
        ..RawConfig::default()
    };
    let dense = resolve(&base)?;
    let circuit = resolve(&RawConfig {
        agent: Some("v3".into()),
        ..base.clone()
    })?;

    let out = std::env::temp_dir().join("flowsynq_batch_example");
    let reports = batch(&[dense, circuit], 3, &out)?;

    for r in &reports {
        println!(
            "{}  agent={:<9} seed={}  opt_sf={:<3} uniq_sf={}  first_opt={:?}",
            r.run_id, r.agent.token(), r.seed, r.metrics.opt_sf, r.metrics.uniq_sf,
            r.metrics.first_opt_episode
        );
    }

    println!("\naggregate.csv:");
    print!("{}", std::fs::read_to_string(out.join("aggregate.csv"))?);
    println!("\nfiles in {}:", out.display());
    let mut names: Vec<String> = std::fs::read_dir(&out)?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in names {
        println!("  {name}");
    }
    Ok(())
}

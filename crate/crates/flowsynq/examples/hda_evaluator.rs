//! Follow the feed stream through units by hand, then score whole trains.
//!
//! Run with: cargo run --example hda_evaluator

use flowsynq::flowsheet::{Scenario, UnitKind};
use flowsynq::hdasim::{evaluate, mixed_feed, unit_step, Calibration, Stream};
use flowsynq::Result;

fn show(label: &str, s: &Stream) {
    println!(
        "{label:<12} {:6.1} K  h2 {:.3}  toluene {:.3}  benzene {:.3}  ch4 {:.3}",
        s.temperature_k, s.h2, s.toluene, s.benzene, s.ch4
    );
}

fn main() -> Result<()> {
    let calib = Calibration::default();

    // Unit by unit: the cold feed reacts only after heating into the
    // reactor's operating window.
    let feed = mixed_feed();
    show("feed", &feed);
    println!("reactor on the cold feed converts nothing:");
    show("  reactor", &unit_step(&feed, UnitKind::Reactor, &calib).unwrap());
    let hot = unit_step(&feed, UnitKind::Heater, &calib).unwrap();
    show("heater", &hot);
    show("hot reactor", &unit_step(&hot, UnitKind::Reactor, &calib).unwrap());

    // The heat exchanger would need a second hot stream, which a serial
    // train cannot supply; any train containing one fails to converge.
    assert!(unit_step(&feed, UnitKind::HeatExchanger, &calib).is_none());

    // Whole trains, as the agent sees them.
    let scenario = Scenario::new(3)?;
    for train in [
        vec![UnitKind::Heater, UnitKind::Reactor],
        vec![UnitKind::Heater, UnitKind::Reactor, UnitKind::Cooler],
        vec![UnitKind::Reactor, UnitKind::Heater],
        vec![UnitKind::Heater, UnitKind::HeatExchanger, UnitKind::Reactor],
    ] {
        let state = scenario.train_of(&train)?;
        let sim = evaluate(&scenario, &state, &calib);
        println!(
            "{:<8} converged {:<5} flow {:.4}  purity {:.4}  spec {:<5} reward {:.3}",
            scenario.signature(&state),
            sim.converged,
            sim.benzene_product_flow,
            sim.product_purity,
            sim.spec_met,
            sim.reward
        );
    }

    // Calibration is data, not code: tightening the purity specification
    // moves the feasibility line without touching the evaluator.
    let strict = Calibration {
        purity_spec: 0.9,
        ..Calibration::default()
    };
    let hr = scenario.train_of(&[UnitKind::Heater, UnitKind::Reactor])?;
    let sim = evaluate(&scenario, &hr, &strict);
    println!(
        "H-R under a 0.9 purity spec: purity {:.2}, on spec: {}",
        sim.product_purity, sim.spec_met
    );
    Ok(())
}

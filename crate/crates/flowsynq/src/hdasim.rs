//! Toy steady-state process evaluator for screened trains.
//!
//! The chemistry is a single hydrodealkylation step, toluene + H2 ->
//! benzene + CH4, run over a four-component stream (H2, toluene, CH4,
//! benzene) in mol/s. Unit behaviour is deliberately coarse: heaters and
//! coolers pin the stream temperature to fixed outlet setpoints, the
//! reactor converts a fixed fraction of the limiting reagent inside its
//! operating window and passes the stream through untouched outside it, and
//! the stand-alone heat exchanger never converges (it has no second side in
//! a serial train). All constants live in [`Calibration`] and can be
//! overridden from a run configuration.
//!
//! A structure's merit is read off a flash-style vapor split of the final
//! stream: light components leave entirely in the vapor, the two aromatics
//! leave according to temperature-banded vapor fractions. The product is
//! judged on benzene purity among the aromatics and on benzene flow, and
//! the instantaneous reward is proportional to `flow * purity` when both
//! meet their specification.

use crate::flowsheet::{FlowsheetState, Scenario, ScreenResult, UnitKind};

/// Process stream state between units. Flows are mol/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stream {
    pub temperature_k: f64,
    pub pressure_kpa: f64,
    pub h2: f64,
    pub toluene: f64,
    pub ch4: f64,
    pub benzene: f64,
}

/// Every tunable constant of the evaluator, with the shipped calibration as
/// the default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    /// Heater outlet temperature, K.
    pub heater_outlet_k: f64,
    /// Cooler outlet temperature, K.
    pub cooler_outlet_k: f64,
    /// Reactor operating window, K (inclusive on both ends).
    pub reactor_min_k: f64,
    pub reactor_max_k: f64,
    /// Fraction of the limiting reagent converted inside the window.
    pub reactor_conversion: f64,
    /// At or above this temperature both aromatics leave fully in the vapor.
    pub full_vapor_min_k: f64,
    /// At or above this temperature (but below the full band) the partial
    /// vapor fractions apply; below it the cold fractions apply.
    pub partial_vapor_min_k: f64,
    pub partial_benzene_vapor: f64,
    pub partial_toluene_vapor: f64,
    pub cold_benzene_vapor: f64,
    pub cold_toluene_vapor: f64,
    /// Benzene fraction of the aromatics that the product must exceed.
    pub purity_spec: f64,
    /// Smallest acceptable benzene product flow, mol/s.
    pub min_product_flow: f64,
    /// Reward per unit of `flow * purity` on specification.
    pub reward_scale: f64,
    /// Reward for a structure that fails screening or an invalid move.
    pub screen_penalty: f64,
    /// Reward for a screened structure that misses specification.
    pub off_spec_reward: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            heater_outlet_k: 550.0,
            cooler_outlet_k: 400.0,
            reactor_min_k: 500.0,
            reactor_max_k: 600.0,
            reactor_conversion: 0.75,
            full_vapor_min_k: 450.0,
            partial_vapor_min_k: 350.0,
            partial_benzene_vapor: 0.70,
            partial_toluene_vapor: 0.10,
            cold_benzene_vapor: 0.02,
            cold_toluene_vapor: 0.02,
            purity_spec: 0.55,
            min_product_flow: 0.1,
            reward_scale: 8000.0,
            screen_penalty: -10.0,
            off_spec_reward: 0.0,
        }
    }
}

/// Outcome of simulating one screened structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimResult {
    /// False when a unit failed to converge; flows and purity are zero then.
    pub converged: bool,
    /// Benzene flow in the vapor product, mol/s.
    pub benzene_product_flow: f64,
    /// Benzene fraction of the aromatics in the vapor product.
    pub product_purity: f64,
    /// Purity and flow specifications both met.
    pub spec_met: bool,
    /// Instantaneous reward of this structure.
    pub reward: f64,
}

impl SimResult {
    fn non_convergent() -> Self {
        SimResult {
            converged: false,
            benzene_product_flow: 0.0,
            product_purity: 0.0,
            spec_met: false,
            reward: 0.0,
        }
    }
}

/// The two plant feeds already mixed into the single head stream: a vapor
/// make-up of 0.30 H2 with 0.02 CH4 and a liquid 0.30 toluene line, both at
/// 303.2 K and 350 kPa.
pub fn mixed_feed() -> Stream {
    Stream {
        temperature_k: 303.2,
        pressure_kpa: 350.0,
        h2: 0.30,
        toluene: 0.30,
        ch4: 0.02,
        benzene: 0.0,
    }
}

/// Propagate a stream through one unit. `None` means the unit failed to
/// converge and the whole structure evaluation is abandoned.
pub fn unit_step(stream: &Stream, unit: UnitKind, calib: &Calibration) -> Option<Stream> {
    let mut out = *stream;
    match unit {
        UnitKind::Heater => {
            out.temperature_k = calib.heater_outlet_k;
        }
        UnitKind::Cooler => {
            out.temperature_k = calib.cooler_outlet_k;
        }
        UnitKind::HeatExchanger => return None,
        UnitKind::Reactor => {
            let in_window = stream.temperature_k >= calib.reactor_min_k
                && stream.temperature_k <= calib.reactor_max_k;
            if in_window && stream.h2 > 0.0 && stream.toluene > 0.0 {
                let delta = calib.reactor_conversion * stream.toluene.min(stream.h2);
                out.toluene -= delta;
                out.h2 -= delta;
                out.benzene += delta;
                out.ch4 += delta;
            }
        }
    }
    Some(out)
}

/// Flash-style vapor split of a stream at its own temperature: H2 and CH4
/// leave entirely, the aromatics leave by temperature-banded fractions.
pub fn vapor_product(stream: &Stream, calib: &Calibration) -> Stream {
    let (bf, tf) = if stream.temperature_k >= calib.full_vapor_min_k {
        (1.0, 1.0)
    } else if stream.temperature_k >= calib.partial_vapor_min_k {
        (calib.partial_benzene_vapor, calib.partial_toluene_vapor)
    } else {
        (calib.cold_benzene_vapor, calib.cold_toluene_vapor)
    };
    let mut out = *stream;
    out.benzene *= bf;
    out.toluene *= tf;
    out
}

/// Simulate a structure end to end and judge its vapor product.
pub fn evaluate(scenario: &Scenario, state: &FlowsheetState, calib: &Calibration) -> SimResult {
    let mut stream = mixed_feed();
    for kind in scenario.kinds(state) {
        match unit_step(&stream, kind, calib) {
            Some(next) => stream = next,
            None => return SimResult::non_convergent(),
        }
    }
    let product = vapor_product(&stream, calib);
    let aromatics = product.benzene + product.toluene;
    let purity = if aromatics > 0.0 {
        product.benzene / aromatics
    } else {
        0.0
    };
    let flow = product.benzene;
    let spec_met = purity > calib.purity_spec && flow >= calib.min_product_flow;
    let reward = if spec_met {
        calib.reward_scale * flow * purity
    } else {
        0.0
    };
    SimResult {
        converged: true,
        benzene_product_flow: flow,
        product_purity: purity,
        spec_met,
        reward,
    }
}

/// Reward tiers for one manipulation step: the screening penalty for a
/// failed screen or invalid move, the off-spec reward for a screened
/// structure that misses specification, the scaled product value otherwise.
pub fn reward(screen: ScreenResult, sim: Option<&SimResult>, calib: &Calibration) -> f64 {
    if !screen.passed {
        return calib.screen_penalty;
    }
    match sim {
        Some(s) if s.spec_met => s.reward,
        _ => calib.off_spec_reward,
    }
}

/// Convenience for reports: evaluate every screened structure of a scenario.
pub fn evaluate_screened(scenario: &Scenario, calib: &Calibration) -> Vec<(FlowsheetState, SimResult)> {
    scenario
        .enumerate_screened()
        .into_iter()
        .map(|state| {
            let sim = evaluate(scenario, &state, calib);
            (state, sim)
        })
        .collect()
}

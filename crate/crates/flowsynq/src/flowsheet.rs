//! Serial flowsheet structures as a small Markov decision process.
//!
//! A design state is an ordered train of distinct candidate units. Two feed
//! lines always enter the head of the train and the last unit discharges to
//! the product take-off, so structure is fully described by the unit order.
//! Actions either append one candidate unit, remove the tail unit, or leave
//! the train alone; appending a unit twice or removing from an empty train is
//! an invalid manipulation that leaves the state unchanged.
//!
//! Before any simulation a structure passes through cheap screening rules:
//! non-empty, contains a reactor, and no adjacent unit pair from the
//! forbidden list (a heater directly next to a cooler by default). Screening
//! failures are final; only screened structures are worth simulating.

use itertools::Itertools;

use crate::error::{Error, Result};

/// Feed lines entering the head unit of every train.
pub const FEED_COUNT: usize = 2;
/// Product take-offs leaving the tail unit.
pub const PRODUCT_COUNT: usize = 1;
/// Default number of manipulations an episode may try.
pub const DEFAULT_HORIZON: usize = 8;

/// Process unit types a scenario can offer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitKind {
    Reactor,
    Heater,
    Cooler,
    HeatExchanger,
}

impl UnitKind {
    /// One-letter code used in structure signatures.
    pub fn code(self) -> char {
        match self {
            UnitKind::Reactor => 'R',
            UnitKind::Heater => 'H',
            UnitKind::Cooler => 'C',
            UnitKind::HeatExchanger => 'X',
        }
    }
}

impl std::str::FromStr for UnitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reactor" => Ok(UnitKind::Reactor),
            "heater" => Ok(UnitKind::Heater),
            "cooler" => Ok(UnitKind::Cooler),
            "heat_exchanger" => Ok(UnitKind::HeatExchanger),
            other => Err(Error::Config(format!(
                "unknown unit kind {other:?}, expected reactor, heater, cooler \
                 or heat_exchanger"
            ))),
        }
    }
}

impl std::fmt::Display for UnitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            UnitKind::Reactor => "reactor",
            UnitKind::Heater => "heater",
            UnitKind::Cooler => "cooler",
            UnitKind::HeatExchanger => "heat_exchanger",
        };
        f.write_str(name)
    }
}

/// Why a structure passed or failed screening.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScreenReason {
    Ok,
    EmptyTrain,
    NoReactor,
    ForbiddenAdjacency,
    /// The manipulation itself was rejected; the structure was not screened.
    InvalidManipulation,
}

impl std::fmt::Display for ScreenReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ScreenReason::Ok => "OK",
            ScreenReason::EmptyTrain => "EMPTY_TRAIN",
            ScreenReason::NoReactor => "NO_REACTOR",
            ScreenReason::ForbiddenAdjacency => "FORBIDDEN_ADJACENCY",
            ScreenReason::InvalidManipulation => "INVALID_MANIPULATION",
        };
        f.write_str(name)
    }
}

/// Screening verdict; `passed` holds exactly when the reason is [`ScreenReason::Ok`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScreenResult {
    pub passed: bool,
    pub reason: ScreenReason,
}

impl ScreenResult {
    pub fn ok() -> Self {
        ScreenResult {
            passed: true,
            reason: ScreenReason::Ok,
        }
    }

    pub fn fail(reason: ScreenReason) -> Self {
        debug_assert!(reason != ScreenReason::Ok);
        ScreenResult {
            passed: false,
            reason,
        }
    }
}

/// Ordered train of candidate-unit indices; the decision-process state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowsheetState {
    train: Vec<usize>,
}

impl FlowsheetState {
    /// Candidate-unit indices from head to tail.
    pub fn train(&self) -> &[usize] {
        &self.train
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }

    pub fn len(&self) -> usize {
        self.train.len()
    }
}

/// One synthesis setting: the candidate unit list and the episode horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    id: u8,
    units: Vec<UnitKind>,
    horizon: usize,
    forbidden: Vec<(UnitKind, UnitKind)>,
}

impl Scenario {
    /// The three built-in settings, growing one candidate at a time:
    /// 1 is reactor and heater, 2 adds a heat exchanger, 3 adds a cooler.
    pub fn new(id: u8) -> Result<Self> {
        let units = match id {
            1 => vec![UnitKind::Reactor, UnitKind::Heater],
            2 => vec![UnitKind::Reactor, UnitKind::Heater, UnitKind::HeatExchanger],
            3 => vec![
                UnitKind::Reactor,
                UnitKind::Heater,
                UnitKind::HeatExchanger,
                UnitKind::Cooler,
            ],
            other => {
                return Err(Error::Domain(format!(
                    "scenario {other} does not exist, choose 1, 2 or 3"
                )))
            }
        };
        Ok(Scenario {
            id,
            units,
            horizon: DEFAULT_HORIZON,
            forbidden: vec![(UnitKind::Heater, UnitKind::Cooler)],
        })
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    /// Replace the forbidden adjacency list (pairs match in either order).
    pub fn with_forbidden(mut self, forbidden: Vec<(UnitKind, UnitKind)>) -> Self {
        self.forbidden = forbidden;
        self
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn units(&self) -> &[UnitKind] {
        &self.units
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Unit kinds of a state's train, head to tail.
    pub fn kinds(&self, state: &FlowsheetState) -> Vec<UnitKind> {
        state.train.iter().map(|&i| self.units[i]).collect()
    }

    /// Appends per candidate unit, plus remove-tail, plus do-nothing.
    pub fn action_count(&self) -> usize {
        self.units.len() + 2
    }

    /// Length of [`Scenario::encode`]'s output:
    /// `(units + FEED_COUNT) * (units + PRODUCT_COUNT)` connection flags.
    pub fn state_dim(&self) -> usize {
        (self.units.len() + FEED_COUNT) * (self.units.len() + PRODUCT_COUNT)
    }

    /// Fresh episode start: the empty train.
    pub fn reset(&self) -> FlowsheetState {
        FlowsheetState::default()
    }

    /// Build a state from explicit unit kinds (handy for tests and reports).
    pub fn train_of(&self, kinds: &[UnitKind]) -> Result<FlowsheetState> {
        let mut train = Vec::with_capacity(kinds.len());
        for &k in kinds {
            let idx = self
                .units
                .iter()
                .position(|&u| u == k)
                .ok_or_else(|| {
                    Error::Domain(format!("scenario {} has no {k} candidate", self.id))
                })?;
            if train.contains(&idx) {
                return Err(Error::Domain(format!("{k} appears twice in the train")));
            }
            train.push(idx);
        }
        Ok(FlowsheetState { train })
    }

    /// Apply one manipulation. Returns the successor state and whether the
    /// manipulation was valid; invalid ones leave the state unchanged.
    pub fn apply(&self, state: &FlowsheetState, action: usize) -> Result<(FlowsheetState, bool)> {
        let n = self.units.len();
        if action >= self.action_count() {
            return Err(Error::Dimension(format!(
                "action {action} out of range, scenario {} has {}",
                self.id,
                self.action_count()
            )));
        }
        let mut next = state.clone();
        let valid = if action < n {
            if next.train.contains(&action) {
                false
            } else {
                next.train.push(action);
                true
            }
        } else if action == n {
            next.train.pop().is_some()
        } else {
            true // do-nothing
        };
        if !valid {
            next = state.clone();
        }
        Ok((next, valid))
    }

    /// Structural screening: cheap rules that must hold before simulation.
    pub fn screen(&self, state: &FlowsheetState) -> ScreenResult {
        if state.is_empty() {
            return ScreenResult::fail(ScreenReason::EmptyTrain);
        }
        let kinds = self.kinds(state);
        if !kinds.contains(&UnitKind::Reactor) {
            return ScreenResult::fail(ScreenReason::NoReactor);
        }
        for pair in kinds.windows(2) {
            let hit = self.forbidden.iter().any(|&(a, b)| {
                (pair[0] == a && pair[1] == b) || (pair[0] == b && pair[1] == a)
            });
            if hit {
                return ScreenResult::fail(ScreenReason::ForbiddenAdjacency);
            }
        }
        ScreenResult::ok()
    }

    /// Flatten a state into the binary connection matrix the approximators
    /// consume. Rows are stream destinations (each candidate unit in list
    /// order, then the product take-off), columns are stream sources (the
    /// two feeds, then each candidate unit), flattened row-major. Both feeds
    /// connect to the head unit, consecutive units connect in train order,
    /// and the tail connects to the product row. Distinct trains always give
    /// distinct matrices.
    pub fn encode(&self, state: &FlowsheetState) -> Vec<u8> {
        let n = self.units.len();
        let cols = n + FEED_COUNT;
        let mut m = vec![0u8; self.state_dim()];
        if let Some(&head) = state.train.first() {
            m[head * cols] = 1;
            m[head * cols + 1] = 1;
            for w in state.train.windows(2) {
                m[w[1] * cols + FEED_COUNT + w[0]] = 1;
            }
            let tail = *state.train.last().unwrap();
            m[n * cols + FEED_COUNT + tail] = 1;
        }
        m
    }

    /// Dash-joined unit codes from head to tail, `"-"` for the empty train.
    pub fn signature(&self, state: &FlowsheetState) -> String {
        if state.is_empty() {
            return "-".to_string();
        }
        let codes: Vec<String> = self
            .kinds(state)
            .iter()
            .map(|k| k.code().to_string())
            .collect();
        codes.join("-")
    }

    /// Every train that passes screening, in a fixed deterministic order
    /// (by unit subset, then by permutation). The design space is tiny, so
    /// exhaustive enumeration is the ground truth the learners are judged
    /// against.
    pub fn enumerate_screened(&self) -> Vec<FlowsheetState> {
        let n = self.units.len();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let k = members.len();
            for perm in members.into_iter().permutations(k) {
                let state = FlowsheetState { train: perm };
                if self.screen(&state).passed {
                    out.push(state);
                }
            }
        }
        out
    }
}

//! The MGAS driver: global minimization over a box through the Hilbert-curve
//! reduction, subdividing every nondominated interval of the Hölder diagram
//! at once instead of committing to a single constant estimate.
//!
//! One iteration:
//! 1. take the lowest interval of every length group, build the lower-right
//!    hull of their `(h, F)` points and keep the vertices that promise an
//!    improvement of at least `xi = epsilon * |f_min|` and are longer than
//!    `eta`;
//! 2. trisect the kept intervals from longest to shortest, sampling the
//!    midpoints of the two outer children (the middle child keeps its
//!    parent's value).
//!
//! The selection and `xi` are frozen for the whole sweep; improvements found
//! while draining it only take effect at the next iteration.

use std::collections::{BTreeMap, BTreeSet};

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::curve::CurveMap;
use crate::diagram::{
    h_from_length, length_at_depth, midpoint_of, DiagramPoint, IntervalRecord, MAX_DEPTH,
};
use crate::error::{Error, Result};
use crate::hull::{filter_improving, nondominated, selection_rows, SelectionRow};
use crate::objective::{evaluate_finite, Objective};
use crate::run::{Algorithm, RunResult, StopReason, StoppingRule, TraceEntry};

pub const DEFAULT_LEVEL: u32 = 10;
pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_MAX_TRIALS: u64 = 1_000_000;

/// Length threshold used when nothing more specific is known about the
/// problem: coarser for low dimensions where the reduced function is smooth.
pub fn default_eta(dim: usize) -> f64 {
    match dim {
        0..=2 => 1e-4,
        3 => 1e-7,
        _ => 1e-10,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgasConfig {
    pub dim: usize,
    pub level: u32,
    pub epsilon: f64,
    pub eta: f64,
    pub max_trials: u64,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

impl MgasConfig {
    pub fn new(box_lo: Vec<f64>, box_hi: Vec<f64>) -> Self {
        let dim = box_lo.len();
        Self {
            dim,
            level: DEFAULT_LEVEL,
            epsilon: DEFAULT_EPSILON,
            eta: default_eta(dim),
            max_trials: DEFAULT_MAX_TRIALS,
            box_lo,
            box_hi,
        }
    }

    pub fn unit(dim: usize) -> Self {
        Self::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_max_trials(mut self, max_trials: u64) -> Self {
        self.max_trials = max_trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon = {}", self.epsilon)));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidConfig(format!("eta = {}", self.eta)));
        }
        if self.max_trials < 3 {
            return Err(Error::InvalidConfig(format!(
                "max_trials must be at least 3, got {}",
                self.max_trials
            )));
        }
        if self.box_lo.len() != self.dim || self.box_hi.len() != self.dim {
            return Err(Error::InvalidConfig("box does not match dimension".into()));
        }
        Ok(())
    }

    pub fn curve(&self) -> Result<CurveMap> {
        CurveMap::new(
            self.dim,
            self.level,
            self.box_lo.clone(),
            self.box_hi.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IterationOutcome {
    Completed,
    /// Nothing passed the selection filters; the state is unchanged.
    Stagnated,
    /// The budget ran out part way through the sweep.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    /// Ids of the intervals selected for subdivision, in processing order.
    pub selected: Vec<u64>,
    pub subdivided: usize,
    pub outcome: IterationOutcome,
}

type GroupKey = (OrderedFloat<f64>, u64);

/// Partition of `[0, 1]`, trial history and incumbent of one MGAS run.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    curve: CurveMap,
    intervals: BTreeMap<u64, IntervalRecord>,
    /// Per depth, intervals ordered by midpoint value then id.
    groups: Vec<BTreeSet<GroupKey>>,
    h_by_depth: Vec<f64>,
    next_id: u64,
    iterations: u64,
    trials: u64,
    subdivisions: u64,
    f_min: f64,
    x_min: f64,
    y_min: Vec<f64>,
    trace: Vec<TraceEntry>,
    record_selections: bool,
    selections: Vec<SelectionRow>,
}

impl OptimizerState {
    /// Splits `[0, 1]` into thirds and samples their midpoints 1/6, 1/2, 5/6.
    pub fn initialize<O: Objective + ?Sized>(cfg: &MgasConfig, objective: &O) -> Result<Self> {
        cfg.validate()?;
        let curve = cfg.curve()?;
        let h_by_depth = (0..=MAX_DEPTH)
            .map(|d| h_from_length(length_at_depth(d), cfg.dim))
            .collect();
        let mut state = Self {
            curve,
            intervals: BTreeMap::new(),
            groups: vec![BTreeSet::new(); MAX_DEPTH as usize + 1],
            h_by_depth,
            next_id: 0,
            iterations: 0,
            trials: 0,
            subdivisions: 0,
            f_min: f64::INFINITY,
            x_min: f64::NAN,
            y_min: Vec::new(),
            trace: Vec::new(),
            record_selections: false,
            selections: Vec::new(),
        };
        for left in 0..3 {
            let f = state.sample(objective, midpoint_of(left, 1))?;
            state.insert(left, 1, f);
        }
        Ok(state)
    }

    /// Keep a `SelectionRow` dump of every hull built from now on.
    pub fn record_selections(&mut self, on: bool) {
        self.record_selections = on;
    }

    pub fn selections(&self) -> &[SelectionRow] {
        &self.selections
    }

    pub fn curve(&self) -> &CurveMap {
        &self.curve
    }

    pub fn intervals(&self) -> impl Iterator<Item = &IntervalRecord> {
        self.intervals.values()
    }

    pub fn interval_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn subdivisions(&self) -> u64 {
        self.subdivisions
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> &[f64] {
        &self.y_min
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn max_interval_length(&self) -> f64 {
        self.groups
            .iter()
            .position(|g| !g.is_empty())
            .map(|d| length_at_depth(d as u32))
            .unwrap_or(0.0)
    }

    /// Lowest interval of every nonempty length group as diagram points.
    pub fn group_representatives(&self) -> Vec<DiagramPoint> {
        self.groups
            .iter()
            .enumerate()
            .filter_map(|(d, g)| {
                g.first()
                    .map(|&(f, id)| DiagramPoint::new(id, self.h_by_depth[d], f.0))
            })
            .collect()
    }

    /// Runs one iteration, never letting the trial count exceed `budget`.
    pub fn iterate<O: Objective + ?Sized>(
        &mut self,
        cfg: &MgasConfig,
        objective: &O,
        budget: u64,
    ) -> Result<IterationReport> {
        let f_min = self.f_min;
        let xi = cfg.epsilon * f_min.abs();
        let hull = nondominated(&self.group_representatives())?;
        if self.record_selections {
            self.selections
                .extend(selection_rows(self.iterations + 1, &hull, f_min, xi));
        }
        let mut selected: Vec<(u32, u64)> = filter_improving(&hull, f_min, xi)
            .ids()
            .into_iter()
            .map(|id| (self.intervals[&id].depth, id))
            .filter(|&(depth, _)| depth < MAX_DEPTH && length_at_depth(depth) > cfg.eta)
            .collect();
        // longest first, then smallest id
        selected.sort_unstable();
        let ids: Vec<u64> = selected.iter().map(|&(_, id)| id).collect();
        if ids.is_empty() {
            return Ok(IterationReport {
                selected: ids,
                subdivided: 0,
                outcome: IterationOutcome::Stagnated,
            });
        }
        let mut subdivided = 0;
        for &id in &ids {
            if self.trials + 2 > budget {
                self.iterations += 1;
                return Ok(IterationReport {
                    selected: ids,
                    subdivided,
                    outcome: IterationOutcome::BudgetExhausted,
                });
            }
            self.subdivide(id, objective)?;
            subdivided += 1;
        }
        self.iterations += 1;
        Ok(IterationReport {
            selected: ids,
            subdivided,
            outcome: IterationOutcome::Completed,
        })
    }

    fn subdivide<O: Objective + ?Sized>(&mut self, id: u64, objective: &O) -> Result<()> {
        let parent = self
            .intervals
            .remove(&id)
            .ok_or_else(|| Error::InvalidArgument(format!("no interval with id {id}")))?;
        self.groups[parent.depth as usize].remove(&(OrderedFloat(parent.f_mid), id));
        let depth = parent.depth + 1;
        let left = parent.left * 3;
        let f_left = self.sample(objective, midpoint_of(left, depth))?;
        let f_right = self.sample(objective, midpoint_of(left + 2, depth))?;
        self.insert(left, depth, f_left);
        self.insert(left + 1, depth, parent.f_mid);
        self.insert(left + 2, depth, f_right);
        self.subdivisions += 1;
        Ok(())
    }

    fn insert(&mut self, left: u64, depth: u32, f_mid: f64) {
        let id = self.next_id;
        self.next_id += 1;
        self.groups[depth as usize].insert((OrderedFloat(f_mid), id));
        self.intervals.insert(
            id,
            IntervalRecord {
                id,
                left,
                depth,
                f_mid,
            },
        );
    }

    fn sample<O: Objective + ?Sized>(&mut self, objective: &O, x: f64) -> Result<f64> {
        let y = self.curve.map(x)?;
        let f = evaluate_finite(objective, &y)?;
        self.trials += 1;
        if f < self.f_min {
            self.f_min = f;
            self.x_min = x;
            self.y_min = y.clone();
        }
        self.trace.push(TraceEntry {
            trial: self.trials,
            x: Some(x),
            y,
            f,
        });
        Ok(f)
    }

    fn into_result(
        self,
        stop_reason: StopReason,
        solved_at: Option<u64>,
        first_hit: Option<u64>,
    ) -> RunResult {
        RunResult {
            algorithm: Algorithm::Mgas,
            dim: self.curve.dim(),
            trials: self.trials,
            iterations: self.iterations,
            subdivisions: self.subdivisions,
            stop_reason,
            f_min: self.f_min,
            x_min: Some(self.x_min),
            y_min: self.y_min,
            solved_at,
            first_hit_trial: first_hit,
            trace: self.trace,
        }
    }
}

/// Runs MGAS until the target ball is hit, the budget
/// `min(cfg.max_trials, stop.max_trials)` is spent, or no interval is
/// eligible any more. A hit is reported with the trial count at the end of
/// the iteration in which it happened.
pub fn run<O: Objective + ?Sized>(
    cfg: &MgasConfig,
    objective: &O,
    stop: &StoppingRule,
) -> Result<RunResult> {
    drive(cfg, objective, stop, false).map(|(r, _)| r)
}

/// Same as [`run`], also returning the hull of every iteration.
pub fn run_recording_hulls<O: Objective + ?Sized>(
    cfg: &MgasConfig,
    objective: &O,
    stop: &StoppingRule,
) -> Result<(RunResult, Vec<SelectionRow>)> {
    drive(cfg, objective, stop, true)
}

fn drive<O: Objective + ?Sized>(
    cfg: &MgasConfig,
    objective: &O,
    stop: &StoppingRule,
    record: bool,
) -> Result<(RunResult, Vec<SelectionRow>)> {
    let budget = cfg.max_trials.min(stop.max_trials);
    let mut state = OptimizerState::initialize(cfg, objective)?;
    state.record_selections(record);
    let mut scanned = 0;
    let mut first_hit = scan_hits(stop, state.trace(), &mut scanned);
    let (reason, solved_at) = loop {
        if first_hit.is_some() {
            break (StopReason::Solved, Some(state.trials));
        }
        if state.trials + 2 > budget {
            break (StopReason::Budget, None);
        }
        let report = state.iterate(cfg, objective, budget)?;
        first_hit = scan_hits(stop, state.trace(), &mut scanned);
        match report.outcome {
            IterationOutcome::Completed => {}
            _ if first_hit.is_some() => {}
            IterationOutcome::Stagnated => break (StopReason::Stagnation, None),
            IterationOutcome::BudgetExhausted => break (StopReason::Budget, None),
        }
    };
    let rows = std::mem::take(&mut state.selections);
    Ok((state.into_result(reason, solved_at, first_hit), rows))
}

pub(crate) fn scan_hits(
    stop: &StoppingRule,
    trace: &[TraceEntry],
    scanned: &mut usize,
) -> Option<u64> {
    let hit = trace[*scanned..]
        .iter()
        .find(|e| stop.hits(&e.y))
        .map(|e| e.trial);
    *scanned = trace.len();
    hit
}

/// Lower bound for `F` over the whole box from a lower bound `u_star` that
/// only holds along the level-M curve: `u_star - L * (cell diagonal) / 2`,
/// which is `u_star - 2^-(M+1) * L * sqrt(N)` on the unit cube.
pub fn global_lower_bound(u_star: f64, lipschitz: f64, curve: &CurveMap) -> Result<f64> {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        )));
    }
    Ok(u_star - 0.5 * lipschitz * curve.cell_diagonal())
}

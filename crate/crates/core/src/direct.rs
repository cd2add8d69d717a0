//! DIRECT baseline (Jones, Perttunen and Stuckman 1993) on the normalized box.
//!
//! Each box is drawn at `(measure, f(center))` where the measure is the half
//! diagonal, and the potentially optimal boxes are picked by the same hull
//! and `epsilon * |f_min|` test used by MGAS. A selected box samples
//! `center ± side/3` along every longest side, then is trisected along those
//! sides in order of their best sample so the best points keep the biggest
//! boxes.
//!
//! Box geometry is kept as integer numerators over powers of three, so equal
//! shapes get bit-identical measures and group together exactly.

use std::collections::{BTreeMap, BTreeSet};

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::diagram::{length_at_depth, midpoint_of, DiagramPoint, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::hull::{filter_improving, nondominated};
use crate::mgas::{
    scan_hits, IterationOutcome, IterationReport, DEFAULT_EPSILON, DEFAULT_MAX_TRIALS,
};
use crate::objective::{evaluate_finite, Objective};
use crate::run::{Algorithm, RunResult, StopReason, StoppingRule, TraceEntry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectConfig {
    pub dim: usize,
    pub epsilon: f64,
    pub max_trials: u64,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

impl DirectConfig {
    pub fn new(box_lo: Vec<f64>, box_hi: Vec<f64>) -> Self {
        Self {
            dim: box_lo.len(),
            epsilon: DEFAULT_EPSILON,
            max_trials: DEFAULT_MAX_TRIALS,
            box_lo,
            box_hi,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_trials(mut self, max_trials: u64) -> Self {
        self.max_trials = max_trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.box_lo.len() != self.dim || self.box_hi.len() != self.dim {
            return Err(Error::InvalidConfig("box does not match dimension".into()));
        }
        if (0..self.dim).any(|j| !(self.box_lo[j] < self.box_hi[j])) {
            return Err(Error::InvalidConfig("empty box side".into()));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon = {}", self.epsilon)));
        }
        if self.max_trials < 1 {
            return Err(Error::InvalidConfig("max_trials must be positive".into()));
        }
        Ok(())
    }
}

/// A hyperrectangle `prod_j [k_j / 3^l_j, (k_j + 1) / 3^l_j]` of the
/// normalized unit box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub id: u64,
    pub left: Vec<u64>,
    pub levels: Vec<u32>,
    pub f_center: f64,
    pub measure: f64,
}

impl BoxRecord {
    pub fn center(&self) -> Vec<f64> {
        self.left
            .iter()
            .zip(&self.levels)
            .map(|(&k, &l)| midpoint_of(k, l))
            .collect()
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        self.levels.iter().map(|&l| length_at_depth(l)).collect()
    }

    pub fn volume(&self) -> f64 {
        self.side_lengths().iter().product()
    }
}

/// Half diagonal of a box with the given side levels, summed in sorted level
/// order so permutations of a shape agree to the bit.
fn measure_of(sorted_levels: &[u32]) -> f64 {
    0.5 * sorted_levels
        .iter()
        .map(|&l| length_at_depth(l).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn shape_key(levels: &[u32]) -> Vec<u32> {
    let mut key = levels.to_vec();
    key.sort_unstable();
    key
}

#[derive(Debug, Clone)]
pub struct DirectState {
    dim: usize,
    box_lo: Vec<f64>,
    box_hi: Vec<f64>,
    boxes: BTreeMap<u64, BoxRecord>,
    groups: BTreeMap<Vec<u32>, BTreeSet<(OrderedFloat<f64>, u64)>>,
    next_id: u64,
    iterations: u64,
    trials: u64,
    divisions: u64,
    f_min: f64,
    y_min: Vec<f64>,
    trace: Vec<TraceEntry>,
}

impl DirectState {
    /// Samples the center of the box.
    pub fn initialize<O: Objective + ?Sized>(cfg: &DirectConfig, objective: &O) -> Result<Self> {
        cfg.validate()?;
        let mut st = Self {
            dim: cfg.dim,
            box_lo: cfg.box_lo.clone(),
            box_hi: cfg.box_hi.clone(),
            boxes: BTreeMap::new(),
            groups: BTreeMap::new(),
            next_id: 0,
            iterations: 0,
            trials: 0,
            divisions: 0,
            f_min: f64::INFINITY,
            y_min: Vec::new(),
            trace: Vec::new(),
        };
        let left = vec![0; cfg.dim];
        let levels = vec![0; cfg.dim];
        let f = st.sample(objective, &left, &levels)?;
        st.insert(left, levels, f);
        Ok(st)
    }

    pub fn boxes(&self) -> impl Iterator<Item = &BoxRecord> {
        self.boxes.values()
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn group_representatives(&self) -> Vec<DiagramPoint> {
        self.groups
            .iter()
            .filter_map(|(key, g)| {
                g.first()
                    .map(|&(f, id)| DiagramPoint::new(id, measure_of(key), f.0))
            })
            .collect()
    }

    pub fn iterate<O: Objective + ?Sized>(
        &mut self,
        cfg: &DirectConfig,
        objective: &O,
        budget: u64,
    ) -> Result<IterationReport> {
        let f_min = self.f_min;
        let xi = cfg.epsilon * f_min.abs();
        let hull = nondominated(&self.group_representatives())?;
        let mut selected: Vec<(OrderedFloat<f64>, u64)> = filter_improving(&hull, f_min, xi)
            .vertices
            .iter()
            .filter(|v| {
                let b = &self.boxes[&v.id()];
                b.levels.iter().min().is_some_and(|&l| l < MAX_DEPTH)
            })
            .map(|v| (OrderedFloat(-v.point.h), v.id()))
            .collect();
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
            let b = &self.boxes[&id];
            let min_level = *b.levels.iter().min().expect("nonempty box");
            let cost = 2 * b.levels.iter().filter(|&&l| l == min_level).count() as u64;
            if self.trials + cost > budget {
                self.iterations += 1;
                return Ok(IterationReport {
                    selected: ids,
                    subdivided,
                    outcome: IterationOutcome::BudgetExhausted,
                });
            }
            self.divide(id, objective)?;
            subdivided += 1;
        }
        self.iterations += 1;
        Ok(IterationReport {
            selected: ids,
            subdivided,
            outcome: IterationOutcome::Completed,
        })
    }

    fn divide<O: Objective + ?Sized>(&mut self, id: u64, objective: &O) -> Result<()> {
        let parent = self.boxes.remove(&id).expect("selected box exists");
        if let Some(g) = self.groups.get_mut(&shape_key(&parent.levels)) {
            g.remove(&(OrderedFloat(parent.f_center), id));
        }
        let min_level = *parent.levels.iter().min().expect("nonempty box");
        let long: Vec<usize> = (0..self.dim)
            .filter(|&j| parent.levels[j] == min_level)
            .collect();

        // (best value, dim, value below, value above)
        let mut samples = Vec::with_capacity(long.len());
        for &j in &long {
            let mut levels = parent.levels.clone();
            levels[j] += 1;
            let mut left = parent.left.clone();
            left[j] = 3 * parent.left[j];
            let f_lo = self.sample(objective, &left, &levels)?;
            left[j] += 2;
            let f_hi = self.sample(objective, &left, &levels)?;
            samples.push((OrderedFloat(f_lo.min(f_hi)), j, f_lo, f_hi));
        }
        samples.sort_unstable_by_key(|&(w, j, _, _)| (w, j));

        let mut left = parent.left.clone();
        let mut levels = parent.levels.clone();
        for (_, j, f_lo, f_hi) in samples {
            levels[j] += 1;
            let base = 3 * left[j];
            left[j] = base;
            self.insert(left.clone(), levels.clone(), f_lo);
            left[j] = base + 2;
            self.insert(left.clone(), levels.clone(), f_hi);
            left[j] = base + 1;
        }
        self.insert(left, levels, parent.f_center);
        self.divisions += 1;
        Ok(())
    }

    fn insert(&mut self, left: Vec<u64>, levels: Vec<u32>, f_center: f64) {
        let id = self.next_id;
        self.next_id += 1;
        let key = shape_key(&levels);
        let measure = measure_of(&key);
        self.groups
            .entry(key)
            .or_default()
            .insert((OrderedFloat(f_center), id));
        self.boxes.insert(
            id,
            BoxRecord {
                id,
                left,
                levels,
                f_center,
                measure,
            },
        );
    }

    fn sample<O: Objective + ?Sized>(
        &mut self,
        objective: &O,
        left: &[u64],
        levels: &[u32],
    ) -> Result<f64> {
        let y: Vec<f64> = left
            .iter()
            .zip(levels)
            .enumerate()
            .map(|(j, (&k, &l))| {
                self.box_lo[j] + midpoint_of(k, l) * (self.box_hi[j] - self.box_lo[j])
            })
            .collect();
        let f = evaluate_finite(objective, &y)?;
        self.trials += 1;
        if f < self.f_min {
            self.f_min = f;
            self.y_min = y.clone();
        }
        self.trace.push(TraceEntry {
            trial: self.trials,
            x: None,
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
            algorithm: Algorithm::Direct,
            dim: self.dim,
            trials: self.trials,
            iterations: self.iterations,
            subdivisions: self.divisions,
            stop_reason,
            f_min: self.f_min,
            x_min: None,
            y_min: self.y_min,
            solved_at,
            first_hit_trial: first_hit,
            trace: self.trace,
        }
    }
}

/// Runs DIRECT under the same stopping conventions as [`crate::mgas::run`].
pub fn direct_run<O: Objective + ?Sized>(
    cfg: &DirectConfig,
    objective: &O,
    stop: &StoppingRule,
) -> Result<RunResult> {
    let budget = cfg.max_trials.min(stop.max_trials);
    let mut state = DirectState::initialize(cfg, objective)?;
    let mut scanned = 0;
    let mut first_hit = scan_hits(stop, state.trace(), &mut scanned);
    loop {
        if first_hit.is_some() {
            let t = state.trials;
            return Ok(state.into_result(StopReason::Solved, Some(t), first_hit));
        }
        let report = state.iterate(cfg, objective, budget)?;
        first_hit = scan_hits(stop, state.trace(), &mut scanned);
        match report.outcome {
            IterationOutcome::Completed => {}
            _ if first_hit.is_some() => {}
            IterationOutcome::Stagnated => {
                return Ok(state.into_result(StopReason::Stagnation, None, None))
            }
            IterationOutcome::BudgetExhausted => {
                return Ok(state.into_result(StopReason::Budget, None, None))
            }
        }
    }
}

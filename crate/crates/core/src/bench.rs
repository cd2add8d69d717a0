//! Experiment harness over GKLS classes: per-class trial statistics,
//! operating characteristics and parameter sweeps.
//!
//! A run counts as solved when a trial lands within `rho` of the generated
//! function's global minimizer. Its trial count is the total at the end of
//! that iteration. Unsolved runs are charged the full budget when averaging,
//! which turns the average into a lower bound.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::direct::{direct_run, DirectConfig};
use crate::error::{Error, Result};
use crate::gkls::{generate, GklsClassSpec};
use crate::mgas::{self, MgasConfig, DEFAULT_EPSILON, DEFAULT_LEVEL};
use crate::parallel::{map_indices, Execution};
use crate::run::{csv_err, Algorithm, RunResult, StopReason, StoppingRule};

/// Version tag written into every persisted record and CSV file name.
pub const SCHEMA_VERSION: u32 = 1;

/// Stopping radius: `0.01 sqrt(N)` for classes 1-6, `0.02 sqrt(N)` for 7-8.
pub fn default_radius(spec: &GklsClassSpec) -> f64 {
    let factor = match spec.class_id {
        Some(7) | Some(8) => 0.02,
        _ => 0.01,
    };
    factor * (spec.dim as f64).sqrt()
}

/// Length threshold tuned per class.
pub fn default_eta(spec: &GklsClassSpec) -> f64 {
    match spec.class_id {
        Some(1) | Some(2) => 1e-4,
        Some(3) => 1e-7,
        Some(4) => 1e-8,
        Some(_) => 1e-10,
        None => mgas::default_eta(spec.dim),
    }
}

/// Functions per class and budget at desk scale (the full-scale protocol
/// uses 100 functions and a budget of 10^6 everywhere).
pub fn desk_scale(dim: usize) -> (usize, u64) {
    if dim <= 3 {
        (100, 1_000_000)
    } else {
        (20, 100_000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchParams {
    pub level: u32,
    pub epsilon: f64,
    /// `None` picks [`default_eta`].
    pub eta: Option<f64>,
    pub max_trials: u64,
    /// `None` picks [`default_radius`].
    pub radius: Option<f64>,
    pub execution: Execution,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            level: DEFAULT_LEVEL,
            epsilon: DEFAULT_EPSILON,
            eta: None,
            max_trials: mgas::DEFAULT_MAX_TRIALS,
            radius: None,
            execution: Execution::default(),
        }
    }
}

impl BenchParams {
    pub fn with_max_trials(mut self, max_trials: u64) -> Self {
        self.max_trials = max_trials;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Summary of one run; the persisted per-run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub class: u8,
    pub func_index: u64,
    pub algo: Algorithm,
    pub seed: u64,
    pub solved: bool,
    /// Trials at the solving iteration's end, or at termination.
    pub trials: u64,
    pub stop_reason: StopReason,
    pub iterations: u64,
    pub f_min: f64,
    pub params: BenchParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: u8,
    pub algo: Algorithm,
    pub max_trials: u64,
    pub runs: Vec<RunRecord>,
    pub average: f64,
    pub maximum: u64,
    pub unsolved: usize,
}

impl ClassReport {
    fn from_runs(class: u8, algo: Algorithm, max_trials: u64, runs: Vec<RunRecord>) -> Self {
        let charged: Vec<u64> = runs
            .iter()
            .map(|r| if r.solved { r.trials } else { max_trials })
            .collect();
        let average = if charged.is_empty() {
            0.0
        } else {
            charged.iter().map(|&t| t as f64).sum::<f64>() / charged.len() as f64
        };
        let maximum = charged.iter().copied().max().unwrap_or(0);
        let unsolved = runs.iter().filter(|r| !r.solved).count();
        Self {
            class,
            algo,
            max_trials,
            runs,
            average,
            maximum,
            unsolved,
        }
    }

    pub fn solved_count(&self) -> usize {
        self.runs.len() - self.unsolved
    }

    /// Whether the average is only a lower bound (some run hit the budget).
    pub fn average_is_lower_bound(&self) -> bool {
        self.unsolved > 0
    }

    /// `">1234.50"` when unsolved runs were charged the budget.
    pub fn average_label(&self) -> String {
        let mark = if self.average_is_lower_bound() {
            ">"
        } else {
            ""
        };
        format!("{mark}{:.2}", self.average)
    }

    /// `"1000000(4)"` when 4 runs were not solved within the budget.
    pub fn maximum_label(&self) -> String {
        if self.unsolved > 0 {
            format!("{}({})", self.max_trials, self.unsolved)
        } else {
            self.maximum.to_string()
        }
    }

    pub fn stagnated(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| r.stop_reason == StopReason::Stagnation)
            .count()
    }
}

fn class_id(spec: &GklsClassSpec) -> u8 {
    spec.class_id.unwrap_or(0)
}

/// Runs one algorithm on one generated function of the class.
pub fn run_function(
    algo: Algorithm,
    spec: &GklsClassSpec,
    index: u64,
    params: &BenchParams,
) -> Result<RunResult> {
    let g = generate(spec, index)?;
    let (lo, hi) = g.domain();
    let radius = params.radius.unwrap_or_else(|| default_radius(spec));
    let stop = StoppingRule::ball(g.global_minimizer().to_vec(), radius, params.max_trials)?;
    match algo {
        Algorithm::Mgas => {
            let cfg = MgasConfig::new(lo, hi)
                .with_level(params.level)
                .with_epsilon(params.epsilon)
                .with_eta(params.eta.unwrap_or_else(|| default_eta(spec)))
                .with_max_trials(params.max_trials);
            mgas::run(&cfg, &g, &stop)
        }
        Algorithm::Direct => {
            let cfg = DirectConfig::new(lo, hi)
                .with_epsilon(params.epsilon)
                .with_max_trials(params.max_trials);
            direct_run(&cfg, &g, &stop)
        }
    }
}

/// Runs functions `0..count` of the class. Runs are independent and execute
/// according to `params.execution`; the report is assembled in index order.
pub fn run_class(
    algo: Algorithm,
    spec: &GklsClassSpec,
    count: usize,
    params: &BenchParams,
) -> Result<ClassReport> {
    let outcomes = map_indices(count, params.execution, |i| {
        run_function(algo, spec, i as u64, params).map(|r| RunRecord {
            schema_version: SCHEMA_VERSION,
            class: class_id(spec),
            func_index: i as u64,
            algo,
            seed: spec.seed,
            solved: r.solved(),
            trials: r.solved_at.unwrap_or(r.trials),
            stop_reason: r.stop_reason,
            iterations: r.iterations,
            f_min: r.f_min,
            params: params.clone(),
        })
    });
    let runs = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ClassReport::from_runs(
        class_id(spec),
        algo,
        params.max_trials,
        runs,
    ))
}

/// `n` log-spaced integer budgets from `lo` to `hi` inclusive, deduplicated.
pub fn budget_grid(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    if n == 0 || lo == 0 || hi < lo {
        return Vec::new();
    }
    if n == 1 || lo == hi {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut grid: Vec<u64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp().round() as u64)
        .map(|v| v.clamp(lo, hi))
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid.dedup();
    grid
}

/// Default characteristic grid: 50 points from 10 to the budget.
pub fn default_budget_grid(max_trials: u64) -> Vec<u64> {
    budget_grid(10, max_trials.max(10), 50)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicRow {
    pub budget: u64,
    pub solved_count: usize,
    pub algo: Algorithm,
    pub class: u8,
}

/// Number of functions solved within each budget, one series per report.
pub fn operating_characteristics(
    reports: &[ClassReport],
    budgets: &[u64],
) -> Vec<CharacteristicRow> {
    let mut rows = Vec::with_capacity(reports.len() * budgets.len());
    for rep in reports {
        let mut solved: Vec<u64> = rep
            .runs
            .iter()
            .filter(|r| r.solved)
            .map(|r| r.trials)
            .collect();
        solved.sort_unstable();
        for &budget in budgets {
            rows.push(CharacteristicRow {
                budget,
                solved_count: solved.partition_point(|&t| t <= budget),
                algo: rep.algo,
                class: rep.class,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta: f64,
    pub average: f64,
    pub maximum: u64,
    pub unsolved: usize,
    pub stagnated: usize,
}

/// MGAS statistics for each `eta` value.
pub fn eta_sweep(
    spec: &GklsClassSpec,
    etas: &[f64],
    count: usize,
    params: &BenchParams,
) -> Result<Vec<SweepRow>> {
    etas.iter()
        .map(|&eta| {
            let p = params.clone().with_eta(eta);
            let rep = run_class(Algorithm::Mgas, spec, count, &p)?;
            Ok(SweepRow {
                eta,
                average: rep.average,
                maximum: rep.maximum,
                unsolved: rep.unsolved,
                stagnated: rep.stagnated(),
            })
        })
        .collect()
}

#[derive(Serialize)]
struct RunCsvRow {
    class: u8,
    func_index: u64,
    algo: Algorithm,
    solved: bool,
    trials: u64,
    stop_reason: StopReason,
}

/// Writes `class,func_index,algo,solved,trials,stop_reason`.
pub fn write_runs_csv<W: Write>(out: W, reports: &[ClassReport]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for rep in reports {
        for r in &rep.runs {
            wtr.serialize(RunCsvRow {
                class: r.class,
                func_index: r.func_index,
                algo: r.algo,
                solved: r.solved,
                trials: r.trials,
                stop_reason: r.stop_reason,
            })
            .map_err(csv_err)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `budget,solved_count,algo,class`.
pub fn write_characteristics_csv<W: Write>(out: W, rows: &[CharacteristicRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `eta,average,maximum,unsolved,stagnated`.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Persists a benchmark: one JSON file per run under `runs/`, plus
/// `runs.csv`, `characteristics.csv` and `summary.json`.
pub fn write_benchmark(dir: &Path, reports: &[ClassReport], budgets: &[u64]) -> Result<()> {
    let runs_dir = dir.join("runs");
    fs::create_dir_all(&runs_dir)?;
    for rep in reports {
        for r in &rep.runs {
            let name = format!("class{}_{}_f{:03}.json", r.class, r.algo, r.func_index);
            fs::write(runs_dir.join(name), serde_json::to_vec_pretty(r)?)?;
        }
    }
    write_runs_csv(fs::File::create(dir.join("runs.csv"))?, reports)?;
    let rows = operating_characteristics(reports, budgets);
    write_characteristics_csv(fs::File::create(dir.join("characteristics.csv"))?, &rows)?;
    let summary: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "class": r.class,
                "algo": r.algo,
                "count": r.runs.len(),
                "average": r.average,
                "average_label": r.average_label(),
                "maximum": r.maximum,
                "maximum_label": r.maximum_label(),
                "unsolved": r.unsolved,
                "stagnated": r.stagnated(),
                "max_trials": r.max_trials,
            })
        })
        .collect();
    fs::write(
        dir.join("summary.json"),
        serde_json::to_vec_pretty(&summary)?,
    )?;
    Ok(())
}

/// Parses a comma separated list of floats.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("not a number: '{s}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(trials: u64, solved: bool) -> RunRecord {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            class: 1,
            func_index: 0,
            algo: Algorithm::Mgas,
            seed: 0,
            solved,
            trials,
            stop_reason: if solved {
                StopReason::Solved
            } else {
                StopReason::Budget
            },
            iterations: 0,
            f_min: 0.0,
            params: BenchParams::default(),
        }
    }

    #[test]
    fn report_arithmetic() {
        let rep = ClassReport::from_runs(
            1,
            Algorithm::Mgas,
            1000,
            vec![record(10, true), record(30, true), record(20, true)],
        );
        assert_eq!(rep.average, 20.0);
        assert_eq!(rep.maximum, 30);
        assert_eq!(rep.average_label(), "20.00");
        assert_eq!(rep.maximum_label(), "30");
    }

    #[test]
    fn unsolved_runs_charge_the_budget() {
        let rep = ClassReport::from_runs(
            1,
            Algorithm::Direct,
            1000,
            vec![record(100, true), record(1000, false)],
        );
        assert_eq!(rep.average, 550.0);
        assert!(rep.average_is_lower_bound());
        assert_eq!(rep.average_label(), ">550.00");
        assert_eq!(rep.maximum_label(), "1000(1)");
    }

    #[test]
    fn characteristics_jump_at_solve_count() {
        let runs = (0..5).map(|_| record(50, true)).collect();
        let rep = ClassReport::from_runs(2, Algorithm::Mgas, 1000, runs);
        let rows = operating_characteristics(&[rep], &[10, 49, 50, 100]);
        let counts: Vec<usize> = rows.iter().map(|r| r.solved_count).collect();
        assert_eq!(counts, vec![0, 0, 5, 5]);
    }

    #[test]
    fn budget_grid_shape() {
        let g = default_budget_grid(1_000_000);
        assert_eq!(g.first(), Some(&10));
        assert_eq!(g.last(), Some(&1_000_000));
        assert_eq!(g.len(), 50);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(budget_grid(100, 10_000, 3), vec![100, 1000, 10_000]);
        assert!(budget_grid(10, 5, 4).is_empty());
        // dense grids collapse duplicates
        assert_eq!(budget_grid(1, 3, 10), vec![1, 2, 3]);
    }

    #[test]
    fn radius_and_eta_defaults() {
        let c1 = GklsClassSpec::preset(1).unwrap();
        assert!((default_radius(&c1) - 0.01 * 2f64.sqrt()).abs() < 1e-15);
        let c7 = GklsClassSpec::preset(7).unwrap();
        assert!((default_radius(&c7) - 0.02 * 5f64.sqrt()).abs() < 1e-15);
        let etas: Vec<f64> = (1..=8)
            .map(|c| default_eta(&GklsClassSpec::preset(c).unwrap()))
            .collect();
        assert_eq!(
            etas,
            vec![1e-4, 1e-4, 1e-7, 1e-8, 1e-10, 1e-10, 1e-10, 1e-10]
        );
    }

    #[test]
    fn parse_value_lists() {
        assert_eq!(parse_values("1e-4, 0.1,2").unwrap(), vec![1e-4, 0.1, 2.0]);
        assert!(parse_values("1,x").is_err());
    }
}

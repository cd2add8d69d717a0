use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mgas_core::bench::{
    default_budget_grid, default_eta, default_radius, desk_scale, eta_sweep, parse_values,
    run_class, write_benchmark, write_sweep_csv, BenchParams,
};
use mgas_core::hull::write_selection_csv;
use mgas_core::mgas::{DEFAULT_EPSILON, DEFAULT_LEVEL, DEFAULT_MAX_TRIALS};
use mgas_core::{
    direct_run, generate, run_recording_hulls, Algorithm, CurveMap, DirectConfig, Execution,
    GklsClassSpec, MgasConfig, Objective, Paraboloid, RunResult, StoppingRule,
};

/// Curve dumps larger than 2^24 cells need `--force`.
const DUMP_LIMIT_BITS: u32 = 24;

#[derive(Parser)]
#[command(
    name = "mgas",
    version,
    about = "Space-filling-curve global optimization with a DIRECT baseline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print all cell centers of the level-M curve in curve order as CSV.
    CurveDump(CurveDumpArgs),
    /// Minimize one function and print the run as JSON.
    Optimize(OptimizeArgs),
    /// Generate or evaluate GKLS test functions.
    #[command(subcommand)]
    Gkls(GklsCommand),
    /// Run a class benchmark and write per-run records and CSV summaries.
    Benchmark(BenchmarkArgs),
    /// Sweep one MGAS parameter over a class.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CurveDumpArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    level: u32,
    /// `lo,hi` for every coordinate, or once for all of them. Default [0,1].
    #[arg(long = "box", value_name = "LO,HI", allow_hyphen_values = true)]
    bounds: Vec<String>,
    /// Allow dumps with more than 2^24 cells.
    #[arg(long)]
    force: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionKind {
    Paraboloid,
    Gkls,
}

#[derive(Args)]
struct GklsSelect {
    /// Preset class 1-8.
    #[arg(long, default_value_t = 1)]
    class: u8,
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GklsSelect {
    fn spec(&self) -> Result<GklsClassSpec> {
        Ok(GklsClassSpec::preset(self.class)?.with_seed(self.seed))
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, default_value = "mgas", value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long, value_enum, default_value = "gkls")]
    function: FunctionKind,
    #[command(flatten)]
    gkls: GklsSelect,
    /// Dimension of the paraboloid (GKLS takes it from the class).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Paraboloid vertex; defaults to the box center.
    #[arg(long, value_name = "X1,..,XN", allow_hyphen_values = true)]
    center: Option<String>,
    /// Paraboloid search box, as for curve-dump. Default [0,1]^N.
    #[arg(long = "box", value_name = "LO,HI", allow_hyphen_values = true)]
    bounds: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: u32,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Defaults to the class setting for GKLS and to a dimension default otherwise.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_TRIALS)]
    max_trials: u64,
    /// Centre of the stopping ball; defaults to the known minimizer.
    #[arg(long, value_name = "X1,..,XN", allow_hyphen_values = true)]
    target: Option<String>,
    /// Radius of the stopping ball; defaults to 0.01 sqrt(N) (0.02 sqrt(N) for classes 7-8).
    #[arg(long)]
    radius: Option<f64>,
    /// Run on the budget only, ignoring the stopping ball.
    #[arg(long, conflicts_with_all = ["target", "radius"])]
    no_ball: bool,
    /// CSV trace `trial,x,y_1..y_N,f,f_min`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// CSV of every hull `iter,id,h,F,H_lo,H_hi,passed_xi` (MGAS only).
    #[arg(long)]
    hull_dump: Option<PathBuf>,
    /// Write the JSON result to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GklsCommand {
    /// Print the JSON description of one generated function.
    Gen {
        #[command(flatten)]
        select: GklsSelect,
    },
    /// Evaluate points read as CSV rows from stdin; prints `y_1..y_N,f`.
    Eval {
        #[command(flatten)]
        select: GklsSelect,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoChoice {
    Mgas,
    Direct,
    Both,
}

impl AlgoChoice {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::Mgas => vec![Algorithm::Mgas],
            AlgoChoice::Direct => vec![Algorithm::Direct],
            AlgoChoice::Both => vec![Algorithm::Mgas, Algorithm::Direct],
        }
    }
}

#[derive(Args)]
struct ClassRunArgs {
    #[arg(long)]
    class: u8,
    /// Functions per class; defaults to the desk-scale count.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial budget per run; defaults to the desk-scale budget.
    #[arg(long)]
    max_trials: Option<u64>,
    /// 100 functions and 10^6 trials regardless of dimension.
    #[arg(long)]
    full_scale: bool,
    /// Run functions one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: PathBuf,
}

impl ClassRunArgs {
    fn setup(&self) -> Result<(GklsClassSpec, usize, BenchParams)> {
        let spec = GklsClassSpec::preset(self.class)?.with_seed(self.seed);
        let (count, budget) = if self.full_scale {
            (100, 1_000_000)
        } else {
            desk_scale(spec.dim)
        };
        let mut params = BenchParams::default().with_max_trials(self.max_trials.unwrap_or(budget));
        if self.sequential {
            params = params.with_execution(Execution::Sequential);
        }
        Ok((spec, self.count.unwrap_or(count), params))
    }
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long, value_enum, default_value = "both")]
    algo: AlgoChoice,
    #[command(flatten)]
    run: ClassRunArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    Eta,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    param: SweepParam,
    /// Comma-separated parameter values.
    #[arg(long)]
    values: String,
    #[command(flatten)]
    run: ClassRunArgs,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: mgas_core::Error| e.to_string())
}

fn parse_box(bounds: &[String], dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if bounds.is_empty() {
        return Ok((vec![0.0; dim], vec![1.0; dim]));
    }
    if bounds.len() != 1 && bounds.len() != dim {
        bail!(
            "--box given {} times; expected once or {dim} times",
            bounds.len()
        );
    }
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for j in 0..dim {
        let pair = parse_values(&bounds[j.min(bounds.len() - 1)])?;
        let [a, b] = pair[..] else {
            bail!("--box expects LO,HI")
        };
        lo.push(a);
        hi.push(b);
    }
    Ok((lo, hi))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn curve_dump(args: &CurveDumpArgs) -> Result<()> {
    let bits = args.dim as u64 * args.level as u64;
    if bits > DUMP_LIMIT_BITS as u64 && !args.force {
        bail!("dump would have 2^{bits} rows; pass --force to write it anyway");
    }
    let (lo, hi) = parse_box(&args.bounds, args.dim)?;
    let cm = CurveMap::new(args.dim, args.level, lo, hi)?;
    let mut out = output(args.out.as_deref())?;
    write!(out, "index,x")?;
    for j in 1..=args.dim {
        write!(out, ",coord_{j}")?;
    }
    writeln!(out)?;
    let cells = cm.cell_count();
    for i in 0..cells {
        // x is the midpoint of the cell's subinterval of [0, 1]
        write!(out, "{i},{}", (i as f64 + 0.5) / cells as f64)?;
        for v in cm.cell_center(i)? {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn optimize(args: &OptimizeArgs) -> Result<()> {
    if args.hull_dump.is_some() && args.algo != Algorithm::Mgas {
        bail!("--hull-dump is only available with --algo mgas");
    }
    let (objective, lo, hi, minimizer, radius, eta): (Box<dyn Objective>, _, _, _, _, _) =
        match args.function {
            FunctionKind::Gkls => {
                let spec = args.gkls.spec()?;
                let g = generate(&spec, args.gkls.index)?;
                let (lo, hi) = g.domain();
                let minimizer = g.global_minimizer().to_vec();
                (
                    Box::new(g),
                    lo,
                    hi,
                    minimizer,
                    default_radius(&spec),
                    default_eta(&spec),
                )
            }
            FunctionKind::Paraboloid => {
                let (lo, hi) = parse_box(&args.bounds, args.dim)?;
                let center = match &args.center {
                    Some(c) => parse_values(c)?,
                    None => lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect(),
                };
                if center.len() != args.dim {
                    bail!(
                        "--center has {} coordinates, expected {}",
                        center.len(),
                        args.dim
                    );
                }
                let radius = 0.01 * (args.dim as f64).sqrt();
                let eta = mgas_core::mgas::default_eta(args.dim);
                (
                    Box::new(Paraboloid::new(center.clone())),
                    lo,
                    hi,
                    center,
                    radius,
                    eta,
                )
            }
        };
    let stop = if args.no_ball {
        StoppingRule::budget(args.max_trials)
    } else {
        let target = match &args.target {
            Some(t) => parse_values(t)?,
            None => minimizer,
        };
        if target.len() != lo.len() {
            bail!(
                "--target has {} coordinates, expected {}",
                target.len(),
                lo.len()
            );
        }
        StoppingRule::ball(target, args.radius.unwrap_or(radius), args.max_trials)?
    };
    let result: RunResult = match args.algo {
        Algorithm::Mgas => {
            let cfg = MgasConfig::new(lo, hi)
                .with_level(args.level)
                .with_epsilon(args.epsilon)
                .with_eta(args.eta.unwrap_or(eta))
                .with_max_trials(args.max_trials);
            let (result, hulls) = run_recording_hulls(&cfg, objective.as_ref(), &stop)?;
            if let Some(p) = &args.hull_dump {
                write_selection_csv(output(Some(p))?, &hulls)?;
            }
            result
        }
        Algorithm::Direct => {
            let cfg = DirectConfig::new(lo, hi)
                .with_epsilon(args.epsilon)
                .with_max_trials(args.max_trials);
            direct_run(&cfg, objective.as_ref(), &stop)?
        }
    };
    if let Some(p) = &args.trace {
        result.write_trace_csv(output(Some(p))?)?;
    }
    let mut out = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &result)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn gkls(cmd: &GklsCommand) -> Result<()> {
    match cmd {
        GklsCommand::Gen { select } => {
            let g = generate(&select.spec()?, select.index)?;
            let mut out = output(None)?;
            serde_json::to_writer_pretty(&mut out, &g)?;
            writeln!(out)?;
            out.flush()?;
        }
        GklsCommand::Eval { select } => {
            let g = generate(&select.spec()?, select.index)?;
            let mut out = output(None)?;
            let header: Vec<String> = (1..=g.dim()).map(|j| format!("y_{j}")).collect();
            writeln!(out, "{},f", header.join(","))?;
            for (n, line) in io::stdin().lock().lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let y = match parse_values(&line) {
                    Ok(y) => y,
                    // a header row
                    Err(_) if n == 0 => continue,
                    Err(e) => return Err(e).with_context(|| format!("line {}", n + 1)),
                };
                let f = g.evaluate(&y).with_context(|| format!("line {}", n + 1))?;
                let cells: Vec<String> = y.iter().map(f64::to_string).collect();
                writeln!(out, "{},{f}", cells.join(","))?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    let (spec, count, params) = args.run.setup()?;
    let mut reports = Vec::new();
    for algo in args.algo.algorithms() {
        let rep = run_class(algo, &spec, count, &params)?;
        println!(
            "class {} {:<6} solved {:>3}/{count}  average {:>10}  maximum {:>10}",
            rep.class,
            algo,
            rep.solved_count(),
            rep.average_label(),
            rep.maximum_label()
        );
        reports.push(rep);
    }
    write_benchmark(
        &args.run.out,
        &reports,
        &default_budget_grid(params.max_trials),
    )?;
    println!("wrote {}", args.run.out.display());
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let SweepParam::Eta = args.param;
    let (spec, count, params) = args.run.setup()?;
    let values = parse_values(&args.values)?;
    let rows = eta_sweep(&spec, &values, count, &params)?;
    for r in &rows {
        // unsolved runs are charged the full budget, so the average is a lower bound
        let mark = if r.unsolved > 0 { ">" } else { "" };
        println!(
            "eta {:<8e} average {:>10}  maximum {:>8}  unsolved {:>3}  stagnated {:>3}",
            r.eta,
            format!("{mark}{:.2}", r.average),
            r.maximum,
            r.unsolved,
            r.stagnated
        );
    }
    fs::create_dir_all(&args.run.out)?;
    let path = args.run.out.join("sweep.csv");
    write_sweep_csv(File::create(&path)?, &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::CurveDump(a) => curve_dump(&a),
        Command::Optimize(a) => optimize(&a),
        Command::Gkls(c) => gkls(&c),
        Command::Benchmark(a) => benchmark(&a),
        Command::Sweep(a) => sweep(&a),
    }
}

//! Command-line front end: flag parsing, experiment wiring and trace output.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{conjugate_gradient_with_trace, pg_dual_tv, CgConfig, PgDualConfig};
use crate::error::Error;
use crate::graph::{read_edge_list_file, sample_sbm, write_edge_list, Graph};
use crate::problems::{
    calibrate_lambda, gaussian_signal, read_mask_csv, read_signal_csv, write_signal_csv,
    Inpainting, LaplacianSystem, TrendFiltering,
};
use crate::snake::{run as run_snake, Problem, SolverConfig, StepSchedule};
use crate::trace::Trace;

/// Failure of a CLI invocation, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inconsistent configuration; exit code 2.
    Config(String),
    /// Anything that goes wrong while running; exit code 1.
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(err) => write!(f, "error: {err}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Runtime(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A count that may refer to the graph size: `12`, `V`, `0.5V`, `2E`,
/// with `V = |V|` and `E = |E|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub factor: f64,
    pub unit: Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    One,
    Nodes,
    Edges,
}

impl Scaled {
    pub fn resolve(&self, graph: &Graph) -> f64 {
        self.factor
            * match self.unit {
                Unit::One => 1.0,
                Unit::Nodes => graph.num_nodes() as f64,
                Unit::Edges => graph.num_edges() as f64,
            }
    }
}

impl FromStr for Scaled {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, unit) = match s {
            "nodes" => ("1", Unit::Nodes),
            "edges" => ("1", Unit::Edges),
            _ if s.ends_with('V') => (&s[..s.len() - 1], Unit::Nodes),
            _ if s.ends_with('E') => (&s[..s.len() - 1], Unit::Edges),
            _ => (s, Unit::One),
        };
        let num = if num.is_empty() { "1" } else { num };
        let factor: f64 = num.parse().map_err(|_| format!("invalid quantity {s:?}"))?;
        if !(factor.is_finite() && factor > 0.0) {
            return Err(format!("quantity must be positive, got {s:?}"));
        }
        Ok(Scaled { factor, unit })
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            Unit::One => write!(f, "{}", self.factor),
            Unit::Nodes => write!(f, "{}V", self.factor),
            Unit::Edges => write!(f, "{}E", self.factor),
        }
    }
}

/// Walk length flag: resolved against the graph and rounded to an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSpec(pub Scaled);

impl BudgetSpec {
    pub fn resolve(&self, graph: &Graph) -> CliResult<usize> {
        let l = self.0.resolve(graph).round();
        if l < 1.0 {
            return Err(CliError::Config(format!(
                "walk length {} resolves to {l}",
                self.0
            )));
        }
        Ok(l as usize)
    }
}

impl FromStr for BudgetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(BudgetSpec)
    }
}

/// `inv_n:<scale>` or `inv_sqrt_n:<scale>[@<switch>]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSpec {
    pub inverse_sqrt: bool,
    pub scale: Scaled,
    pub switch_at: Option<usize>,
}

impl ScheduleSpec {
    pub fn resolve(&self, graph: &Graph) -> StepSchedule {
        let c = self.scale.resolve(graph);
        if self.inverse_sqrt {
            let s = StepSchedule::inverse_sqrt_n(c);
            match self.switch_at {
                Some(k) => s.switching_at(k),
                None => s,
            }
        } else {
            StepSchedule::inverse_n(c)
        }
    }
}

impl FromStr for ScheduleSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| {
            format!("expected inv_n:<scale> or inv_sqrt_n:<scale>[@<n>], got {s:?}")
        })?;
        match kind {
            "inv_n" => Ok(ScheduleSpec {
                inverse_sqrt: false,
                scale: rest.parse()?,
                switch_at: None,
            }),
            "inv_sqrt_n" => {
                let (scale, switch_at) = match rest.split_once('@') {
                    Some((c, k)) => (
                        c,
                        Some(
                            k.parse()
                                .map_err(|_| format!("invalid switch iteration {k:?}"))?,
                        ),
                    ),
                    None => (rest, None),
                };
                Ok(ScheduleSpec {
                    inverse_sqrt: true,
                    scale: scale.parse()?,
                    switch_at,
                })
            }
            _ => Err(format!("unknown schedule {kind:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Auto,
    Value(f64),
}

impl LambdaSpec {
    pub fn resolve(&self, graph: &Graph) -> CliResult<f64> {
        match *self {
            LambdaSpec::Auto => Ok(calibrate_lambda(graph)?),
            LambdaSpec::Value(v) => Ok(v),
        }
    }
}

impl FromStr for LambdaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(LambdaSpec::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| format!("expected `auto` or a number, got {s:?}"))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(format!("lambda must be positive, got {v}"));
        }
        Ok(LambdaSpec::Value(v))
    }
}

/// SBM block sizes: `4x1000` or `100,200,150`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpec(pub Vec<usize>);

impl FromStr for BlockSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected <count>x<size> or a comma-separated list, got {s:?}");
        let sizes: Vec<usize> = match s.split_once('x') {
            Some((count, size)) => {
                let count: usize = count.parse().map_err(|_| bad())?;
                let size: usize = size.parse().map_err(|_| bad())?;
                vec![size; count]
            }
            None => s
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
        };
        if sizes.is_empty() || sizes.iter().all(|&b| b == 0) {
            return Err(bad());
        }
        Ok(BlockSpec(sizes))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "snake",
    version,
    about = "Snake: stochastic proximal gradient on graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph trend filtering (TV-regularized denoising).
    Gtf(GtfArgs),
    /// Harmonic inpainting of a partially observed signal.
    Inpaint(InpaintArgs),
    /// Solve L x = b for the graph Laplacian.
    Lapsys(LapsysArgs),
    /// Sample a stochastic block model and write it as an edge list.
    GenSbm(GenSbmArgs),
    /// Run several solvers on one problem and write aligned traces.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
#[group(id = "graph_source", required = true, multiple = false)]
pub struct GraphSource {
    /// Edge-list file.
    #[arg(long, group = "graph_source")]
    pub graph: Option<PathBuf>,
    /// Sample an SBM with these block sizes instead of reading a file.
    #[arg(long, group = "graph_source")]
    pub sbm: Option<BlockSpec>,
}

#[derive(Debug, Clone, Args)]
pub struct SbmParams {
    #[arg(long, default_value_t = 0.1)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.005)]
    pub p_out: f64,
    #[arg(long, default_value_t = 1)]
    pub sbm_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SignalSource {
    /// `node,value` CSV keyed by node id.
    #[arg(long, conflicts_with = "gaussian_seed")]
    pub signal: Option<PathBuf>,
    /// Standard Gaussian signal from this seed (the default, with seed 0).
    #[arg(long)]
    pub gaussian_seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SnakeParams {
    /// Walk length per outer iteration: an integer, `nodes`, `edges`, `0.1V`, `2E`.
    #[arg(long = "L", default_value = "nodes")]
    pub budget: BudgetSpec,
    /// `inv_n:<c>` or `inv_sqrt_n:<c>[@<n>]`; `c` may use `V` and `E`.
    #[arg(long, default_value = "inv_n:E")]
    pub schedule: ScheduleSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Outer iterations for Snake, iterations for the baselines.
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    /// Seconds.
    #[arg(long)]
    pub max_time: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub eval_every: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Trace CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the final signal as a `node,value` CSV.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GtfSolver {
    Snake,
    PgDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuadraticSolver {
    Snake,
    Cg,
}

#[derive(Debug, Clone, Args)]
pub struct GtfArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[command(flatten)]
    pub sbm: SbmParams,
    #[command(flatten)]
    pub signal: SignalSource,
    /// `auto` or a positive value.
    #[arg(long, default_value = "auto")]
    pub lambda: LambdaSpec,
    #[arg(long, value_enum, default_value_t = GtfSolver::Snake)]
    pub solver: GtfSolver,
    /// Duality-gap tolerance for pg-dual.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub snake: SnakeParams,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct MaskSource {
    /// `node,observed` CSV with 0/1 flags.
    #[arg(long, conflicts_with = "observed_fraction")]
    pub mask: Option<PathBuf>,
    /// Observe each node with this probability.
    #[arg(long)]
    pub observed_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub mask_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct InpaintArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[command(flatten)]
    pub sbm: SbmParams,
    #[command(flatten)]
    pub signal: SignalSource,
    #[command(flatten)]
    pub mask: MaskSource,
    #[arg(long, value_enum, default_value_t = QuadraticSolver::Snake)]
    pub solver: QuadraticSolver,
    /// Relative residual tolerance for cg.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub snake: SnakeParams,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct LapsysArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[command(flatten)]
    pub sbm: SbmParams,
    /// Right-hand side as a `node,value` CSV; Gaussian otherwise.
    #[arg(long = "rhs", conflicts_with = "gaussian_seed")]
    pub rhs: Option<PathBuf>,
    #[arg(long)]
    pub gaussian_seed: Option<u64>,
    /// Subtract the mean of the right-hand side instead of rejecting it.
    #[arg(long)]
    pub center: bool,
    #[arg(long, value_enum, default_value_t = QuadraticSolver::Snake)]
    pub solver: QuadraticSolver,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub snake: SnakeParams,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct GenSbmArgs {
    /// Block sizes: `4x1000` or `100,200`.
    #[arg(long)]
    pub blocks: BlockSpec,
    #[arg(long, default_value_t = 0.1)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.005)]
    pub p_out: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output path; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchProblem {
    Gtf,
    Inpaint,
    Lapsys,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchSolver {
    Snake,
    PgDual,
    Cg,
}

impl BenchSolver {
    fn name(self) -> &'static str {
        match self {
            BenchSolver::Snake => "snake",
            BenchSolver::PgDual => "pg-dual",
            BenchSolver::Cg => "cg",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub problem: BenchProblem,
    #[command(flatten)]
    pub graph: GraphSource,
    #[command(flatten)]
    pub sbm: SbmParams,
    #[command(flatten)]
    pub signal: SignalSource,
    #[command(flatten)]
    pub mask: MaskSource,
    #[arg(long, default_value = "auto")]
    pub lambda: LambdaSpec,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "snake")]
    pub solvers: Vec<BenchSolver>,
    /// One Snake trace per walk length.
    #[arg(long = "L", value_delimiter = ',', default_value = "nodes")]
    pub budgets: Vec<BudgetSpec>,
    #[arg(long, default_value = "inv_n:E")]
    pub schedule: ScheduleSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    /// Give every Snake run the same number of walk steps (e.g. `500V`):
    /// its outer iteration cap becomes `ceil(steps / L)`.
    #[arg(long)]
    pub walk_steps: Option<Scaled>,
    #[arg(long)]
    pub max_time: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub eval_every: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Directory receiving one `<solver>.csv` per run.
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Final state of one solver run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub label: String,
    pub trace: Trace,
    /// Indexed by the nodes of the input graph.
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub seconds: f64,
}

impl RunOutcome {
    pub fn summary(&self) -> String {
        let objective = self.trace.last().map_or(f64::NAN, |r| r.objective);
        format!(
            "FINAL objective={objective:.10e} iters={} seconds={:.3}",
            self.iterations, self.seconds
        )
    }
}

fn load_graph(source: &GraphSource, sbm: &SbmParams) -> CliResult<Graph> {
    match (&source.graph, &source.sbm) {
        (Some(path), None) => Ok(read_edge_list_file(path)?),
        (None, Some(blocks)) => {
            for p in [sbm.p_in, sbm.p_out] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(CliError::Config(format!("probability {p} outside [0, 1]")));
                }
            }
            Ok(sample_sbm(&blocks.0, sbm.p_in, sbm.p_out, sbm.sbm_seed)?)
        }
        _ => Err(CliError::Config(
            "exactly one of --graph and --sbm is required".into(),
        )),
    }
}

fn load_signal(graph: &Graph, path: Option<&Path>, seed: Option<u64>) -> CliResult<Vec<f64>> {
    match path {
        Some(path) => Ok(read_signal_csv(graph, File::open(path)?)?),
        None => Ok(gaussian_signal(graph.num_nodes(), seed.unwrap_or(0))),
    }
}

fn load_mask(graph: &Graph, mask: &MaskSource) -> CliResult<Vec<bool>> {
    match (&mask.mask, mask.observed_fraction) {
        (Some(path), _) => Ok(read_mask_csv(graph, File::open(path)?)?),
        (None, fraction) => {
            let f = fraction.unwrap_or(0.5);
            if !(0.0..=1.0).contains(&f) {
                return Err(CliError::Config(format!(
                    "observed fraction {f} outside [0, 1]"
                )));
            }
            Ok(Inpainting::random_mask(
                graph.num_nodes(),
                f,
                mask.mask_seed,
            ))
        }
    }
}

struct SnakeSettings {
    budget: BudgetSpec,
    schedule: ScheduleSpec,
    seed: u64,
    max_iters: usize,
    max_time: Option<f64>,
    eval_every: usize,
}

impl From<&SnakeParams> for SnakeSettings {
    fn from(p: &SnakeParams) -> Self {
        SnakeSettings {
            budget: p.budget,
            schedule: p.schedule,
            seed: p.seed,
            max_iters: p.max_iters,
            max_time: p.max_time,
            eval_every: p.eval_every,
        }
    }
}

impl SnakeSettings {
    /// Symbolic sizes resolve against `sizes`, the user's input graph.
    fn config(&self, sizes: &Graph) -> CliResult<SolverConfig> {
        let config = SolverConfig::new(self.budget.resolve(sizes)?, self.schedule.resolve(sizes))
            .with_seed(self.seed)
            .with_max_outer_iterations(self.max_iters)
            .with_max_wall_time(self.max_time.unwrap_or(f64::INFINITY))
            .with_eval_every(self.eval_every);
        config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }
}

fn check_tolerance(tol: f64) -> CliResult<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "tolerance must be >= 0, got {tol}"
        )))
    }
}

fn snake_outcome<P: Problem + ?Sized>(
    label: String,
    problem: &P,
    config: &SolverConfig,
    lift: impl Fn(&[f64]) -> Vec<f64>,
) -> CliResult<RunOutcome> {
    log::info!(
        "{label}: L = {}, schedule = {:?}",
        config.budget,
        config.schedule
    );
    let result = run_snake(problem, config)?;
    let seconds = result.trace.last().map_or(0.0, |r| r.wall_seconds);
    Ok(RunOutcome {
        label,
        solution: lift(&result.iterate),
        iterations: result.outer_iterations,
        seconds,
        trace: result.trace,
    })
}

fn gtf_pg(
    graph: &Graph,
    y: &[f64],
    lambda: f64,
    max_iters: usize,
    max_time: Option<f64>,
    eval_every: usize,
    tol: f64,
) -> CliResult<RunOutcome> {
    let config = PgDualConfig {
        max_iterations: max_iters,
        gap_tolerance: tol,
        eval_every,
        max_wall_time: max_time.unwrap_or(f64::INFINITY),
    };
    let result = pg_dual_tv(graph, y, lambda, None, &config)?;
    if !result.converged {
        log::warn!("pg-dual stopped with duality gap {:.3e}", result.gap);
    }
    Ok(RunOutcome {
        label: "pg-dual".into(),
        seconds: result.trace.last().map_or(0.0, |r| r.wall_seconds),
        iterations: result.iterations,
        solution: result.x,
        trace: result.trace,
    })
}

fn inpaint_cg(problem: &Inpainting<'_>, max_iters: usize, tol: f64) -> CliResult<RunOutcome> {
    let x0 = vec![0.0; problem.free_nodes().len()];
    let config = CgConfig {
        max_iterations: max_iters,
        tolerance: tol,
        ..CgConfig::default()
    };
    let (result, trace) = conjugate_gradient_with_trace(
        |x, out| problem.harmonic_apply(x, out),
        problem.harmonic_rhs(),
        &x0,
        &config,
        |x| problem.objective(x),
    )?;
    if result.breakdown {
        log::warn!("cg broke down after {} iterations", result.iterations);
    }
    Ok(RunOutcome {
        label: "cg".into(),
        seconds: trace.last().map_or(0.0, |r| r.wall_seconds),
        iterations: result.iterations,
        solution: problem.assemble(&result.x),
        trace,
    })
}

fn lapsys_cg(problem: &LaplacianSystem<'_>, max_iters: usize, tol: f64) -> CliResult<RunOutcome> {
    let graph = problem.graph();
    let x0 = vec![0.0; graph.num_nodes()];
    let config = CgConfig {
        max_iterations: max_iters,
        tolerance: tol,
        ..CgConfig::default()
    };
    let (result, trace) = conjugate_gradient_with_trace(
        |x, out| graph.laplacian_apply(x, out),
        problem.rhs(),
        &x0,
        &config,
        |x| problem.residual(x),
    )?;
    if result.breakdown {
        log::warn!("cg broke down after {} iterations", result.iterations);
    }
    Ok(RunOutcome {
        label: "cg".into(),
        seconds: trace.last().map_or(0.0, |r| r.wall_seconds),
        iterations: result.iterations,
        solution: result.x,
        trace,
    })
}

pub fn run_gtf(args: &GtfArgs) -> CliResult<RunOutcome> {
    check_tolerance(args.tol)?;
    let graph = load_graph(&args.graph, &args.sbm)?;
    let y = load_signal(
        &graph,
        args.signal.signal.as_deref(),
        args.signal.gaussian_seed,
    )?;
    let lambda = args.lambda.resolve(&graph)?;
    log::info!(
        "gtf: |V| = {}, |E| = {}, lambda = {lambda}",
        graph.num_nodes(),
        graph.num_edges()
    );
    let outcome = match args.solver {
        GtfSolver::Snake => {
            let config = SnakeSettings::from(&args.snake).config(&graph)?;
            let problem = TrendFiltering::new(&graph, y, lambda)?;
            snake_outcome("snake".into(), &problem, &config, <[f64]>::to_vec)?
        }
        GtfSolver::PgDual => gtf_pg(
            &graph,
            &y,
            lambda,
            args.snake.max_iters,
            args.snake.max_time,
            args.snake.eval_every,
            args.tol,
        )?,
    };
    finish(&graph, outcome, &args.output)
}

pub fn run_inpaint(args: &InpaintArgs) -> CliResult<RunOutcome> {
    check_tolerance(args.tol)?;
    let graph = load_graph(&args.graph, &args.sbm)?;
    let y = load_signal(
        &graph,
        args.signal.signal.as_deref(),
        args.signal.gaussian_seed,
    )?;
    let mask = load_mask(&graph, &args.mask)?;
    let problem = Inpainting::new(&graph, y, mask)?;
    log::info!(
        "inpaint: {} unobserved nodes, {} edges among them",
        problem.free_nodes().len(),
        problem.graph().num_edges()
    );
    let outcome = match args.solver {
        QuadraticSolver::Snake => {
            let config = SnakeSettings::from(&args.snake).config(&graph)?;
            snake_outcome("snake".into(), &problem, &config, |x| problem.assemble(x))?
        }
        QuadraticSolver::Cg => inpaint_cg(&problem, args.snake.max_iters, args.tol)?,
    };
    finish(&graph, outcome, &args.output)
}

pub fn run_lapsys(args: &LapsysArgs) -> CliResult<RunOutcome> {
    check_tolerance(args.tol)?;
    let graph = load_graph(&args.graph, &args.sbm)?;
    let b = load_signal(&graph, args.rhs.as_deref(), args.gaussian_seed)?;
    // a generated right-hand side is always centered
    let center = args.center || args.rhs.is_none();
    let problem = LaplacianSystem::new(&graph, b, center)?;
    let outcome = match args.solver {
        QuadraticSolver::Snake => {
            let config = SnakeSettings::from(&args.snake).config(&graph)?;
            snake_outcome("snake".into(), &problem, &config, <[f64]>::to_vec)?
        }
        QuadraticSolver::Cg => lapsys_cg(&problem, args.snake.max_iters, args.tol)?,
    };
    finish(&graph, outcome, &args.output)
}

pub fn run_gen_sbm(args: &GenSbmArgs) -> CliResult<Graph> {
    for p in [args.p_in, args.p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Config(format!("probability {p} outside [0, 1]")));
        }
    }
    let graph = sample_sbm(&args.blocks.0, args.p_in, args.p_out, args.seed)?;
    match &args.out {
        Some(path) => write_edge_list(&graph, BufWriter::new(File::create(path)?))?,
        None => write_edge_list(&graph, std::io::stdout().lock())?,
    }
    Ok(graph)
}

pub fn run_bench(args: &BenchArgs) -> CliResult<Vec<RunOutcome>> {
    check_tolerance(args.tol)?;
    let graph = load_graph(&args.graph, &args.sbm)?;
    let signal = load_signal(
        &graph,
        args.signal.signal.as_deref(),
        args.signal.gaussian_seed,
    )?;
    for solver in &args.solvers {
        let ok = matches!(
            (args.problem, solver),
            (_, BenchSolver::Snake)
                | (BenchProblem::Gtf, BenchSolver::PgDual)
                | (
                    BenchProblem::Inpaint | BenchProblem::Lapsys,
                    BenchSolver::Cg
                )
        );
        if !ok {
            return Err(CliError::Config(format!(
                "solver {} does not apply to {:?}",
                solver.name(),
                args.problem
            )));
        }
    }
    let settings: Vec<(String, SolverConfig)> = args
        .budgets
        .iter()
        .map(|&budget| {
            let max_iters = match args.walk_steps {
                Some(steps) => {
                    let l = budget.resolve(&graph)? as f64;
                    (steps.resolve(&graph) / l).ceil() as usize
                }
                None => args.max_iters,
            };
            let s = SnakeSettings {
                budget,
                schedule: args.schedule,
                seed: args.seed,
                max_iters,
                max_time: args.max_time,
                eval_every: args.eval_every,
            };
            let config = s.config(&graph)?;
            let label = if args.budgets.len() > 1 {
                format!("snake_L{}", config.budget)
            } else {
                "snake".into()
            };
            Ok((label, config))
        })
        .collect::<CliResult<_>>()?;
    std::fs::create_dir_all(&args.out_dir)?;

    let gtf = match args.problem {
        BenchProblem::Gtf => {
            let lambda = args.lambda.resolve(&graph)?;
            Some(TrendFiltering::new(&graph, signal.clone(), lambda)?)
        }
        _ => None,
    };
    let inpaint = match args.problem {
        BenchProblem::Inpaint => {
            let mask = load_mask(&graph, &args.mask)?;
            Some(Inpainting::new(&graph, signal.clone(), mask)?)
        }
        _ => None,
    };
    let lapsys = match args.problem {
        BenchProblem::Lapsys => Some(LaplacianSystem::new(&graph, signal.clone(), true)?),
        _ => None,
    };
    let problem: &(dyn Problem + Sync) = match (&gtf, &inpaint, &lapsys) {
        (Some(p), _, _) => p,
        (_, Some(p), _) => p,
        (_, _, Some(p)) => p,
        _ => unreachable!("one problem is always built"),
    };
    let lift = |x: &[f64]| match &inpaint {
        Some(p) => p.assemble(x),
        None => x.to_vec(),
    };

    let outcomes: Vec<CliResult<RunOutcome>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for solver in &args.solvers {
            match solver {
                BenchSolver::Snake => {
                    for (label, config) in &settings {
                        let lift = &lift;
                        handles
                            .push(scope.spawn(move || {
                                snake_outcome(label.clone(), problem, config, lift)
                            }));
                    }
                }
                BenchSolver::PgDual => {
                    let p = gtf.as_ref().expect("checked above");
                    handles.push(scope.spawn(move || {
                        gtf_pg(
                            p.graph(),
                            p.y(),
                            p.lambda(),
                            args.max_iters,
                            args.max_time,
                            args.eval_every,
                            args.tol,
                        )
                    }));
                }
                BenchSolver::Cg => {
                    let (inpaint, lapsys) = (&inpaint, &lapsys);
                    handles.push(scope.spawn(move || match (inpaint, lapsys) {
                        (Some(p), _) => inpaint_cg(p, args.max_iters, args.tol),
                        (_, Some(p)) => lapsys_cg(p, args.max_iters, args.tol),
                        _ => unreachable!("checked above"),
                    }));
                }
            }
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    let mut results = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        let path = args.out_dir.join(format!("{}.csv", outcome.label));
        write_trace(&outcome.trace, &path)?;
        results.push(outcome);
    }
    Ok(results)
}

fn write_trace(trace: &Trace, path: &Path) -> CliResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    trace.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn finish(graph: &Graph, outcome: RunOutcome, output: &Output) -> CliResult<RunOutcome> {
    if let Some(path) = &output.out {
        write_trace(&outcome.trace, path)?;
    }
    if let Some(path) = &output.solution {
        let mut out = BufWriter::new(File::create(path)?);
        write_signal_csv(graph, &outcome.solution, &mut out)?;
        out.flush()?;
    }
    Ok(outcome)
}

/// Runs a parsed command, printing summary lines to standard output.
pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gtf(args) => println!("{}", run_gtf(args)?.summary()),
        Command::Inpaint(args) => println!("{}", run_inpaint(args)?.summary()),
        Command::Lapsys(args) => println!("{}", run_lapsys(args)?.summary()),
        Command::GenSbm(args) => {
            let graph = run_gen_sbm(args)?;
            log::info!(
                "sampled {} nodes, {} edges",
                graph.num_nodes(),
                graph.num_edges()
            );
        }
        Command::Bench(args) => {
            for outcome in run_bench(args)? {
                println!("{} solver={}", outcome.summary(), outcome.label);
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
    }
}

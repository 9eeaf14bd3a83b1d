//! The Snake outer loop.
//!
//! Each outer iteration consumes a random walk of `L` edges started from the
//! stationary law, but never materializes it: the walk is streamed as
//! consecutive simple paths. For every path `c` the iterate takes a partial
//! gradient step of size `γ len(c) / (L |E|)` on all coordinates, then the
//! exact prox of `(γ / L) R(·, φ_c)` on the path coordinates. The step `γ`
//! stays fixed within an outer iteration and follows the schedule across
//! iterations.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::regularizers::Regularizer;
use crate::trace::{Trace, TraceRecord};
use crate::walks::{rnd_oriented_edge, sample_walk, PathSampler, SimplePath};

/// A composite problem `min F(x) + R(x)` over the nodes of `graph()`.
pub trait Problem {
    /// Graph the walks run on; variables are indexed by its nodes.
    fn graph(&self) -> &Graph;

    fn regularizer(&self) -> &Regularizer;

    fn initial_point(&self) -> Vec<f64>;

    /// The smooth part `F(x)`.
    fn smooth_value(&self, x: &[f64]) -> f64;

    /// Writes `∇F(x)` into `out`.
    fn gradient(&self, x: &[f64], out: &mut [f64]);

    /// The quantity reported in traces.
    fn objective(&self, x: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `γ_n = c / n`
    InverseN,
    /// `γ_n = c / √n`, optionally handing over to a `1/n` decay.
    InverseSqrtN,
}

/// Decreasing step sizes `γ_1, γ_2, ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub kind: ScheduleKind,
    pub scale: f64,
    /// For [`ScheduleKind::InverseSqrtN`]: after iteration `s` the step
    /// continues as `c √s / n`, which is continuous at `n = s`.
    pub switch_at: Option<usize>,
}

impl StepSchedule {
    pub fn inverse_n(scale: f64) -> Self {
        Self {
            kind: ScheduleKind::InverseN,
            scale,
            switch_at: None,
        }
    }

    pub fn inverse_sqrt_n(scale: f64) -> Self {
        Self {
            kind: ScheduleKind::InverseSqrtN,
            scale,
            switch_at: None,
        }
    }

    pub fn switching_at(mut self, iteration: usize) -> Self {
        self.switch_at = Some(iteration);
        self
    }

    /// Step size of outer iteration `n >= 1`.
    pub fn gamma(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        match (self.kind, self.switch_at) {
            (ScheduleKind::InverseN, _) => self.scale / n,
            (ScheduleKind::InverseSqrtN, Some(s)) if n > s as f64 => {
                self.scale * (s.max(1) as f64).sqrt() / n
            }
            (ScheduleKind::InverseSqrtN, _) => self.scale / n.sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step scale must be positive, got {}",
                self.scale
            )));
        }
        if self.kind == ScheduleKind::InverseN && self.switch_at.is_some() {
            return Err(Error::InvalidParameter(
                "switch_at only applies to the 1/sqrt(n) schedule".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Walk length `L` per outer iteration.
    pub budget: usize,
    pub schedule: StepSchedule,
    pub seed: u64,
    pub max_outer_iterations: usize,
    /// Seconds; checked between outer iterations.
    pub max_wall_time: f64,
    /// Outer iterations between objective evaluations.
    pub eval_every: usize,
}

impl SolverConfig {
    pub fn new(budget: usize, schedule: StepSchedule) -> Self {
        Self {
            budget,
            schedule,
            seed: 0,
            max_outer_iterations: 1000,
            max_wall_time: f64::INFINITY,
            eval_every: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_outer_iterations(mut self, n: usize) -> Self {
        self.max_outer_iterations = n;
        self
    }

    pub fn with_max_wall_time(mut self, seconds: f64) -> Self {
        self.max_wall_time = seconds;
        self
    }

    pub fn with_eval_every(mut self, every: usize) -> Self {
        self.eval_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidParameter(
                "walk budget L must be at least 1".into(),
            ));
        }
        if self.eval_every == 0 {
            return Err(Error::InvalidParameter(
                "eval_every must be at least 1".into(),
            ));
        }
        if self.max_wall_time.is_nan() || self.max_wall_time < 0.0 {
            return Err(Error::InvalidParameter("max_wall_time must be >= 0".into()));
        }
        self.schedule.validate()
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub z: Vec<f64>,
    /// Completed outer iterations.
    pub n: usize,
    /// Walk edges left in the current outer iteration.
    pub remaining_budget: usize,
    pub current_edge: (usize, usize),
    pub rng: ChaCha8Rng,
}

/// What one segment step did.
#[derive(Debug, Clone)]
pub struct SegmentStep {
    pub path: SimplePath,
    pub gamma: f64,
    /// The step closed an outer iteration.
    pub completed_iteration: bool,
}

pub struct Snake<'p, P: Problem + ?Sized> {
    problem: &'p P,
    config: SolverConfig,
    state: SolverState,
    sampler: PathSampler,
    grad: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'p, P: Problem + ?Sized> Snake<'p, P> {
    pub fn new(problem: &'p P, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let z = problem.initial_point();
        let graph = problem.graph();
        if z.len() != graph.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_nodes(),
                actual: z.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let current_edge = rnd_oriented_edge(graph, &mut rng)?;
        let state = SolverState {
            z,
            n: 0,
            remaining_budget: config.budget,
            current_edge,
            rng,
        };
        Ok(Self {
            problem,
            grad: vec![0.0; graph.num_nodes()],
            scratch: Vec::new(),
            sampler: PathSampler::new(),
            config,
            state,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn iterate(&self) -> &[f64] {
        &self.state.z
    }

    pub fn into_iterate(self) -> Vec<f64> {
        self.state.z
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Step size of the outer iteration in progress, `γ_{n+1}`.
    pub fn current_gamma(&self) -> f64 {
        self.config.schedule.gamma(self.state.n + 1)
    }

    /// Draws the next simple path, applies the scaled gradient step to every
    /// coordinate and the path prox with step `gamma / L`, and advances the
    /// budget bookkeeping.
    pub fn step_segment(&mut self, gamma: f64) -> Result<SegmentStep> {
        let graph = self.problem.graph();
        let budget = self.config.budget;
        let state = &mut self.state;
        let (path, next) = self.sampler.sample(
            graph,
            state.current_edge,
            state.remaining_budget,
            &mut state.rng,
        )?;

        self.problem.gradient(&state.z, &mut self.grad);
        let factor = gamma * path.len() as f64 / (budget as f64 * graph.num_edges() as f64);
        for (z, g) in state.z.iter_mut().zip(&self.grad) {
            *z -= factor * g;
        }
        self.problem.regularizer().prox_on_path_in_place(
            graph,
            &path,
            &mut state.z,
            gamma / budget as f64,
            &mut self.scratch,
        )?;

        state.remaining_budget -= path.len();
        let completed_iteration = match next {
            Some(edge) if state.remaining_budget > 0 => {
                state.current_edge = edge;
                false
            }
            _ => {
                debug_assert_eq!(state.remaining_budget, 0);
                state.current_edge = rnd_oriented_edge(graph, &mut state.rng)?;
                state.remaining_budget = budget;
                state.n += 1;
                true
            }
        };
        Ok(SegmentStep {
            path,
            gamma,
            completed_iteration,
        })
    }

    /// Runs segment steps until the current outer iteration completes and
    /// returns the number of segments used.
    pub fn outer_iteration(&mut self) -> Result<usize> {
        let gamma = self.current_gamma();
        let mut segments = 0;
        loop {
            segments += 1;
            if self.step_segment(gamma)?.completed_iteration {
                return Ok(segments);
            }
        }
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub trace: Trace,
    pub iterate: Vec<f64>,
    pub outer_iterations: usize,
    pub segments: usize,
}

/// Runs Snake until `max_outer_iterations` or `max_wall_time`, whichever
/// comes first, recording the objective at iteration 0, every `eval_every`
/// outer iterations, and at the end.
pub fn run<P: Problem + ?Sized>(problem: &P, config: &SolverConfig) -> Result<SolverTrace> {
    config.validate()?;
    let start = Instant::now();
    let mut eval_seconds = 0.0;
    let mut trace = Trace::default();
    let mut record = |trace: &mut Trace, iteration: usize, x: &[f64]| {
        let wall = start.elapsed().as_secs_f64();
        let objective = problem.objective(x);
        trace.push(TraceRecord {
            iteration,
            wall_seconds: wall,
            solver_seconds: wall - eval_seconds,
            objective,
        });
        eval_seconds += start.elapsed().as_secs_f64() - wall;
    };

    if problem.graph().num_nodes() == 0 {
        let x = problem.initial_point();
        record(&mut trace, 0, &x);
        return Ok(SolverTrace {
            trace,
            iterate: x,
            outer_iterations: 0,
            segments: 0,
        });
    }

    let mut snake = Snake::new(problem, config.clone())?;
    record(&mut trace, 0, snake.iterate());
    let mut segments = 0;
    let mut last_recorded = 0;
    while snake.state().n < config.max_outer_iterations
        && start.elapsed().as_secs_f64() < config.max_wall_time
    {
        segments += snake.outer_iteration()?;
        let n = snake.state().n;
        if n % config.eval_every == 0 {
            record(&mut trace, n, snake.iterate());
            last_recorded = n;
        }
    }
    let outer_iterations = snake.state().n;
    if last_recorded != outer_iterations {
        record(&mut trace, outer_iterations, snake.iterate());
    }
    Ok(SolverTrace {
        trace,
        iterate: snake.into_iterate(),
        outer_iterations,
        segments,
    })
}

/// Monte-Carlo estimate of `R(x)` from `(|E| / L) R(x, φ_ξ)` over
/// independent stationary walks `ξ` of length `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerEstimate {
    pub mean: f64,
    pub std_error: f64,
}

pub fn estimate_regularizer(
    graph: &Graph,
    reg: &Regularizer,
    x: &[f64],
    budget: usize,
    num_samples: usize,
    seed: u64,
) -> Result<RegularizerEstimate> {
    if num_samples == 0 || budget == 0 {
        return Err(Error::InvalidParameter(
            "need at least one sample of length >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = graph.num_edges() as f64 / budget as f64;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..num_samples {
        let walk = sample_walk(graph, budget, &mut rng)?;
        let v = scale * reg.evaluate_on_path(graph, &walk, x)?;
        sum += v;
        sum_sq += v * v;
    }
    let m = num_samples as f64;
    let mean = sum / m;
    let var = if num_samples > 1 {
        ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(RegularizerEstimate {
        mean,
        std_error: (var / m).sqrt(),
    })
}

//! Deterministic reference solvers: projected gradient on the TV dual and
//! conjugate gradient for symmetric positive (semi)definite systems.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::trace::{Trace, TraceRecord};

/// Oriented incidence operator `D: R^V → R^E`, `(Dx)_e = x(u) − x(v)` for
/// the canonical edge `e = (u, v)`, `u < v`.
#[derive(Debug, Clone, Copy)]
pub struct IncidenceOperator<'g> {
    graph: &'g Graph,
}

impl<'g> IncidenceOperator<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self { graph }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, &(u, v)) in out.iter_mut().zip(self.graph.edges()) {
            *o = x[u] - x[v];
        }
    }

    pub fn apply_transpose(&self, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&ze, &(u, v)) in z.iter().zip(self.graph.edges()) {
            out[u] += ze;
            out[v] -= ze;
        }
    }

    /// Power iteration estimate of `‖DᵀD‖ = λ_max(L)`, from a deterministic
    /// start vector.
    pub fn norm_squared_estimate(&self, iterations: usize) -> f64 {
        let n = self.graph.num_nodes();
        if self.graph.num_edges() == 0 {
            return 0.0;
        }
        // a fixed pseudo-random start avoids being orthogonal to the top eigenvector
        let mut x: Vec<f64> = (0..n)
            .map(|i| ((i as f64 * 0.618_033_988_75).fract() - 0.5) + 1e-3 * i as f64)
            .collect();
        let mut y = vec![0.0; n];
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v /= norm);
            self.graph.laplacian_apply(&x, &mut y);
            estimate = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
            std::mem::swap(&mut x, &mut y);
        }
        estimate
    }
}

#[derive(Debug, Clone)]
pub struct PgDualResult {
    /// Primal solution `y − Dᵀz`.
    pub x: Vec<f64>,
    /// Dual variable, one entry per edge.
    pub z: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final duality gap `P(x) − D(z)`, certified on the returned pair.
    pub gap: f64,
    /// Primal objective per evaluation.
    pub trace: Trace,
}

#[derive(Debug, Clone, Copy)]
pub struct PgDualConfig {
    pub max_iterations: usize,
    /// Stop once the duality gap drops to this value.
    pub gap_tolerance: f64,
    pub eval_every: usize,
    pub max_wall_time: f64,
}

impl Default for PgDualConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            gap_tolerance: 1e-10,
            eval_every: 1,
            max_wall_time: f64::INFINITY,
        }
    }
}

/// Projected gradient on the dual of graph trend filtering,
/// `min_{|z_e| ≤ λ w_e} ½‖y − Dᵀz‖²`, with step `1 / (1.01 ‖DᵀD‖)`.
pub fn pg_dual_tv(
    graph: &Graph,
    y: &[f64],
    lambda: f64,
    weights: Option<&EdgeWeights>,
    config: &PgDualConfig,
) -> Result<PgDualResult> {
    let n = graph.num_nodes();
    let m = graph.num_edges();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    if let Some(w) = weights {
        if w.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: w.len(),
            });
        }
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    if config.eval_every == 0 {
        return Err(Error::InvalidParameter(
            "eval_every must be positive".into(),
        ));
    }
    let bound: Vec<f64> = (0..m)
        .map(|e| lambda * weights.map_or(1.0, |w| w.get(e)))
        .collect();
    let op = IncidenceOperator::new(graph);
    let lip = op.norm_squared_estimate(200);
    let step = if lip > 0.0 { 1.0 / (1.01 * lip) } else { 0.0 };

    let primal = |x: &[f64], dx: &mut [f64]| -> f64 {
        op.apply(x, dx);
        let fit: f64 = x.iter().zip(y).map(|(a, b)| 0.5 * (a - b).powi(2)).sum();
        fit + dx.iter().zip(&bound).map(|(d, b)| b * d.abs()).sum::<f64>()
    };
    let dual = |x: &[f64]| -> f64 {
        // D(z) = ½‖y‖² − ½‖y − Dᵀz‖² with x = y − Dᵀz
        0.5 * y.iter().map(|v| v * v).sum::<f64>() - 0.5 * x.iter().map(|v| v * v).sum::<f64>()
    };

    let start = Instant::now();
    let mut eval_time = 0.0;
    let mut z = vec![0.0; m];
    let mut x = y.to_vec();
    let mut dx = vec![0.0; m];
    let mut trace = Trace::default();
    let mut gap = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    let record = |k: usize, x: &[f64], dx: &mut [f64], trace: &mut Trace, eval_time: &mut f64| {
        let wall = start.elapsed().as_secs_f64();
        let p = primal(x, dx);
        let g = p - dual(x);
        trace.push(TraceRecord {
            iteration: k,
            wall_seconds: wall,
            solver_seconds: wall - *eval_time,
            objective: p,
        });
        *eval_time += start.elapsed().as_secs_f64() - wall;
        g
    };

    gap = gap.min(record(0, &x, &mut dx, &mut trace, &mut eval_time));
    if gap <= config.gap_tolerance {
        converged = true;
    }
    while !converged && iterations < config.max_iterations {
        if start.elapsed().as_secs_f64() >= config.max_wall_time {
            break;
        }
        // gradient of ½‖y − Dᵀz‖² in z is −D x
        op.apply(&x, &mut dx);
        for e in 0..m {
            z[e] = (z[e] + step * dx[e]).clamp(-bound[e], bound[e]);
        }
        op.apply_transpose(&z, &mut x);
        for (xi, yi) in x.iter_mut().zip(y) {
            *xi = yi - *xi;
        }
        iterations += 1;
        if iterations % config.eval_every == 0 || iterations == config.max_iterations {
            gap = record(iterations, &x, &mut dx, &mut trace, &mut eval_time);
            converged = gap <= config.gap_tolerance;
        }
    }
    if trace.last().map(|r| r.iteration) != Some(iterations) {
        gap = record(iterations, &x, &mut dx, &mut trace, &mut eval_time);
        converged = gap <= config.gap_tolerance;
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(PgDualResult {
        x,
        z,
        iterations,
        converged,
        gap,
        trace,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CgConfig {
    pub max_iterations: usize,
    /// Relative tolerance on `‖b − Ax‖ / ‖b‖`.
    pub tolerance: f64,
    /// Recompute the residual from scratch every this many iterations.
    pub residual_refresh: usize,
}

impl Default for CgConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-10,
            residual_refresh: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `pᵀAp` fell to zero or below before convergence.
    pub breakdown: bool,
    /// Final `‖b − Ax‖`, recomputed from `x`.
    pub residual_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate gradient for `A x = b` with `A` given as a matrix-free product.
pub fn conjugate_gradient<A>(apply: A, b: &[f64], x0: &[f64], config: &CgConfig) -> Result<CgResult>
where
    A: FnMut(&[f64], &mut [f64]),
{
    conjugate_gradient_traced(apply, b, x0, config, |_, _| {})
}

/// As [`conjugate_gradient`], calling `observe(iteration, x)` after every
/// iteration, starting with iteration 0 at `x0`.
pub fn conjugate_gradient_traced<A, O>(
    mut apply: A,
    b: &[f64],
    x0: &[f64],
    config: &CgConfig,
    mut observe: O,
) -> Result<CgResult>
where
    A: FnMut(&[f64], &mut [f64]),
    O: FnMut(usize, &[f64]),
{
    let n = b.len();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x0.len(),
        });
    }
    if config.residual_refresh == 0 {
        return Err(Error::InvalidParameter(
            "residual_refresh must be positive".into(),
        ));
    }
    let b_norm = dot(b, b).sqrt();
    let target = config.tolerance * if b_norm > 0.0 { b_norm } else { 1.0 };
    let mut x = x0.to_vec();
    let mut ap = vec![0.0; n];
    let true_residual = |x: &[f64], ap: &mut [f64], apply: &mut A| -> Vec<f64> {
        apply(x, ap);
        b.iter().zip(ap.iter()).map(|(bi, a)| bi - a).collect()
    };
    let mut r = true_residual(&x, &mut ap, &mut apply);
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    let mut breakdown = false;
    observe(0, &x);
    while rr.sqrt() > target && iterations < config.max_iterations {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            breakdown = true;
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations += 1;
        if iterations % config.residual_refresh == 0 {
            r = true_residual(&x, &mut ap, &mut apply);
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        observe(iterations, &x);
    }
    let residual = true_residual(&x, &mut ap, &mut apply);
    let residual_norm = dot(&residual, &residual).sqrt();
    if !residual_norm.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(CgResult {
        x,
        iterations,
        converged: residual_norm <= target,
        breakdown,
        residual_norm,
    })
}

/// Runs [`conjugate_gradient_traced`] and records `objective(x)` after every
/// iteration in a [`Trace`]; evaluation time is excluded from `solver_seconds`.
pub fn conjugate_gradient_with_trace<A, F>(
    apply: A,
    b: &[f64],
    x0: &[f64],
    config: &CgConfig,
    mut objective: F,
) -> Result<(CgResult, Trace)>
where
    A: FnMut(&[f64], &mut [f64]),
    F: FnMut(&[f64]) -> f64,
{
    let start = Instant::now();
    let mut eval_seconds = 0.0;
    let mut trace = Trace::default();
    let result = conjugate_gradient_traced(apply, b, x0, config, |k, x| {
        let wall = start.elapsed().as_secs_f64();
        let value = objective(x);
        trace.push(TraceRecord {
            iteration: k,
            wall_seconds: wall,
            solver_seconds: wall - eval_seconds,
            objective: value,
        });
        eval_seconds += start.elapsed().as_secs_f64() - wall;
    })?;
    Ok((result, trace))
}

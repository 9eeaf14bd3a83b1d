//! Problem drivers: graph trend filtering, harmonic inpainting, and
//! Laplacian systems, plus signal generation and CSV input.

use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::regularizers::Regularizer;
use crate::snake::Problem;

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `λ = |V| √π / (2|E|)`: the value that balances `E[½‖x − y‖²]` against
/// `E[λ Σ_E |x(i) − x(j)|]` for independent standard Gaussian `x`, `y`.
pub fn calibrate_lambda(graph: &Graph) -> Result<f64> {
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(graph.num_nodes() as f64 * std::f64::consts::PI.sqrt() / (2.0 * graph.num_edges() as f64))
}

/// Graph trend filtering: `min ½‖x − y‖² + λ Σ_E w_ij |x(i) − x(j)|`.
#[derive(Debug, Clone)]
pub struct TrendFiltering<'g> {
    graph: &'g Graph,
    y: Vec<f64>,
    lambda: f64,
    reg: Regularizer,
}

impl<'g> TrendFiltering<'g> {
    pub fn new(graph: &'g Graph, y: Vec<f64>, lambda: f64) -> Result<Self> {
        Self::build(graph, y, lambda, Regularizer::tv())
    }

    pub fn weighted(
        graph: &'g Graph,
        y: Vec<f64>,
        lambda: f64,
        weights: EdgeWeights,
    ) -> Result<Self> {
        check_len(graph.num_edges(), weights.len())?;
        Self::build(graph, y, lambda, Regularizer::weighted_tv(weights))
    }

    fn build(graph: &'g Graph, y: Vec<f64>, lambda: f64, reg: Regularizer) -> Result<Self> {
        check_len(graph.num_nodes(), y.len())?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            graph,
            y,
            lambda,
            reg: reg.scaled(lambda),
        })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Edge weights of the TV term, if any (without the `λ` factor).
    pub fn weights(&self) -> Option<&EdgeWeights> {
        self.reg.weights()
    }
}

impl Problem for TrendFiltering<'_> {
    fn graph(&self) -> &Graph {
        self.graph
    }

    fn regularizer(&self) -> &Regularizer {
        &self.reg
    }

    fn initial_point(&self) -> Vec<f64> {
        self.y.clone()
    }

    fn smooth_value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.y)
            .map(|(a, b)| 0.5 * (a - b).powi(2))
            .sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), b) in out.iter_mut().zip(x).zip(&self.y) {
            *o = a - b;
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.smooth_value(x)
            + self
                .reg
                .evaluate(self.graph, x)
                .expect("dimensions checked")
    }
}

/// Harmonic energy minimization: extend `y` from the observed set `O` by
/// minimizing `Σ_E (x(i) − x(j))²` with `x = y` on `O`.
///
/// The optimization runs over the unobserved nodes only, on the subgraph
/// they induce: `F(x) = Σ_{i ∉ O, j ∈ O, ij ∈ E} (x(i) − y(j))²` plus the
/// Laplacian penalty on the induced edges.
#[derive(Debug, Clone)]
pub struct Inpainting<'g> {
    full: &'g Graph,
    y: Vec<f64>,
    observed: Vec<bool>,
    free: Vec<usize>,
    sub: Graph,
    // per free node: number, sum and sum of squares of observed neighbor values
    obs_count: Vec<f64>,
    obs_sum: Vec<f64>,
    obs_sum_sq: Vec<f64>,
    reg: Regularizer,
}

impl<'g> Inpainting<'g> {
    /// `y` is indexed by the nodes of `graph`; only observed entries are read.
    pub fn new(graph: &'g Graph, y: Vec<f64>, observed: Vec<bool>) -> Result<Self> {
        check_len(graph.num_nodes(), y.len())?;
        check_len(graph.num_nodes(), observed.len())?;
        if !observed.iter().any(|&o| o) {
            return Err(Error::InvalidParameter(
                "at least one node must be observed".into(),
            ));
        }
        let free: Vec<usize> = (0..graph.num_nodes()).filter(|&v| !observed[v]).collect();
        let sub = graph.induced_subgraph(&free)?;
        let mut obs_count = vec![0.0; free.len()];
        let mut obs_sum = vec![0.0; free.len()];
        let mut obs_sum_sq = vec![0.0; free.len()];
        for (i, &v) in free.iter().enumerate() {
            for &w in graph.neighbors(v) {
                if observed[w] {
                    obs_count[i] += 1.0;
                    obs_sum[i] += y[w];
                    obs_sum_sq[i] += y[w] * y[w];
                }
            }
        }
        let problem = Self {
            full: graph,
            y,
            observed,
            free,
            sub,
            obs_count,
            obs_sum,
            obs_sum_sq,
            reg: Regularizer::laplacian(),
        };
        let stranded = problem.unreachable_free_nodes();
        if !stranded.is_empty() {
            log::warn!(
                "{} unobserved node(s) have no path to an observed node; their values are set by the regularizer alone",
                stranded.len()
            );
        }
        Ok(problem)
    }

    /// Observes each node independently with probability `fraction`.
    pub fn random_mask(num_nodes: usize, fraction: f64, seed: u64) -> Vec<bool> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..num_nodes)
            .map(|_| rng.random::<f64>() < fraction)
            .collect()
    }

    pub fn full_graph(&self) -> &Graph {
        self.full
    }

    /// Full-graph index of each optimization variable.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    /// Free nodes (as sub-graph indices) whose component in the full graph
    /// holds no observed node.
    pub fn unreachable_free_nodes(&self) -> Vec<usize> {
        let comp = self.full.components();
        let mut anchored = vec![false; self.full.num_nodes()];
        for v in 0..self.full.num_nodes() {
            if self.observed[v] {
                anchored[comp[v]] = true;
            }
        }
        (0..self.free.len())
            .filter(|&i| !anchored[comp[self.free[i]]])
            .collect()
    }

    /// Full signal: `y` on observed nodes, `x` elsewhere.
    pub fn assemble(&self, x: &[f64]) -> Vec<f64> {
        let mut full: Vec<f64> = (0..self.full.num_nodes())
            .map(|v| if self.observed[v] { self.y[v] } else { 0.0 })
            .collect();
        for (&v, &val) in self.free.iter().zip(x) {
            full[v] = val;
        }
        full
    }

    /// Harmonic energy `Σ_E (x(i) − x(j))²` of a full-graph signal.
    pub fn energy_of_full(&self, full: &[f64]) -> f64 {
        self.full
            .edges()
            .iter()
            .map(|&(u, v)| (full[u] - full[v]).powi(2))
            .sum()
    }

    /// `out = A x` for the interior system `A = L_sub + diag(observed degree)`,
    /// whose solution is the harmonic extension.
    pub fn harmonic_apply(&self, x: &[f64], out: &mut [f64]) {
        self.sub.laplacian_apply(x, out);
        for ((o, c), v) in out.iter_mut().zip(&self.obs_count).zip(x) {
            *o += c * v;
        }
    }

    /// Right-hand side of the interior system: sums of observed neighbor values.
    pub fn harmonic_rhs(&self) -> &[f64] {
        &self.obs_sum
    }

    /// Largest `|x(i) − mean of neighbor values|` over free nodes with at
    /// least one neighbor, evaluated on the assembled signal.
    pub fn harmonicity_residual(&self, x: &[f64]) -> f64 {
        let full = self.assemble(x);
        self.free
            .iter()
            .filter(|&&v| self.full.degree(v) > 0)
            .map(|&v| {
                let nb = self.full.neighbors(v);
                let mean = nb.iter().map(|&w| full[w]).sum::<f64>() / nb.len() as f64;
                (full[v] - mean).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl Problem for Inpainting<'_> {
    fn graph(&self) -> &Graph {
        &self.sub
    }

    fn regularizer(&self) -> &Regularizer {
        &self.reg
    }

    fn initial_point(&self) -> Vec<f64> {
        vec![0.0; self.free.len()]
    }

    fn smooth_value(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                self.obs_count[i] * v * v - 2.0 * v * self.obs_sum[i] + self.obs_sum_sq[i]
            })
            .sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = 2.0 * (self.obs_count[i] * x[i] - self.obs_sum[i]);
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.energy_of_full(&self.assemble(x))
    }
}

/// `L x = b` through `min −bᵀx + ½ xᵀ L x`. The smooth part is the linear
/// term; the quadratic form is the Laplacian penalty with weight ½.
#[derive(Debug, Clone)]
pub struct LaplacianSystem<'g> {
    graph: &'g Graph,
    b: Vec<f64>,
    reg: Regularizer,
}

impl<'g> LaplacianSystem<'g> {
    /// `b` must have zero mean (within `1e-9` of its scale) unless `center`
    /// is set, in which case the mean is subtracted.
    pub fn new(graph: &'g Graph, mut b: Vec<f64>, center: bool) -> Result<Self> {
        check_len(graph.num_nodes(), b.len())?;
        if b.is_empty() {
            return Err(Error::InvalidParameter("empty right-hand side".into()));
        }
        let mean = b.iter().sum::<f64>() / b.len() as f64;
        if center {
            b.iter_mut().for_each(|v| *v -= mean);
        } else {
            let scale = b.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            if mean.abs() > 1e-9 * scale {
                return Err(Error::InvalidParameter(format!(
                    "right-hand side must have zero mean, got {mean}"
                )));
            }
        }
        Ok(Self {
            graph,
            b,
            reg: Regularizer::laplacian().scaled(0.5),
        })
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    /// `‖L x − b‖₂`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut lx = vec![0.0; x.len()];
        self.graph.laplacian_apply(x, &mut lx);
        lx.iter()
            .zip(&self.b)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `−bᵀx + ½ xᵀ L x`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        let mut lx = vec![0.0; x.len()];
        self.graph.laplacian_apply(x, &mut lx);
        -dot(&self.b, x) + 0.5 * dot(x, &lx)
    }
}

impl Problem for LaplacianSystem<'_> {
    fn graph(&self) -> &Graph {
        self.graph
    }

    fn regularizer(&self) -> &Regularizer {
        &self.reg
    }

    fn initial_point(&self) -> Vec<f64> {
        vec![0.0; self.b.len()]
    }

    fn smooth_value(&self, x: &[f64]) -> f64 {
        -dot(&self.b, x)
    }

    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        for (o, b) in out.iter_mut().zip(&self.b) {
            *o = -b;
        }
    }

    /// Reports the residual `‖L x − b‖`.
    fn objective(&self, x: &[f64]) -> f64 {
        self.residual(x)
    }
}

/// Standard Gaussian vector from a seeded ChaCha8 stream.
pub fn gaussian_signal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `y(i) = levels[block(i)] + sigma ε_i` with standard Gaussian `ε`.
pub fn sbm_signal(blocks: &[usize], levels: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if let Some(&b) = blocks.iter().find(|&&b| b >= levels.len()) {
        return Err(Error::InvalidParameter(format!("no level for block {b}")));
    }
    let noise = gaussian_signal(blocks.len(), seed);
    Ok(blocks
        .iter()
        .zip(noise)
        .map(|(&b, e)| levels[b] + sigma * e)
        .collect())
}

fn read_node_column<R: Read>(
    graph: &Graph,
    reader: R,
    value_header: &str,
) -> Result<Vec<Option<f64>>> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "node" || &headers[1] != value_header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `node,{value_header}`"),
        });
    }
    let mut values = vec![None; graph.num_nodes()];
    for (i, row) in csv.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |message: String| Error::Parse { line, message };
        let id: i64 = row[0]
            .parse()
            .map_err(|_| bad(format!("invalid node id {:?}", &row[0])))?;
        let v: f64 = row[1]
            .parse()
            .map_err(|_| bad(format!("invalid value {:?}", &row[1])))?;
        let idx = graph
            .index_of(id)
            .ok_or_else(|| bad(format!("node {id} is not in the graph")))?;
        values[idx] = Some(v);
    }
    Ok(values)
}

/// Reads a `node,value` CSV keyed by original node ids; every node needs a value.
pub fn read_signal_csv<R: Read>(graph: &Graph, reader: R) -> Result<Vec<f64>> {
    read_node_column(graph, reader, "value")?
        .into_iter()
        .enumerate()
        .map(|(v, val)| {
            val.ok_or_else(|| {
                Error::InvalidParameter(format!("no value for node {}", graph.label(v)))
            })
        })
        .collect()
}

/// Reads a `node,observed` CSV with 0/1 entries; missing nodes are unobserved.
pub fn read_mask_csv<R: Read>(graph: &Graph, reader: R) -> Result<Vec<bool>> {
    read_node_column(graph, reader, "observed")?
        .into_iter()
        .map(|v| match v {
            None => Ok(false),
            Some(x) if x == 0.0 => Ok(false),
            Some(x) if x == 1.0 => Ok(true),
            Some(x) => Err(Error::InvalidParameter(format!(
                "observed flag must be 0 or 1, got {x}"
            ))),
        })
        .collect()
}

pub fn write_signal_csv<W: std::io::Write>(graph: &Graph, x: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "node,value")?;
    for (v, val) in x.iter().enumerate() {
        writeln!(out, "{},{:.16e}", graph.label(v), val)?;
    }
    Ok(())
}

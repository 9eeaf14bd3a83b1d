//! Edge-separable penalties `R(x) = Σ_{ {i,j} ∈ E } φ_ij(x(i), x(j))`.
//!
//! Every kind carries a positive `scale` that multiplies each edge term, so
//! a penalty such as `λ Σ |x(i) − x(j)|` is `Regularizer::tv().scaled(λ)`.

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::prox1d::{laplacian_prox_path, tv_prox_path};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizerKind {
    /// `|x(i) − x(j)|`
    Tv,
    /// `w_ij |x(i) − x(j)|`
    WeightedTv,
    /// `(x(i) − x(j))²`
    Laplacian,
    /// `w_ij (x(i) − x(j))²`
    WeightedLaplacian,
    /// `(x(i)/√deg(i) − x(j)/√deg(j))²`; evaluation only.
    NormalizedLaplacian,
}

impl RegularizerKind {
    pub fn is_weighted(self) -> bool {
        matches!(self, Self::WeightedTv | Self::WeightedLaplacian)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regularizer {
    kind: RegularizerKind,
    weights: Option<EdgeWeights>,
    scale: f64,
}

impl Regularizer {
    fn unweighted(kind: RegularizerKind) -> Self {
        Self {
            kind,
            weights: None,
            scale: 1.0,
        }
    }

    pub fn tv() -> Self {
        Self::unweighted(RegularizerKind::Tv)
    }

    pub fn laplacian() -> Self {
        Self::unweighted(RegularizerKind::Laplacian)
    }

    pub fn normalized_laplacian() -> Self {
        Self::unweighted(RegularizerKind::NormalizedLaplacian)
    }

    pub fn weighted_tv(weights: EdgeWeights) -> Self {
        Self {
            kind: RegularizerKind::WeightedTv,
            weights: Some(weights),
            scale: 1.0,
        }
    }

    pub fn weighted_laplacian(weights: EdgeWeights) -> Self {
        Self {
            kind: RegularizerKind::WeightedLaplacian,
            weights: Some(weights),
            scale: 1.0,
        }
    }

    /// Builds a regularizer of `kind`; `weights` must be present exactly
    /// for the weighted kinds.
    pub fn new(kind: RegularizerKind, weights: Option<EdgeWeights>) -> Result<Self> {
        if kind.is_weighted() != weights.is_some() {
            return Err(Error::InvalidParameter(format!(
                "{kind:?} {} edge weights",
                if kind.is_weighted() {
                    "requires"
                } else {
                    "does not take"
                }
            )));
        }
        Ok(Self {
            kind,
            weights,
            scale: 1.0,
        })
    }

    /// Multiplies every edge term by `scale > 0`.
    pub fn scaled(mut self, scale: f64) -> Self {
        assert!(
            scale.is_finite() && scale > 0.0,
            "regularizer scale must be positive"
        );
        self.scale *= scale;
        self
    }

    pub fn kind(&self) -> RegularizerKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn weights(&self) -> Option<&EdgeWeights> {
        self.weights.as_ref()
    }

    fn check_weights(&self, graph: &Graph) -> Result<()> {
        match &self.weights {
            Some(w) if w.len() != graph.num_edges() => Err(Error::DimensionMismatch {
                expected: graph.num_edges(),
                actual: w.len(),
            }),
            _ => Ok(()),
        }
    }

    fn edge_weight(&self, edge: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w.get(edge))
    }

    fn edge_term(&self, graph: &Graph, edge: usize, u: usize, v: usize, x: &[f64]) -> f64 {
        let w = self.edge_weight(edge);
        match self.kind {
            RegularizerKind::Tv | RegularizerKind::WeightedTv => w * (x[u] - x[v]).abs(),
            RegularizerKind::Laplacian | RegularizerKind::WeightedLaplacian => {
                let d = x[u] - x[v];
                w * d * d
            }
            RegularizerKind::NormalizedLaplacian => {
                let d =
                    x[u] / (graph.degree(u) as f64).sqrt() - x[v] / (graph.degree(v) as f64).sqrt();
                d * d
            }
        }
    }

    /// `R(x)` summed over every edge of `graph`, each counted once.
    pub fn evaluate(&self, graph: &Graph, x: &[f64]) -> Result<f64> {
        check_len(graph.num_nodes(), x.len())?;
        self.check_weights(graph)?;
        let sum: f64 = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| self.edge_term(graph, e, u, v, x))
            .sum();
        Ok(self.scale * sum)
    }

    /// `R` restricted to the edges of a walk (consecutive node pairs); zero
    /// for a single vertex. Works for walks with repetitions as well.
    pub fn evaluate_on_path(&self, graph: &Graph, walk: &[usize], x: &[f64]) -> Result<f64> {
        check_len(graph.num_nodes(), x.len())?;
        self.check_weights(graph)?;
        let mut sum = 0.0;
        for pair in walk.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            let e = graph.edge_index(u, v).ok_or(Error::NotAnEdge(u, v))?;
            sum += self.edge_term(graph, e, u, v, x);
        }
        Ok(self.scale * sum)
    }

    /// Weights of the consecutive edges of `path`, or `None` when unweighted.
    pub fn path_weights(&self, graph: &Graph, path: &[usize]) -> Result<Option<Vec<f64>>> {
        let Some(weights) = &self.weights else {
            return Ok(None);
        };
        path.windows(2)
            .map(|p| {
                graph
                    .edge_index(p[0], p[1])
                    .map(|e| weights.get(e))
                    .ok_or(Error::NotAnEdge(p[0], p[1]))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// `prox_{step · R(·, φ_path)}` applied to values aligned with `path`.
    pub fn prox_on_path(
        &self,
        graph: &Graph,
        path: &[usize],
        values: &[f64],
        step: f64,
    ) -> Result<Vec<f64>> {
        check_len(path.len(), values.len())?;
        if self.kind == RegularizerKind::NormalizedLaplacian {
            return Err(Error::Unsupported("normalized Laplacian has no path prox"));
        }
        if step < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "negative prox step {step}"
            )));
        }
        if path.len() <= 1 || step == 0.0 {
            return Ok(values.to_vec());
        }
        let weights = self.path_weights(graph, path)?;
        let alpha = step * self.scale;
        match self.kind {
            RegularizerKind::Tv | RegularizerKind::WeightedTv => {
                tv_prox_path(values, alpha, weights.as_deref())
            }
            _ => laplacian_prox_path(values, alpha, weights.as_deref()),
        }
    }

    /// Gathers `x` along `path`, applies [`Self::prox_on_path`], and scatters
    /// the result back in place.
    pub fn prox_on_path_in_place(
        &self,
        graph: &Graph,
        path: &[usize],
        x: &mut [f64],
        step: f64,
        scratch: &mut Vec<f64>,
    ) -> Result<()> {
        scratch.clear();
        scratch.extend(path.iter().map(|&v| x[v]));
        let out = self.prox_on_path(graph, path, scratch, step)?;
        for (&v, val) in path.iter().zip(out) {
            x[v] = val;
        }
        Ok(())
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

//! Degree-proportional random walks and their online split into maximal
//! simple paths.
//!
//! A walk started from the stationary law `pi(v) = deg(v) / 2|E|` and moving
//! to a uniform neighbor at each step is cut at every first repetition. Each
//! piece is a simple path; consecutive pieces share one endpoint, and the
//! piece lengths add up to the walk length.

use std::collections::HashSet;
use std::ops::Deref;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A loop-free node sequence; a single vertex has length 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplePath {
    nodes: Vec<usize>,
}

impl SimplePath {
    /// Checks distinctness and adjacency against `graph`.
    pub fn new(graph: &Graph, nodes: Vec<usize>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidWalk("empty node sequence".into()));
        }
        if let Some(&v) = nodes.iter().find(|&&v| v >= graph.num_nodes()) {
            return Err(Error::InvalidWalk(format!("node {v} out of range")));
        }
        for w in nodes.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return Err(Error::NotAnEdge(w[0], w[1]));
            }
        }
        let distinct: HashSet<_> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            return Err(Error::InvalidWalk("repeated node in simple path".into()));
        }
        Ok(Self { nodes })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn first(&self) -> usize {
        self.nodes[0]
    }

    pub fn last(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    pub fn into_nodes(self) -> Vec<usize> {
        self.nodes
    }
}

impl Deref for SimplePath {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.nodes
    }
}

/// The maximal simple paths of a walk of length `budget`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkDecomposition {
    pub segments: Vec<SimplePath>,
    pub budget: usize,
}

impl WalkDecomposition {
    /// Rebuilds the walk by concatenating segments with shared endpoints
    /// removed.
    pub fn walk(&self) -> Vec<usize> {
        let mut walk = Vec::with_capacity(self.budget + 1);
        for (i, seg) in self.segments.iter().enumerate() {
            let skip = usize::from(i > 0);
            walk.extend_from_slice(&seg.nodes()[skip..]);
        }
        walk
    }

    /// Checks the decomposition invariants: length sum equals the budget,
    /// segment count within `1..=budget`, and shared endpoints.
    pub fn check(&self) -> Result<()> {
        let total: usize = self.segments.iter().map(SimplePath::len).sum();
        if total != self.budget {
            return Err(Error::InvalidWalk(format!(
                "segment lengths sum to {total}, budget is {}",
                self.budget
            )));
        }
        let n = self.segments.len();
        if n == 0 || n > self.budget {
            return Err(Error::InvalidWalk(format!(
                "{n} segments for budget {}",
                self.budget
            )));
        }
        if self.segments.iter().any(SimplePath::is_empty) {
            return Err(Error::InvalidWalk("trivial segment".into()));
        }
        for pair in self.segments.windows(2) {
            if pair[0].last() != pair[1].first() {
                return Err(Error::InvalidWalk("segments do not share endpoints".into()));
            }
        }
        Ok(())
    }
}

/// Draws `(v, w)` with `v ~ pi` and `w` uniform among the neighbors of `v`,
/// i.e. a uniformly random adjacency slot.
pub fn rnd_oriented_edge<R: Rng + ?Sized>(graph: &Graph, rng: &mut R) -> Result<(usize, usize)> {
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(graph.slot(rng.random_range(0..graph.num_slots())))
}

pub fn uniform_neighbor<R: Rng + ?Sized>(graph: &Graph, v: usize, rng: &mut R) -> Result<usize> {
    let nb = graph.neighbors(v);
    if nb.is_empty() {
        return Err(Error::IsolatedNode(v));
    }
    Ok(nb[rng.random_range(0..nb.len())])
}

/// Reusable sampler for consecutive simple paths.
///
/// The membership set is cleared at the start of every segment.
#[derive(Debug, Default)]
pub struct PathSampler {
    seen: HashSet<usize>,
}

impl PathSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Extends `start_edge` by uniform-neighbor steps until the next node is
    /// already in the segment or the segment holds `budget` edges.
    ///
    /// Returns the segment and, when it stopped on a repetition, the edge
    /// `(last, pivot)` that starts the next segment. When the budget runs
    /// out first no further node is drawn and `None` is returned.
    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        graph: &Graph,
        start_edge: (usize, usize),
        budget: usize,
        rng: &mut R,
    ) -> Result<(SimplePath, Option<(usize, usize)>)> {
        let (a, b) = start_edge;
        if !graph.has_edge(a, b) {
            return Err(Error::NotAnEdge(a, b));
        }
        if budget == 0 {
            return Err(Error::InvalidParameter(
                "segment budget must be at least 1".into(),
            ));
        }
        self.seen.clear();
        self.seen.insert(a);
        self.seen.insert(b);
        let mut nodes = vec![a, b];
        let mut tip = b;
        while nodes.len() - 1 < budget {
            let w = uniform_neighbor(graph, tip, rng)?;
            if !self.seen.insert(w) {
                return Ok((SimplePath { nodes }, Some((tip, w))));
            }
            nodes.push(w);
            tip = w;
        }
        Ok((SimplePath { nodes }, None))
    }
}

/// One-shot form of [`PathSampler::sample`].
pub fn simple_path<R: Rng + ?Sized>(
    graph: &Graph,
    start_edge: (usize, usize),
    budget: usize,
    rng: &mut R,
) -> Result<(SimplePath, Option<(usize, usize)>)> {
    PathSampler::new().sample(graph, start_edge, budget, rng)
}

/// Samples a walk of length `len` from the stationary law.
pub fn sample_walk<R: Rng + ?Sized>(graph: &Graph, len: usize, rng: &mut R) -> Result<Vec<usize>> {
    let (v0, v1) = rnd_oriented_edge(graph, rng)?;
    let mut walk = Vec::with_capacity(len + 1);
    walk.push(v0);
    if len == 0 {
        return Ok(walk);
    }
    walk.push(v1);
    while walk.len() <= len {
        let next = uniform_neighbor(graph, *walk.last().unwrap(), rng)?;
        walk.push(next);
    }
    Ok(walk)
}

/// Streams the segments of one outer budget through [`PathSampler`],
/// starting from a fresh stationary edge.
pub fn sample_decomposition<R: Rng + ?Sized>(
    graph: &Graph,
    budget: usize,
    sampler: &mut PathSampler,
    rng: &mut R,
) -> Result<WalkDecomposition> {
    let mut edge = rnd_oriented_edge(graph, rng)?;
    let mut remaining = budget;
    let mut segments = Vec::new();
    loop {
        let (seg, next) = sampler.sample(graph, edge, remaining, rng)?;
        remaining -= seg.len();
        segments.push(seg);
        match next {
            Some(e) if remaining > 0 => edge = e,
            _ => break,
        }
    }
    Ok(WalkDecomposition { segments, budget })
}

/// Splits a materialized walk into maximal simple paths at its first-repetition
/// stopping times.
pub fn decompose_walk(walk: &[usize], graph: &Graph) -> Result<WalkDecomposition> {
    if walk.len() < 2 {
        return Err(Error::InvalidWalk(
            "walk must have at least one edge".into(),
        ));
    }
    for pair in walk.windows(2) {
        if !graph.has_edge(pair[0], pair[1]) {
            return Err(Error::NotAnEdge(pair[0], pair[1]));
        }
    }
    let budget = walk.len() - 1;
    let mut segments = Vec::new();
    // current segment is walk[start..=k-1]
    let mut start = 0;
    let mut seen: HashSet<usize> = HashSet::new();
    seen.insert(walk[0]);
    for k in 1..walk.len() {
        if !seen.insert(walk[k]) {
            segments.push(SimplePath {
                nodes: walk[start..k].to_vec(),
            });
            start = k - 1;
            seen.clear();
            seen.insert(walk[k - 1]);
            seen.insert(walk[k]);
        }
    }
    segments.push(SimplePath {
        nodes: walk[start..].to_vec(),
    });
    Ok(WalkDecomposition { segments, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, path, star, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn path_graph_walk_is_forced() {
        let g = path(3);
        let (seg, next) = simple_path(&g, (0, 1), 5, &mut rng(0)).unwrap();
        assert_eq!(seg.nodes(), &[0, 1, 2]);
        assert_eq!(next, Some((2, 1)));
    }

    #[test]
    fn budget_one_returns_start_edge() {
        let g = complete(5);
        for seed in 0..20 {
            let (seg, next) = simple_path(&g, (3, 1), 1, &mut rng(seed)).unwrap();
            assert_eq!(seg.nodes(), &[3, 1]);
            assert_eq!(next, None);
        }
    }

    #[test]
    fn budget_exhaustion_wins_over_repetition() {
        // on the 2-edge path the third draw would repeat, but budget 2 stops first
        let g = path(3);
        let (seg, next) = simple_path(&g, (0, 1), 2, &mut rng(0)).unwrap();
        assert_eq!(seg.nodes(), &[0, 1, 2]);
        assert_eq!(next, None);
    }

    #[test]
    fn start_edge_must_exist() {
        let g = path(3);
        assert!(matches!(
            simple_path(&g, (0, 2), 3, &mut rng(0)),
            Err(Error::NotAnEdge(0, 2))
        ));
    }

    #[test]
    fn isolated_and_leaf_neighbors() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(
            uniform_neighbor(&g, 2, &mut rng(0)),
            Err(Error::IsolatedNode(2))
        ));
        assert_eq!(uniform_neighbor(&g, 0, &mut rng(0)).unwrap(), 1);
        assert!(rnd_oriented_edge(&Graph::from_edges(2, []).unwrap(), &mut rng(0)).is_err());
    }

    #[test]
    fn single_edge_orientation_is_fair() {
        let g = path(2);
        let mut r = rng(5);
        let draws = 20_000;
        let forward = (0..draws)
            .filter(|_| rnd_oriented_edge(&g, &mut r).unwrap() == (0, 1))
            .count();
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((forward as f64 - draws as f64 / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn star_center_neighbors_uniform() {
        let g = star(4);
        let mut r = rng(3);
        let draws = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            counts[uniform_neighbor(&g, 0, &mut r).unwrap()] += 1;
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts[1..]
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // chi-square, 3 dof, 1% critical value
        assert!(chi2 < 11.345, "chi2 = {chi2}");
    }

    #[test]
    fn example_walk_decomposition() {
        // letters c,a,e,g,f,b,h -> 0..7
        let (a, b, c, e, f, g, h) = (0, 1, 2, 3, 4, 5, 6);
        let graph =
            Graph::from_edges(7, [(c, a), (a, e), (e, g), (g, a), (a, f), (a, b), (b, h)]).unwrap();
        let walk = [c, a, e, g, a, f, a, b, h];
        let d = decompose_walk(&walk, &graph).unwrap();
        let segs: Vec<&[usize]> = d.segments.iter().map(|s| s.nodes()).collect();
        assert_eq!(
            segs,
            vec![&[c, a, e, g][..], &[g, a, f][..], &[f, a, b, h][..]]
        );
        d.check().unwrap();
        assert_eq!(d.walk(), walk);
    }

    #[test]
    fn simple_walk_is_one_segment() {
        let d = decompose_walk(&[0, 1, 2], &path(3)).unwrap();
        assert_eq!(d.segments.len(), 1);
        assert_eq!(d.segments[0].nodes(), &[0, 1, 2]);
    }

    #[test]
    fn invalid_walks_rejected() {
        assert!(decompose_walk(&[0], &path(3)).is_err());
        assert!(decompose_walk(&[0, 2], &path(3)).is_err());
        assert!(SimplePath::new(&path(3), vec![0, 1, 0]).is_err());
    }

    #[test]
    fn streamed_decomposition_matches_offline_split() {
        let g = crate::graph::sample_sbm(&[6, 6], 0.6, 0.2, 2).unwrap();
        let mut sampler = PathSampler::new();
        let mut r = rng(17);
        for _ in 0..2000 {
            let d = sample_decomposition(&g, 9, &mut sampler, &mut r).unwrap();
            d.check().unwrap();
            let again = decompose_walk(&d.walk(), &g).unwrap();
            assert_eq!(again, d);
        }
    }
}

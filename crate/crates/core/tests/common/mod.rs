//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Dense `I + 2 lambda L_w` for the path on `n` nodes.
pub fn dense_path_system(n: usize, lambda: f64, weights: Option<&[f64]>) -> DMatrix<f64> {
    let mut a = DMatrix::identity(n, n);
    for k in 0..n.saturating_sub(1) {
        let c = 2.0 * lambda * weights.map_or(1.0, |w| w[k]);
        a[(k, k)] += c;
        a[(k + 1, k + 1)] += c;
        a[(k, k + 1)] -= c;
        a[(k + 1, k)] -= c;
    }
    a
}

/// Weighted 1D TV prox by projected gradient on the box-constrained dual
/// `min_{|z_k| <= alpha w_k} ½‖y − Dᵀz‖²`, run until the duality gap is at
/// most `gap_tol` and the iterates have stalled.
pub fn tv_dual_oracle(y: &[f64], alpha: f64, weights: Option<&[f64]>, gap_tol: f64) -> Vec<f64> {
    let n = y.len();
    if n < 2 {
        return y.to_vec();
    }
    let bound: Vec<f64> = (0..n - 1)
        .map(|k| alpha * weights.map_or(1.0, |w| w[k]))
        .collect();
    let mut z = vec![0.0; n - 1];
    let mut x = y.to_vec();
    let step = 0.25; // ‖D Dᵀ‖ <= 4 on a path
    for it in 0..5_000_000 {
        // x = y − Dᵀz with (Dx)_k = x_{k+1} − x_k, so (Dᵀz)_i = z_{i−1} − z_i
        for i in 0..n {
            let left = if i > 0 { z[i - 1] } else { 0.0 };
            let right = if i + 1 < n { z[i] } else { 0.0 };
            x[i] = y[i] - (left - right);
        }
        let mut moved: f64 = 0.0;
        for k in 0..n - 1 {
            let next = (z[k] + step * (x[k + 1] - x[k])).clamp(-bound[k], bound[k]);
            moved = moved.max((next - z[k]).abs());
            z[k] = next;
        }
        if it % 50 == 0 || moved == 0.0 {
            let primal: f64 = x
                .iter()
                .zip(y)
                .map(|(a, b)| 0.5 * (a - b).powi(2))
                .sum::<f64>()
                + (0..n - 1)
                    .map(|k| bound[k] * (x[k + 1] - x[k]).abs())
                    .sum::<f64>();
            let dual: f64 = y.iter().map(|v| 0.5 * v * v).sum::<f64>()
                - x.iter().map(|v| 0.5 * v * v).sum::<f64>();
            if primal - dual <= gap_tol && moved < 1e-15 {
                break;
            }
        }
    }
    x
}

use snake::graph::{complete, cycle, grid, path, star, Graph};

/// Twenty small graphs (at most six nodes) covering paths, cycles, stars,
/// cliques and a few irregular shapes, one of them disconnected.
pub fn small_graphs() -> Vec<(&'static str, Graph)> {
    let mut out = vec![
        ("path2", path(2)),
        ("path3", path(3)),
        ("path4", path(4)),
        ("path5", path(5)),
        ("path6", path(6)),
        ("cycle3", cycle(3)),
        ("cycle4", cycle(4)),
        ("cycle5", cycle(5)),
        ("cycle6", cycle(6)),
        ("star2", star(2)),
        ("star3", star(3)),
        ("star5", star(5)),
        ("k4", complete(4)),
        ("k5", complete(5)),
        ("k6", complete(6)),
        ("grid2x3", grid(2, 3)),
    ];
    let extra: [(&str, usize, &[(usize, usize)]); 4] = [
        ("paw", 4, &[(0, 1), (1, 2), (0, 2), (2, 3)]),
        ("diamond", 4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]),
        (
            "bowtie",
            5,
            &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)],
        ),
        ("two_edges", 4, &[(0, 1), (2, 3)]),
    ];
    for (name, n, edges) in extra {
        out.push((name, Graph::from_edges(n, edges.iter().copied()).unwrap()));
    }
    out
}

/// `E[(|E| / L) Σ_k φ(x(v_k), x(v_{k+1}), e_k)]` over all walks of length
/// `len` from the stationary start, by exhaustive enumeration.
pub fn exact_walk_expectation<F>(graph: &Graph, len: usize, phi: F) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    let slots = 2.0 * graph.num_edges() as f64;
    fn extend<F: Fn(usize, usize) -> f64>(
        graph: &Graph,
        v: usize,
        steps_left: usize,
        prob: f64,
        acc: f64,
        phi: &F,
        total: &mut f64,
    ) {
        if steps_left == 0 {
            *total += prob * acc;
            return;
        }
        let nb = graph.neighbors(v);
        for &w in nb {
            extend(
                graph,
                w,
                steps_left - 1,
                prob / nb.len() as f64,
                acc + phi(v, w),
                phi,
                total,
            );
        }
    }
    let mut total = 0.0;
    for v in 0..graph.num_nodes() {
        let d = graph.degree(v);
        if d > 0 {
            // π(v) = deg(v) / 2|E|
            extend(graph, v, len, d as f64 / slots, 0.0, &phi, &mut total);
        }
    }
    graph.num_edges() as f64 / len as f64 * total
}

/// `max_w |(πP)(w) − π(w)|` with `π ∝ deg` and uniform-neighbor transitions.
pub fn stationarity_defect(graph: &Graph) -> f64 {
    let slots = 2.0 * graph.num_edges() as f64;
    let pi: Vec<f64> = (0..graph.num_nodes())
        .map(|v| graph.degree(v) as f64 / slots)
        .collect();
    let mut next = vec![0.0; graph.num_nodes()];
    for v in 0..graph.num_nodes() {
        let nb = graph.neighbors(v);
        for &w in nb {
            next[w] += pi[v] / nb.len() as f64;
        }
    }
    pi.iter()
        .zip(&next)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Segments of a walk straight from the stopping-time definition:
/// `τ_0 = 1`, `τ_{i+1} = min{k ≥ τ_i : v_k ∈ {v_{τ_i − 1}, …, v_{k−1}}}`,
/// `t_i = min(τ_i, L + 1)`, `ξ^i = (v_{t_{i−1} − 1}, …, v_{t_i − 1})`.
pub fn stopping_time_segments(walk: &[usize]) -> Vec<Vec<usize>> {
    let l = walk.len() - 1;
    let mut t = vec![1usize];
    let mut tau = 1usize;
    while tau <= l {
        let next = (tau..=l).find(|&k| walk[tau - 1..k].contains(&walk[k]));
        tau = next.unwrap_or(l + 1);
        t.push(tau.min(l + 1));
    }
    t.windows(2)
        .map(|w| walk[w[0] - 1..w[1]].to_vec())
        .filter(|s| s.len() > 1)
        .collect()
}

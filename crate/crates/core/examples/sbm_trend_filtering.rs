//! Graph trend filtering on a stochastic block model: Snake against the
//! projected-gradient dual solver.
//!
//! ```bash
//! cargo run --release --example sbm_trend_filtering
//! ```

use snake::baselines::{pg_dual_tv, PgDualConfig};
use snake::graph::{sample_sbm, sbm_blocks};
use snake::problems::{calibrate_lambda, sbm_signal, TrendFiltering};
use snake::snake::{run, Problem, SolverConfig, StepSchedule};

fn main() -> snake::Result<()> {
    let sizes = [100; 4];
    let graph = sample_sbm(&sizes, 0.1, 0.005, 1)?;
    println!(
        "SBM: {} nodes, {} edges",
        graph.num_nodes(),
        graph.num_edges()
    );

    // one level per community plus Gaussian noise
    let y = sbm_signal(&sbm_blocks(&sizes), &[0.0, 1.0, 2.0, 3.0], 0.5, 1)?;
    let lambda = calibrate_lambda(&graph)?;
    let problem = TrendFiltering::new(&graph, y, lambda)?;

    let reference = pg_dual_tv(&graph, problem.y(), lambda, None, &PgDualConfig::default())?;
    let f_star = problem.objective(&reference.x);
    println!(
        "pg-dual: objective {f_star:.6} after {} iterations (gap {:.1e})",
        reference.iterations, reference.gap
    );

    let edges = graph.num_edges() as f64;
    let config = SolverConfig::new(graph.num_nodes(), StepSchedule::inverse_n(edges))
        .with_seed(7)
        .with_max_outer_iterations(400)
        .with_eval_every(50);
    let out = run(&problem, &config)?;
    for r in &out.trace.records {
        println!(
            "snake n={:>4}  objective {:.6}  rel. gap {:.2e}  t={:.3}s",
            r.iteration,
            r.objective,
            (r.objective - f_star) / f_star,
            r.wall_seconds
        );
    }
    Ok(())
}

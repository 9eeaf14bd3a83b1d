//! The walk length `L` trades iteration cost against gradient noise. Every
//! run gets the same number of walk steps.
//!
//! ```bash
//! cargo run --release --example budget_tradeoff
//! ```

use snake::baselines::{pg_dual_tv, PgDualConfig};
use snake::graph::sample_sbm;
use snake::problems::{calibrate_lambda, gaussian_signal, TrendFiltering};
use snake::snake::{run, Problem, SolverConfig, StepSchedule};

fn main() -> snake::Result<()> {
    let graph = sample_sbm(&[50; 4], 0.1, 0.005, 1)?;
    let v = graph.num_nodes();
    let y = gaussian_signal(v, 1);
    let lambda = calibrate_lambda(&graph)?;
    let problem = TrendFiltering::new(&graph, y, lambda)?;
    let reference = pg_dual_tv(&graph, problem.y(), lambda, None, &PgDualConfig::default())?;
    let f_star = problem.objective(&reference.x);

    let steps = 500 * v;
    for budget in [10, v / 10, v, 4 * v] {
        let config = SolverConfig::new(budget, StepSchedule::inverse_n(graph.num_edges() as f64))
            .with_seed(4)
            .with_max_outer_iterations(steps.div_ceil(budget))
            .with_eval_every(5);
        let out = run(&problem, &config)?;
        let hit = out
            .trace
            .records
            .iter()
            .find(|r| (r.objective - f_star) / f_star < 0.02);
        println!(
            "L = {budget:>4}: {:>6} iterations, final gap {:.2}%, within 2% after {}",
            out.outer_iterations,
            100.0 * (out.trace.last().unwrap().objective - f_star) / f_star,
            hit.map_or("never".to_string(), |r| format!("{:.4} s", r.wall_seconds)),
        );
    }
    Ok(())
}

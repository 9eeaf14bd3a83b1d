//! Online Laplacian solver: `L x = b` as `min -bᵀx + ½ xᵀ L x`.
//!
//! ```bash
//! cargo run --release --example laplacian_solver
//! ```

use snake::baselines::{conjugate_gradient_traced, CgConfig};
use snake::graph::sample_sbm;
use snake::problems::{gaussian_signal, LaplacianSystem};
use snake::snake::{run, SolverConfig, StepSchedule};

fn main() -> snake::Result<()> {
    let graph = sample_sbm(&[500], 0.04, 0.0, 8)?;
    let n = graph.num_nodes();
    let system = LaplacianSystem::new(&graph, gaussian_signal(n, 8), true)?;

    let config = SolverConfig::new(n, StepSchedule::inverse_n(n as f64 / 2.0))
        .with_seed(2)
        .with_max_outer_iterations(500)
        .with_eval_every(50);
    let out = run(&system, &config)?;
    for r in &out.trace.records {
        println!("snake n={:>4}  |Lx - b| = {:.4}", r.iteration, r.objective);
    }

    let mut residuals = Vec::new();
    let cg = conjugate_gradient_traced(
        |x, o| graph.laplacian_apply(x, o),
        system.rhs(),
        &vec![0.0; n],
        &CgConfig::default(),
        |_, x| residuals.push(system.residual(x)),
    )?;
    for (k, r) in residuals.iter().enumerate().take(6) {
        println!("cg    k={k:>4}  |Lx - b| = {r:.4}");
    }
    println!("cg converged in {} iterations", cg.iterations);
    println!(
        "energy: snake {:.4}, cg {:.4}",
        system.energy(&out.iterate),
        system.energy(&cg.x)
    );
    Ok(())
}

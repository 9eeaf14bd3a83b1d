//! Harmonic inpainting: half the nodes are observed, Snake fills in the rest
//! and is compared with the conjugate-gradient solution.
//!
//! ```bash
//! cargo run --release --example graph_inpainting
//! ```

use snake::baselines::{conjugate_gradient, CgConfig};
use snake::graph::sample_sbm;
use snake::problems::{gaussian_signal, Inpainting};
use snake::snake::{run, Problem, SolverConfig, StepSchedule};

fn main() -> snake::Result<()> {
    let graph = sample_sbm(&[100, 100], 0.1, 0.01, 3)?;
    let y = gaussian_signal(graph.num_nodes(), 3);
    let observed = Inpainting::random_mask(graph.num_nodes(), 0.5, 3);
    let problem = Inpainting::new(&graph, y, observed)?;
    println!(
        "{} unobserved nodes, {} edges between them",
        problem.free_nodes().len(),
        problem.graph().num_edges()
    );

    let x0 = vec![0.0; problem.free_nodes().len()];
    let cg = conjugate_gradient(
        |x, out| problem.harmonic_apply(x, out),
        problem.harmonic_rhs(),
        &x0,
        &CgConfig::default(),
    )?;
    let e_star = problem.objective(&cg.x);
    println!("cg: energy {e_star:.6} in {} iterations", cg.iterations);

    let e_sub = problem.graph().num_edges() as f64;
    let config = SolverConfig::new(1000, StepSchedule::inverse_n(0.1 * e_sub))
        .with_seed(1)
        .with_max_outer_iterations(20_000)
        .with_eval_every(4000);
    let out = run(&problem, &config)?;
    for r in &out.trace.records {
        println!("snake n={:>6}  energy {:.6}", r.iteration, r.objective);
    }
    println!(
        "harmonicity residual: snake {:.2e}, cg {:.2e}",
        problem.harmonicity_residual(&out.iterate),
        problem.harmonicity_residual(&cg.x)
    );
    Ok(())
}

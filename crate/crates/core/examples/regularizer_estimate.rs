//! `(|E| / L) R(x, φ_ξ)` over stationary walks is an unbiased estimate of
//! the full regularizer; longer walks reduce its spread.
//!
//! ```bash
//! cargo run --release --example regularizer_estimate
//! ```

use snake::graph::sample_sbm;
use snake::problems::gaussian_signal;
use snake::regularizers::Regularizer;
use snake::snake::estimate_regularizer;

fn main() -> snake::Result<()> {
    let graph = sample_sbm(&[30, 30], 0.2, 0.02, 2)?;
    let x = gaussian_signal(graph.num_nodes(), 2);
    for (name, reg) in [
        ("TV", Regularizer::tv()),
        ("Laplacian", Regularizer::laplacian()),
    ] {
        let exact = reg.evaluate(&graph, &x)?;
        println!("{name}: exact {exact:.4}");
        for budget in [1, 8, 64, 512] {
            let est = estimate_regularizer(&graph, &reg, &x, budget, 20_000, 9)?;
            println!(
                "  L = {budget:>3}: mean {:.4} ± {:.4}",
                est.mean, est.std_error
            );
        }
    }
    Ok(())
}

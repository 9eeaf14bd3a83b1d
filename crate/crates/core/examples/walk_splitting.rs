//! Random walks and their split into simple paths, both offline and streamed.
//!
//! ```bash
//! cargo run --example walk_splitting
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snake::graph::{grid, Graph};
use snake::walks::{decompose_walk, sample_decomposition, sample_walk, PathSampler};

fn main() -> snake::Result<()> {
    // the walk (c, a, e, g, a, f, a, b, h) with a..h numbered 0..6
    let names = ['a', 'b', 'c', 'e', 'f', 'g', 'h'];
    let g = Graph::from_edges(7, [(2, 0), (0, 3), (3, 5), (5, 0), (0, 4), (0, 1), (1, 6)])?;
    let walk = [2, 0, 3, 5, 0, 4, 0, 1, 6];
    for seg in decompose_walk(&walk, &g)?.segments {
        let s: String = seg.iter().map(|&v| names[v]).collect();
        println!("segment {s} (length {})", seg.len());
    }

    let g = grid(5, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let walk = sample_walk(&g, 20, &mut rng)?;
    println!("\nwalk on a 5x5 grid: {walk:?}");
    for seg in decompose_walk(&walk, &g)?.segments {
        println!("  {:?}", seg.nodes());
    }

    // the solver never stores the walk: segments are drawn one at a time
    let mut sampler = PathSampler::new();
    let streamed = sample_decomposition(&g, 20, &mut sampler, &mut rng)?;
    streamed.check()?;
    println!(
        "\nstreamed: {} segments, lengths {:?}",
        streamed.segments.len(),
        streamed
            .segments
            .iter()
            .map(|s| s.len())
            .collect::<Vec<_>>()
    );
    Ok(())
}

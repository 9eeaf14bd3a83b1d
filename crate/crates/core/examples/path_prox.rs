//! Exact proximity operators on a path: taut string for TV, Thomas and DCT
//! for the Laplacian penalty.
//!
//! ```bash
//! cargo run --example path_prox
//! ```

use snake::prox1d::{laplacian_prox_dct, laplacian_prox_path, tv_prox_path};

fn main() -> snake::Result<()> {
    let y: Vec<f64> = (0..16)
        .map(|i| if i < 8 { 0.0 } else { 2.0 } + 0.3 * ((i * 7) as f64).sin())
        .collect();

    let tv = tv_prox_path(&y, 0.4, None)?;
    let lap = laplacian_prox_path(&y, 1.0, None)?;
    let lap_dct = laplacian_prox_dct(&y, 1.0, None)?;
    println!("{:>8} {:>8} {:>8} {:>8}", "y", "tv", "thomas", "dct");
    for i in 0..y.len() {
        println!(
            "{:8.4} {:8.4} {:8.4} {:8.4}",
            y[i], tv[i], lap[i], lap_dct[i]
        );
    }

    // a light middle edge lets the jump through almost untouched
    let mut w = vec![1.0; y.len() - 1];
    w[7] = 0.05;
    let weighted = tv_prox_path(&y, 0.4, Some(&w))?;
    println!(
        "\nweighted TV: {:?}",
        weighted
            .iter()
            .map(|v| (v * 1e3).round() / 1e3)
            .collect::<Vec<_>>()
    );
    Ok(())
}

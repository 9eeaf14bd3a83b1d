//! Generating, writing and reloading graphs in the SNAP edge-list format.
//!
//! ```bash
//! cargo run --example edge_lists
//! ```

use snake::graph::{load_edge_list_str, sample_sbm, write_edge_list};

fn main() -> snake::Result<()> {
    let graph = sample_sbm(&[5, 5], 0.6, 0.1, 4)?;
    let mut buf = Vec::new();
    write_edge_list(&graph, &mut buf)?;
    let text = String::from_utf8(buf).expect("ascii");
    print!(
        "{}",
        text.lines()
            .take(6)
            .map(|l| format!("{l}\n"))
            .collect::<String>()
    );
    println!("...");
    assert_eq!(load_edge_list_str(&text)?, graph);

    // arbitrary ids are renumbered in ascending order; labels are kept
    let g = load_edge_list_str("# comment\n100 7\n7 42\n42 100\n")?;
    for v in 0..g.num_nodes() {
        println!(
            "node {v} is id {} with neighbors {:?}",
            g.label(v),
            g.neighbors(v)
        );
    }
    match load_edge_list_str("1 2\n3 3\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

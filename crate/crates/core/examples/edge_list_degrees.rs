//! Reads an edge list, builds in-, out- and total-degree histograms and
//! writes the total-degree histogram as CSV.
//!
//! ```text
//! cargo run --example edge_list_degrees -- [edges.txt] [out.csv]
//! ```
//!
//! Without arguments a small built-in directed graph is used.

use std::fs::File;
use std::io::{BufReader, Cursor};

use mlm_core::graph_io::{
    degree_histogram, parse_edge_list, save_histogram, DegreeMode, DegreeOptions, EdgeList,
};

const DEMO: &str = "\
# follower -> followee
1 2
1 3
2 3
3 1
4 3
4 3
5 5
";

fn main() -> mlm_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let edges: EdgeList = match args.next() {
        Some(path) => {
            let f = File::open(&path).map_err(|source| mlm_core::Error::File {
                path: path.clone().into(),
                source,
            })?;
            parse_edge_list(BufReader::new(f), true)?
        }
        None => parse_edge_list(Cursor::new(DEMO), true)?,
    };
    println!("{} nodes, {} edges", edges.node_count(), edges.edge_count());

    for mode in [DegreeMode::In, DegreeMode::Out, DegreeMode::Total] {
        for dedup in [false, true] {
            let opts = DegreeOptions {
                mode,
                dedup,
                drop_self_loops: dedup,
            };
            let h = degree_histogram(&edges, &opts)?;
            println!(
                "{mode:?}{}: {:?} ({} zero-degree nodes excluded)",
                if dedup { " dedup, no self-loops" } else { "" },
                h.rows(),
                h.excluded_zero_degree()
            );
        }
    }

    if let Some(out) = args.next() {
        let h = degree_histogram(&edges, &DegreeOptions::default())?;
        save_histogram(&h, std::path::Path::new(&out))?;
        println!("wrote {out}");
    }
    Ok(())
}

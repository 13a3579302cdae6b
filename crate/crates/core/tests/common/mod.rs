#![allow(dead_code)]

use std::path::PathBuf;

use symbiosis::cli::GraphDocument;
use symbiosis::ISGraph;

pub fn fig1_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/fig1.json")
}

pub fn fig1() -> ISGraph {
    GraphDocument::load(&fig1_path())
        .and_then(|d| d.to_graph())
        .expect("bundled case-study graph is valid")
}

/// Hop distances by Floyd–Warshall on the edge structure.
pub fn floyd_warshall(g: &ISGraph) -> Vec<Vec<u64>> {
    let n = g.firm_count();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if g.has_edge(i, j) {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

//! Fixed inputs shared by the benchmarks.

use ptgraph_core::{build_coupled_chain, build_loop_graph, SquareRealMatrix};

/// Loop graph in the strong-coupling island, where the spectrum is real but
/// close to coalescing.
pub fn island_loop(k: usize) -> SquareRealMatrix {
    build_loop_graph(k, 1.035, 1.035, 1.01).expect("valid loop")
}

/// Loop graph well past the transition, with complex pairs.
pub fn broken_loop(k: usize) -> SquareRealMatrix {
    build_loop_graph(k, 0.4, -0.3, 2.5).expect("valid loop")
}

pub fn weak_chain(k: usize) -> SquareRealMatrix {
    build_coupled_chain(k, 0.5).expect("valid chain")
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

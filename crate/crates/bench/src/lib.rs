//! Fixed inputs shared by the benchmarks.

use socialhk::{sample_initial_state, CounterRng, Graph, OpinionState, SampleMode};

/// Connected random graph on `n` vertices, the same for a given `n`.
pub fn graph(n: usize) -> Graph {
    let mut rng = CounterRng::new(n as u64 + 1).expect("nonzero seed");
    Graph::random_connected(n, 0.2, &mut rng).expect("valid size")
}

/// Opinions spread over several confidence intervals, so runs see breaks
/// and merges before they lock.
pub fn spread_state(n: usize) -> OpinionState {
    let hi = (n as f64 / 4.0).max(2.0);
    sample_initial_state(n, 1.0, SampleMode::UniformBox { lo: 0.0, hi }, 17).expect("valid box")
}

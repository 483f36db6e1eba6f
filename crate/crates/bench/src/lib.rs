//! Shared inputs for the benchmarks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sandwich_core::{EdgePair, SimpleGraph};

/// `C_n(1, ..., r)`: each vertex joined to the `r` nearest on either side.
pub fn circulant(n: usize, r: usize) -> SimpleGraph {
    let mut g = SimpleGraph::empty(n);
    for v in 0..n {
        for s in 1..=r {
            g.add_edge(EdgePair::new(v, (v + s) % n).expect("distinct")).expect("in range");
        }
    }
    g
}

/// A dense random host: each pair kept with probability `p`.
pub fn random_host(n: usize, p: f64, seed: u64) -> SimpleGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SimpleGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(EdgePair::new(u, v).expect("distinct")).expect("in range");
            }
        }
    }
    g
}

//! Cross-module invariants on random inputs, checked against the plain
//! enumerators in `support`.

mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sandwich_core::coupling::{run_upper_deletion, Backend};
use sandwich_core::oracle::{count_extensions, count_regular_spanning_subgraphs, count_with_edge, enumerate_regular};
use sandwich_core::switching::{count_alternating_paths, PathQuery};
use sandwich_core::{
    run_experiment, Command, ModelParams, Oracle, OracleConfig, RandomnessTape, RegularCount, SimpleGraph,
    VertexSet,
};

fn host(n: usize, p: f64, seed: u64) -> SimpleGraph {
    support::random_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn count(c: RegularCount) -> u64 {
    u64::try_from(c.0).expect("small count")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn literal_round_trip(n in 1usize..12, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = host(n, p, seed);
        let back: SimpleGraph = g.to_literal().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn counts_match_brute_force(n in 3usize..8, d in 1usize..4, p in 0.3f64..1.0, seed in any::<u64>()) {
        prop_assume!(d < n);
        let f = host(n, p, seed);
        prop_assert_eq!(count(count_regular_spanning_subgraphs(&f, d)), support::brute_count(&f, d));
        prop_assert_eq!(count(count_extensions(&f, d)), support::brute_extensions(&f, d));
    }

    #[test]
    fn complement_duality(n in 3usize..9, d in 0usize..4, p in 0.3f64..1.0, seed in any::<u64>()) {
        prop_assume!(d < n);
        let f = host(n, p, seed);
        prop_assert_eq!(count_regular_spanning_subgraphs(&f, d), count_extensions(&f.complement(), n - 1 - d));
    }

    #[test]
    fn edge_counts_sum_to_edges_times_count(n in 4usize..9, d in 1usize..4, p in 0.5f64..1.0, seed in any::<u64>()) {
        prop_assume!(d < n && (n * d) % 2 == 0);
        let f = host(n, p, seed);
        let total = count(count_regular_spanning_subgraphs(&f, d));
        let sum: u64 = f.edges().map(|e| count(count_with_edge(&f, d, e).unwrap())).sum();
        prop_assert_eq!(sum, total * (n * d / 2) as u64);
    }

    #[test]
    fn enumeration_is_the_family(n in 4usize..8, p in 0.5f64..1.0, seed in any::<u64>()) {
        let f = host(n, p, seed);
        let d = 2;
        let all = enumerate_regular(&f, d, &OracleConfig::default()).unwrap();
        prop_assert_eq!(all.len() as u64, support::brute_count(&f, d));
        for k in &all {
            prop_assert!(k.is_regular(d) && k.is_subgraph_of(&f));
        }
    }

    #[test]
    fn paths_are_symmetric_in_their_ends(n in 4usize..9, seed in any::<u64>(), ell in 1usize..3) {
        let f = host(n, 0.8, seed);
        let k = host(n, 0.5, seed ^ 1).intersection(&f).unwrap();
        let none = VertexSet::empty(n);
        let forward = count_alternating_paths(&f, &k, 0, 1, ell, &none).unwrap();
        let backward = PathQuery { f: &f, k: &k, x: 1, y: Some(0), length: 2 * ell, avoid: None, first: Default::default() };
        // Reversing an even-length path swaps which end carries the F \ K edge.
        let reversed = PathQuery { first: sandwich_core::switching::FirstEdge::Host, ..backward };
        prop_assert_eq!(forward, reversed.count().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn deletion_ends_regular_and_replays(seed in any::<u64>(), trial in 0u64..1000) {
        let p = ModelParams::new(6, 3);
        let oracle = Oracle::default();
        let mut tape = RandomnessTape::for_trial(p.n, seed, trial);
        let (t, g) = run_upper_deletion(&p, &mut tape, &oracle, Backend::Auto).unwrap();
        prop_assert!(g.is_regular(3));
        let mut again = RandomnessTape::for_trial(p.n, seed, trial);
        let (t2, g2) = run_upper_deletion(&p, &mut again, &oracle, Backend::Auto).unwrap();
        prop_assert_eq!(g, g2);
        prop_assert_eq!(t.len(), t2.len());
    }

    #[test]
    fn payload_ignores_jobs(seed in any::<u64>(), jobs in 2usize..6) {
        let mut cfg = sandwich_core::ExperimentConfig::new(Command::CoupleLower, ModelParams::new(6, 3));
        cfg.trials = 30;
        cfg.seed = seed;
        let one = run_experiment(&cfg).unwrap();
        cfg.jobs = jobs;
        let many = run_experiment(&cfg).unwrap();
        prop_assert_eq!(one.payload(), many.payload());
        prop_assert_eq!(many.execution.jobs, jobs);
    }
}

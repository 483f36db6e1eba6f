//! Alternating paths and the switching operations built from them, plus the
//! bipartite switching graphs used to double count.

pub mod aux_graph;
pub mod moves;
pub mod paths;

pub use aux_graph::{
    build_double_edge, build_single_edge, build_six_cycle, build_ten_cycle, verify_double_count, DoubleCountReport,
    SwitchingGraph,
};
pub use moves::{
    double_edge_switches, single_edge_switches, six_cycle_moves, six_cycle_moves_within, six_cycle_statistic, ten_cycle_switches,
    SixCycleMode, SwitchRule,
};
pub use paths::{
    count_alternating_from, count_alternating_paths, count_paths, for_each_path, weighted_endpoint_sum, FirstEdge,
    Layers, PathQuery,
};

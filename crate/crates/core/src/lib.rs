pub mod audit;
pub mod coupling;
pub mod error;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod params;
pub mod switching;
pub mod stats;
pub mod tape;

pub use error::{Error, Result};
pub use graph::{EdgePair, GraphKey, SimpleGraph, Vertex, VertexSet};
pub use oracle::{Oracle, OracleConfig, RegularCount, RegularFamily};
pub use params::{EtaSchedule, ModelParams};
pub use tape::{RandomnessTape, TapeId, UnitDraw};
pub use harness::{run_experiment, Command, ExperimentConfig, Report};

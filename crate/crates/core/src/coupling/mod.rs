//! The coupled random processes: weighted deletion/addition towards a uniform
//! regular graph, the threshold processes producing the binomial graphs, the
//! first-appearance reference sequences, and the exact kernels.

pub mod kernel;
pub mod lower;
pub mod sampling;
pub mod transcript;
pub mod upper;
mod weighted;

pub use kernel::{
    closed_form_law, exact_kernel_step, exact_marginal, verify_marginals, Direction, DistributionTable,
    MarginalCheck,
};
pub use lower::{run_coupled_lower, run_gsub, run_lower_addition, run_lower_reference, LowerCoupling};
pub use transcript::{ProcessKind, ProcessTranscript, StageRecord, Threshold};
pub use upper::{
    comparison_sequence, run_coupled_upper, run_gstar, run_upper_deletion, run_upper_reference,
    verify_transcript_interleaving, InterleavingReport, UpperCoupling,
};
pub use weighted::{Backend, AUTO_FAMILY_LIMIT};

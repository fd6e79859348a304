//! Seeded instance generation and a verification harness that checks the
//! structural identities of the toolkit on a single instance.

mod completeness;
mod instance;
mod oracle;
mod suite;

pub use completeness::{completeness_sweep, CompletenessReport};
pub use instance::{gen_instance, random_instance, random_shape, Instance, InstanceKind, MAX_DIM};
pub use oracle::{brute_force_bound_oracle, BoundEstimate};
pub use suite::{
    penrose_residual, run_random_suite, run_suite, BatchReport, CheckRecord, InstanceHeader, VerificationReport,
    PENROSE_TOL, SAMPLES,
};

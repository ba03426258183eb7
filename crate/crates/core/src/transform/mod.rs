//! Reductions used for scattered backdoor detection.
//!
//! [`finitize`] replaces cost functions by representatives of their type so
//! that the languages become finite, and [`vcsp_to_csp`] turns finite
//! valued languages into crisp ones over an extended domain. Both preserve
//! the minimal backdoors of size at most `k`. [`pipeline_solve`] chains them
//! with exhaustive detection and backdoor evaluation.

mod csp;
mod finitize;
mod pipeline;
mod types;

pub use csp::{vcsp_to_csp, ConstraintProvenance, CspReduction, ExtendedDomain, ExtendedDomainValue, InfinityEncoding};
pub use finitize::{finitize, finitize_with, Finitized};
pub use pipeline::{pipeline_solve, pipeline_solve_with, NoReason, PipelineOutcome};
pub use types::{compute_type, replace_cost_function, TypeKey};

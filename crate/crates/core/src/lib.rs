//! Strong backdoors for valued constraint satisfaction.
//!
//! The crate models VCSP instances with exact rational costs, recognizes
//! the built-in tractable languages (crisp min-closed relations and Boolean
//! submodular functions), detects backdoors into unions and scattered
//! unions of languages, and exploits them to solve instances exactly.
//!
//! Scattered backdoor detection over infinite languages goes through two
//! reductions: [`transform::finitize`] quotients constraints by their type
//! fingerprint to obtain finite languages, and [`transform::vcsp_to_csp`]
//! encodes the finite valued languages as crisp relations over an extended
//! domain. [`transform::pipeline_solve`] chains everything.

pub mod backdoor;
pub mod cost;
pub mod error;
pub mod exec;
pub mod function;
pub mod generators;
pub mod instance;
pub mod language;
pub mod solvers;
pub mod transform;

pub use backdoor::{
    detect_backdoor_branching, detect_backdoor_exhaustive, is_backdoor, solve_with_backdoor, Backdoor,
    BackdoorSolution, SearchStats, Target,
};
pub use cost::Cost;
pub use error::Error;
pub use exec::Exec;
pub use function::CostFunction;
pub use instance::{Component, Decomposition, Instance, PartialAssignment, ValuedConstraint};
pub use language::{instance_in_language, Language, LanguageFamily, LanguageKind};
pub use solvers::{
    brute_force_solve, solve_min_closed, solve_scattered, solve_submodular_boolean, Budget, Solution, SolverKind,
    SolverRegistry,
};

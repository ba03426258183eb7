use crate::backdoor::{
    detect_backdoor_exhaustive_with, failing_assignment, solve_with_backdoor_with, SearchStats, Target,
};
use crate::error::Error;
use crate::exec::Exec;
use crate::language::LanguageFamily;
use crate::instance::Instance;
use crate::solvers::{Budget, Solution, SolverRegistry};

use super::{finitize, vcsp_to_csp, InfinityEncoding};

/// Why the pipeline answered NO.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoReason {
    /// A constraint has arity at least `q + k + 1`.
    ArityGate,
    /// The crisp instance has no scattered backdoor of size at most `k`.
    NoBackdoor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineOutcome {
    No {
        reason: NoReason,
        stats: SearchStats,
    },
    Solved {
        backdoor: Vec<usize>,
        solution: Solution,
        stats: SearchStats,
        assignments_enumerated: u64,
    },
}

pub fn pipeline_solve(instance: &Instance, family: &LanguageFamily, k: usize) -> Result<PipelineOutcome, Error> {
    pipeline_solve_with(instance, family, k, &SolverRegistry::for_family(family), Budget::default())
}

/// Finds a scattered backdoor of size at most `k` through the finite and
/// crisp reductions, checks it against the original instance and solves
/// the instance with it.
pub fn pipeline_solve_with(
    instance: &Instance,
    family: &LanguageFamily,
    k: usize,
    registry: &SolverRegistry,
    budget: Budget,
) -> Result<PipelineOutcome, Error> {
    for lang in family.languages() {
        if !lang.is_conservative() || !lang.is_closed_under_partial_assignments() {
            return Err(Error::Precondition(format!(
                "language {} must be declared conservative and closed under partial assignments",
                lang.name()
            )));
        }
        registry.get(lang.name())?;
    }
    let Some(finite) = finitize(instance, family, k)? else {
        return Ok(PipelineOutcome::No {
            reason: NoReason::ArityGate,
            stats: SearchStats::default(),
        });
    };
    let crisp = vcsp_to_csp(&finite.instance, &finite.family, k, InfinityEncoding::Marker)?;
    let (found, stats) =
        detect_backdoor_exhaustive_with(&crisp.instance, k, &crisp.family, Target::Scattered, budget, Exec::default())?;
    let Some(backdoor) = found else {
        return Ok(PipelineOutcome::No {
            reason: NoReason::NoBackdoor,
            stats,
        });
    };
    if let Some(tau) = failing_assignment(instance, &backdoor, family, Target::Scattered)? {
        return Err(Error::NotABackdoor {
            assignment: tau.iter().collect(),
        });
    }
    let solved = solve_with_backdoor_with(instance, &backdoor, family, Target::Scattered, registry, Exec::default())?;
    Ok(PipelineOutcome::Solved {
        backdoor,
        solution: solved.solution,
        stats,
        assignments_enumerated: solved.assignments_enumerated,
    })
}

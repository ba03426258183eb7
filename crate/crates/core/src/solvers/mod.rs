//! Solvers for the tractable base classes, the brute-force oracle and the
//! component-wise dispatcher for scattered classes.

mod maxflow;
mod min_closed;
mod submodular;

use std::collections::HashMap;

pub use min_closed::solve_min_closed;
pub use submodular::solve_submodular_boolean;

use crate::cost::Cost;
use crate::error::Error;
use crate::exec::{self, Exec};
use crate::instance::{Instance, PartialAssignment};
use crate::language::{instance_in_language, LanguageFamily, LanguageKind};

/// A minimum-cost total assignment together with its cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub assignment: PartialAssignment,
    pub cost: Cost,
}

impl Solution {
    /// Assignment values in ascending variable order, used for
    /// lexicographic tie-breaking.
    pub fn values(&self) -> Vec<usize> {
        self.assignment.iter().map(|(_, v)| v).collect()
    }
}

/// Upper bound on the number of candidates an exhaustive enumeration may
/// visit. Exceeding it is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_candidates: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_candidates: 1 << 24,
        }
    }
}

impl Budget {
    pub fn check(&self, required: u128) -> Result<(), Error> {
        if required > self.max_candidates {
            Err(Error::BudgetExceeded {
                required,
                budget: self.max_candidates,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` as u128, saturating.
pub(crate) fn pow_u128(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Decodes `code` as a tuple of `len` digits in base `d`, most significant first.
pub(crate) fn decode(mut code: u64, d: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = (code % d as u64) as usize;
        code /= d as u64;
    }
}

pub fn brute_force_solve(instance: &Instance) -> Result<Solution, Error> {
    brute_force_solve_with(instance, Budget::default(), Exec::default())
}

/// Enumerates every total assignment; ties go to the lexicographically
/// smallest assignment (variables in ascending order).
pub fn brute_force_solve_with(instance: &Instance, budget: Budget, exec: Exec) -> Result<Solution, Error> {
    let vars = instance.variables();
    let d = instance.domain_size();
    let total = pow_u128(d, vars.len());
    budget.check(total)?;
    let bound = instance.index_bound();
    let (code, cost) = exec::min_by_key(exec, total as u64, |code| {
        let mut digits = vec![0; vars.len()];
        decode(code, d, &mut digits);
        let mut dense = vec![0; bound];
        for (&x, &v) in vars.iter().zip(&digits) {
            dense[x] = v;
        }
        Some(instance.evaluate_with(|x| dense[x]))
    })
    .expect("at least one assignment");
    let mut digits = vec![0; vars.len()];
    decode(code, d, &mut digits);
    Ok(Solution {
        assignment: vars.iter().copied().zip(digits).collect(),
        cost,
    })
}

/// All variables at value 0; the lexicographically smallest assignment.
pub(crate) fn zero_assignment(instance: &Instance) -> PartialAssignment {
    instance.variables().iter().map(|&x| (x, 0)).collect()
}

/// Solver attached to a language.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    MinClosed,
    Submodular,
    /// Exhaustive enumeration within the default budget. Used for finite
    /// languages loaded from files, which carry no dedicated algorithm.
    BruteForce,
}

impl SolverKind {
    pub fn solve(self, instance: &Instance) -> Result<Solution, Error> {
        match self {
            SolverKind::MinClosed => solve_min_closed(instance),
            SolverKind::Submodular => solve_submodular_boolean(instance),
            SolverKind::BruteForce => brute_force_solve_with(instance, Budget::default(), Exec::Sequential),
        }
    }
}

/// Maps language names to solvers.
#[derive(Clone, Debug, Default)]
pub struct SolverRegistry {
    by_name: HashMap<String, SolverKind>,
}

impl SolverRegistry {
    /// Built-in families get their polynomial solvers, finite languages
    /// fall back to brute force.
    pub fn for_family(family: &LanguageFamily) -> Self {
        let mut reg = SolverRegistry::default();
        for lang in family.languages() {
            let kind = match lang.kind() {
                LanguageKind::MinClosedCrisp => SolverKind::MinClosed,
                LanguageKind::SubmodularBoolean => SolverKind::Submodular,
                LanguageKind::FiniteExplicit(_) => SolverKind::BruteForce,
            };
            reg.register(lang.name(), kind);
        }
        reg
    }

    pub fn register(&mut self, name: impl Into<String>, kind: SolverKind) {
        self.by_name.insert(name.into(), kind);
    }

    pub fn get(&self, name: &str) -> Result<SolverKind, Error> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLanguage(name.to_string()))
    }
}

/// Solves an instance lying in `VCSP[Gamma_i]` for some `i`, using the
/// solver of the lowest such `i`.
pub fn solve_in_union(instance: &Instance, family: &LanguageFamily) -> Result<Solution, Error> {
    solve_in_union_with(instance, family, &SolverRegistry::for_family(family))
}

pub fn solve_in_union_with(
    instance: &Instance,
    family: &LanguageFamily,
    registry: &SolverRegistry,
) -> Result<Solution, Error> {
    for lang in family.languages() {
        if instance_in_language(instance, lang)? {
            return registry.get(lang.name())?.solve(instance);
        }
    }
    Err(Error::ComponentOutsideFamily {
        variables: instance.variables().to_vec(),
    })
}

pub fn solve_scattered(instance: &Instance, family: &LanguageFamily) -> Result<Solution, Error> {
    solve_scattered_with(instance, family, &SolverRegistry::for_family(family), Exec::default())
}

/// Solves every connected component with the solver of the lowest-index
/// language containing it and merges the results.
pub fn solve_scattered_with(
    instance: &Instance,
    family: &LanguageFamily,
    registry: &SolverRegistry,
    exec: Exec,
) -> Result<Solution, Error> {
    let dec = instance.connected_components();
    let parts = exec::map(exec, dec.components.len(), |i| {
        solve_in_union_with(&instance.subinstance(&dec.components[i]), family, registry)
    });
    let mut assignment = PartialAssignment::new();
    let mut cost = instance.constant_cost();
    for part in parts {
        let part = part?;
        cost += &part.cost;
        assignment = assignment.union(&part.assignment);
    }
    Ok(Solution { assignment, cost })
}

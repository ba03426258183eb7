//! Backdoor verification, detection and exploitation.
//!
//! A set `X` of variables is a backdoor into a class `H` when every
//! assignment `tau: X -> D` reduces the instance into `H`. Two targets are
//! supported over a [`LanguageFamily`] `Gamma_1..Gamma_l`:
//!
//! * [`Target::Union`]: `P|tau` lies in `VCSP[Gamma_i]` for some `i`;
//! * [`Target::Scattered`]: every connected component of `P|tau` lies in
//!   some `VCSP[Gamma_i]`, chosen per component.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::Error;
use crate::exec::{self, Exec};
use crate::instance::{components_of, Instance, PartialAssignment};
use crate::language::{LanguageFamily, LanguageMask};
use crate::solvers::{
    decode, pow_u128, solve_in_union_with, solve_scattered_with, Budget, Solution, SolverRegistry,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Union,
    Scattered,
}

/// Search instrumentation. Exact in sequential mode; in parallel mode
/// `assignments_checked` of the exhaustive detector may overcount.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_visited: u64,
    pub assignments_checked: u64,
}

/// A variable set confirmed by [`is_backdoor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Backdoor {
    variables: Vec<usize>,
    target: Target,
}

impl Backdoor {
    /// Returns `Some` only if `variables` passes [`is_backdoor`].
    pub fn verify(
        instance: &Instance,
        variables: &[usize],
        family: &LanguageFamily,
        target: Target,
    ) -> Result<Option<Backdoor>, Error> {
        Ok(is_backdoor(instance, variables, family, target)?.then(|| Backdoor {
            variables: normalize(variables),
            target,
        }))
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn target(&self) -> Target {
        self.target
    }
}

fn normalize(vars: &[usize]) -> Vec<usize> {
    let mut v = vars.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Precomputed membership data for checking one candidate set.
struct Checker {
    domain_size: usize,
    backdoor: Vec<usize>,
    /// Per constraint: indices into `backdoor` of its distinct backdoor
    /// variables and the membership mask for each local assignment code.
    local_vars: Vec<Vec<usize>>,
    masks: Vec<Vec<LanguageMask>>,
    /// Constraint groups that must share a language.
    groups: Vec<Vec<usize>>,
}

impl Checker {
    fn new(instance: &Instance, backdoor: &[usize], family: &LanguageFamily, target: Target) -> Result<Self, Error> {
        if instance.domain_size() != family.domain_size() {
            return Err(Error::DomainMismatch {
                expected: family.domain_size(),
                found: instance.domain_size(),
            });
        }
        let backdoor = normalize(backdoor);
        if let Some(&x) = backdoor.iter().find(|&&x| !instance.has_variable(x)) {
            return Err(Error::UnknownVariable(x));
        }
        let d = instance.domain_size();
        let in_backdoor = |x: usize| backdoor.binary_search(&x).ok();
        let mut cache: HashMap<crate::function::CostFunction, LanguageMask> = HashMap::new();
        let mut local_vars = Vec::new();
        let mut masks = Vec::new();
        let mut dense = vec![None; instance.index_bound()];
        for c in instance.constraints() {
            let local: Vec<usize> = c.variables().into_iter().filter_map(in_backdoor).collect();
            let count = d.pow(local.len() as u32);
            let mut values = vec![0; local.len()];
            let mut table = Vec::with_capacity(count);
            for code in 0..count as u64 {
                decode(code, d, &mut values);
                for (&i, &v) in local.iter().zip(&values) {
                    dense[backdoor[i]] = Some(v);
                }
                let restricted = c.restrict_dense(&dense);
                let mask = *cache
                    .entry(restricted.function().clone())
                    .or_insert_with(|| family.membership_mask(restricted.function()));
                table.push(mask);
            }
            for &i in &local {
                dense[backdoor[i]] = None;
            }
            local_vars.push(local);
            masks.push(table);
        }
        let remaining: Vec<usize> = instance
            .variables()
            .iter()
            .copied()
            .filter(|&x| in_backdoor(x).is_none())
            .collect();
        let dec = components_of(&remaining, instance.constraints().iter().map(|c| c.scope()));
        let groups = match target {
            Target::Scattered => dec.components.into_iter().map(|c| c.constraints).collect(),
            Target::Union => vec![dec.components.into_iter().flat_map(|c| c.constraints).collect()],
        };
        Ok(Checker {
            domain_size: d,
            backdoor,
            local_vars,
            masks,
            groups,
        })
    }

    fn assignments(&self) -> u128 {
        pow_u128(self.domain_size, self.backdoor.len())
    }

    /// Does the assignment with this code (over the sorted backdoor,
    /// first variable most significant) reduce into the class?
    fn passes(&self, code: u64) -> bool {
        let mut values = vec![0; self.backdoor.len()];
        decode(code, self.domain_size, &mut values);
        let mask_of = |c: usize| {
            let local = self.local_vars[c]
                .iter()
                .fold(0usize, |acc, &i| acc * self.domain_size + values[i]);
            self.masks[c][local]
        };
        self.groups
            .iter()
            .all(|g| g.iter().fold(LanguageMask::MAX, |m, &c| m & mask_of(c)) != 0)
    }

    /// First failing assignment code in lexicographic order.
    fn first_failure(&self, exec: Exec) -> Option<u64> {
        exec::find_first(exec, self.assignments() as u64, |code| (!self.passes(code)).then_some(code))
    }
}

pub fn is_backdoor(instance: &Instance, variables: &[usize], family: &LanguageFamily, target: Target) -> Result<bool, Error> {
    is_backdoor_with(instance, variables, family, target, Exec::default())
}

pub fn is_backdoor_with(
    instance: &Instance,
    variables: &[usize],
    family: &LanguageFamily,
    target: Target,
    exec: Exec,
) -> Result<bool, Error> {
    let checker = Checker::new(instance, variables, family, target)?;
    Budget::default().check(checker.assignments())?;
    Ok(checker.first_failure(exec).is_none())
}

/// The lexicographically first assignment to `variables` whose reduced
/// instance falls outside the class, if any.
pub fn failing_assignment(
    instance: &Instance,
    variables: &[usize],
    family: &LanguageFamily,
    target: Target,
) -> Result<Option<PartialAssignment>, Error> {
    let checker = Checker::new(instance, variables, family, target)?;
    Ok(checker.first_failure(Exec::default()).map(|code| {
        let mut values = vec![0; checker.backdoor.len()];
        decode(code, checker.domain_size, &mut values);
        checker.backdoor.iter().copied().zip(values).collect()
    }))
}

/// `X` is a backdoor and no proper subset of it is.
pub fn is_minimal_backdoor(
    instance: &Instance,
    variables: &[usize],
    family: &LanguageFamily,
    target: Target,
) -> Result<bool, Error> {
    let vars = normalize(variables);
    if !is_backdoor(instance, &vars, family, target)? {
        return Ok(false);
    }
    for mask in 0..(1u64 << vars.len()) - 1 {
        let subset: Vec<usize> = (0..vars.len()).filter(|i| mask >> i & 1 == 1).map(|i| vars[i]).collect();
        if is_backdoor(instance, &subset, family, target)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every minimal backdoor of size at most `k`, in order of size and then
/// lexicographically.
pub fn minimal_backdoors(
    instance: &Instance,
    k: usize,
    family: &LanguageFamily,
    target: Target,
) -> Result<Vec<Vec<usize>>, Error> {
    let vars = instance.variables();
    let mut status: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut minimal = Vec::new();
    for size in 0..=k.min(vars.len()) {
        let sets = combinations(vars, size);
        let verdicts = exec::map(Exec::default(), sets.len(), |i| {
            is_backdoor_with(instance, &sets[i], family, target, Exec::Sequential)
        });
        for (set, verdict) in sets.into_iter().zip(verdicts) {
            let verdict = verdict?;
            if verdict {
                let has_smaller = (0..(1u64 << set.len()) - 1).any(|mask| {
                    let subset: Vec<usize> =
                        (0..set.len()).filter(|i| mask >> i & 1 == 1).map(|i| set[i]).collect();
                    status[&subset]
                });
                if !has_smaller {
                    minimal.push(set.clone());
                }
            }
            status.insert(set, verdict);
        }
    }
    Ok(minimal)
}

/// All `size`-subsets of `items` in lexicographic order.
pub(crate) fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    if size > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(pos) = (0..size).rev().find(|&i| idx[i] < n - size + i) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Worst-case node count of [`detect_backdoor_branching`].
///
/// At most one of the per-language violating constraints can have more than
/// `q` variables (it then violates every language and all the others have
/// lower index), so a node has at most `l*q + 1` children. For `l >= 2`,
/// `sum_{i<=k} (l*q + 1)^i <= (l*(q + 1))^k`. For a single language the
/// children number `q + 1` and the full geometric sum is needed.
pub fn branching_node_bound(languages: usize, q: usize, k: usize) -> u128 {
    if languages >= 2 {
        pow_u128(languages * (q + 1), k)
    } else {
        (0..=k).map(|i| pow_u128(q + 1, i)).sum()
    }
}

pub fn detect_backdoor_branching(
    instance: &Instance,
    k: usize,
    family: &LanguageFamily,
) -> Result<(Option<Vec<usize>>, SearchStats), Error> {
    detect_backdoor_branching_with(instance, k, family, Exec::default())
}

/// Bounded search-tree detection of a backdoor of size at most `k` into
/// the union `VCSP[Gamma_1] u .. u VCSP[Gamma_l]`.
///
/// At a node with partial set `B` that is not yet a backdoor, take the
/// first assignment `sigma: B -> D` that fails and, for every language, the
/// lowest-index constraint of `P|sigma` outside it. Any backdoor containing
/// `B` must touch one of these constraints in the chosen variables (the
/// whole scope, or its `q + 1` lowest variables for scopes with more than
/// `q` variables), so the search branches on them in ascending order.
pub fn detect_backdoor_branching_with(
    instance: &Instance,
    k: usize,
    family: &LanguageFamily,
    exec: Exec,
) -> Result<(Option<Vec<usize>>, SearchStats), Error> {
    let mut stats = SearchStats::default();
    let found = branch(instance, k, family, exec, Vec::new(), &mut stats)?;
    Ok((found, stats))
}

fn branch(
    instance: &Instance,
    k: usize,
    family: &LanguageFamily,
    exec: Exec,
    current: Vec<usize>,
    stats: &mut SearchStats,
) -> Result<Option<Vec<usize>>, Error> {
    stats.nodes_visited += 1;
    let checker = Checker::new(instance, &current, family, Target::Union)?;
    let Some(code) = checker.first_failure(exec) else {
        stats.assignments_checked += checker.assignments() as u64;
        return Ok(Some(current));
    };
    stats.assignments_checked += code + 1;
    if current.len() >= k {
        return Ok(None);
    }
    let mut values = vec![0; checker.backdoor.len()];
    decode(code, checker.domain_size, &mut values);
    let sigma: PartialAssignment = checker.backdoor.iter().copied().zip(values).collect();
    let reduced = instance.apply_assignment(&sigma)?;

    let q = family.max_arity();
    let mut branch_on: Vec<usize> = Vec::new();
    for lang in family.languages() {
        let violating = reduced
            .constraints()
            .iter()
            .find(|c| !lang.accepts(c.function()))
            .expect("a failing assignment leaves a violation for every language");
        let vars = violating.variables();
        let take = if vars.len() > q { q + 1 } else { vars.len() };
        branch_on.extend_from_slice(&vars[..take]);
    }
    branch_on.sort_unstable();
    branch_on.dedup();
    for x in branch_on {
        let mut next = current.clone();
        next.push(x);
        next.sort_unstable();
        if let Some(found) = branch(instance, k, family, exec, next, stats)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

pub fn detect_backdoor_exhaustive(
    instance: &Instance,
    k: usize,
    family: &LanguageFamily,
    target: Target,
) -> Result<(Option<Vec<usize>>, SearchStats), Error> {
    detect_backdoor_exhaustive_with(instance, k, family, target, Budget::default(), Exec::default())
}

/// The lexicographically smallest backdoor of minimum size, trying every
/// variable set of size `0..=k`.
pub fn detect_backdoor_exhaustive_with(
    instance: &Instance,
    k: usize,
    family: &LanguageFamily,
    target: Target,
    budget: Budget,
    exec: Exec,
) -> Result<(Option<Vec<usize>>, SearchStats), Error> {
    let vars = instance.variables();
    let n = vars.len();
    let k = k.min(n);
    let d = instance.domain_size();
    let mut required: u128 = 0;
    let mut choose: u128 = 1;
    for s in 0..=k {
        if s > 0 {
            choose = choose * (n - s + 1) as u128 / s as u128;
        }
        required = required.saturating_add(choose.saturating_mul(pow_u128(d, s)));
    }
    budget.check(required)?;

    let mut stats = SearchStats::default();
    for size in 0..=k {
        let sets = combinations(vars, size);
        let checked = AtomicU64::new(0);
        let hit = exec::find_first(exec, sets.len() as u64, |i| {
            let checker = match Checker::new(instance, &sets[i as usize], family, target) {
                Ok(c) => c,
                Err(e) => return Some(Err(e)),
            };
            match checker.first_failure(Exec::Sequential) {
                None => {
                    checked.fetch_add(checker.assignments() as u64, Ordering::Relaxed);
                    Some(Ok(i))
                }
                Some(code) => {
                    checked.fetch_add(code + 1, Ordering::Relaxed);
                    None
                }
            }
        });
        stats.assignments_checked += checked.into_inner();
        match hit {
            Some(Ok(i)) => {
                stats.nodes_visited += i + 1;
                return Ok((Some(sets[i as usize].clone()), stats));
            }
            Some(Err(e)) => return Err(e),
            None => stats.nodes_visited += sets.len() as u64,
        }
    }
    Ok((None, stats))
}

/// Result of exploiting a backdoor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackdoorSolution {
    pub solution: Solution,
    /// Number of assignments to the backdoor that were solved, `d^|X|`.
    pub assignments_enumerated: u64,
}

pub fn solve_with_backdoor(
    instance: &Instance,
    variables: &[usize],
    family: &LanguageFamily,
    target: Target,
) -> Result<BackdoorSolution, Error> {
    solve_with_backdoor_with(
        instance,
        variables,
        family,
        target,
        &SolverRegistry::for_family(family),
        Exec::default(),
    )
}

/// Solves `P|tau` with the class solver for every `tau: X -> D` and keeps
/// the cheapest `tau` together with its completion. Ties go to the
/// lexicographically smallest `tau`.
pub fn solve_with_backdoor_with(
    instance: &Instance,
    variables: &[usize],
    family: &LanguageFamily,
    target: Target,
    registry: &SolverRegistry,
    exec: Exec,
) -> Result<BackdoorSolution, Error> {
    let backdoor = normalize(variables);
    if let Some(&x) = backdoor.iter().find(|&&x| !instance.has_variable(x)) {
        return Err(Error::UnknownVariable(x));
    }
    let d = instance.domain_size();
    let total = pow_u128(d, backdoor.len());
    Budget::default().check(total)?;
    let total = total as u64;
    let tau_of = |code: u64| -> PartialAssignment {
        let mut values = vec![0; backdoor.len()];
        decode(code, d, &mut values);
        backdoor.iter().copied().zip(values).collect()
    };
    let results = exec::map(exec, total as usize, |code| {
        let tau = tau_of(code as u64);
        let reduced = instance.apply_assignment(&tau)?;
        let solved = match target {
            Target::Union => solve_in_union_with(&reduced, family, registry),
            Target::Scattered => solve_scattered_with(&reduced, family, registry, Exec::Sequential),
        };
        match solved {
            Ok(s) => Ok(s),
            Err(Error::ComponentOutsideFamily { .. }) => Err(Error::NotABackdoor {
                assignment: tau.iter().collect(),
            }),
            Err(e) => Err(e),
        }
    });
    let mut best: Option<(u64, Solution)> = None;
    for (code, result) in results.into_iter().enumerate() {
        let s = result?;
        if best.as_ref().is_none_or(|(_, b)| s.cost < b.cost) {
            best = Some((code as u64, s));
        }
    }
    let (code, partial) = best.expect("at least one assignment");
    let assignment = partial.assignment.union(&tau_of(code));
    Ok(BackdoorSolution {
        solution: Solution {
            assignment,
            cost: partial.cost,
        },
        assignments_enumerated: total,
    })
}

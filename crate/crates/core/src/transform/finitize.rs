use std::collections::HashMap;

use crate::error::Error;
use crate::exec::{self, Exec};
use crate::function::CostFunction;
use crate::instance::{Instance, ValuedConstraint};
use crate::language::{Language, LanguageFamily};
use crate::solvers::pow_u128;

use super::types::{function_type, TypeKey};

/// Output of [`finitize`]: an instance whose cost functions are type
/// representatives, and finite languages that preserve its small backdoors.
#[derive(Clone, Debug)]
pub struct Finitized {
    pub instance: Instance,
    /// One finite, closed language per input language, same names and order.
    pub family: LanguageFamily,
    /// Type of every constraint.
    pub types: Vec<TypeKey>,
    /// Index of the representative of every constraint's type.
    pub representatives: Vec<usize>,
}

impl Finitized {
    pub fn distinct_types(&self) -> usize {
        let mut reps = self.representatives.clone();
        reps.sort_unstable();
        reps.dedup();
        reps.len()
    }

    /// Concrete bound on each finite language: every representative of arity
    /// `r` has `(d + 1)^r` restrictions.
    pub fn language_size_bound(&self) -> u128 {
        let d = self.instance.domain_size();
        let mut reps = self.representatives.clone();
        reps.sort_unstable();
        reps.dedup();
        reps.iter()
            .map(|&r| pow_u128(d + 1, self.instance.constraints()[r].arity()))
            .sum()
    }
}

/// Replaces every cost function by the function of the lowest-index
/// constraint of the same type and collects, per language, the
/// representatives' restrictions that it accepts.
///
/// Returns `None` when some constraint has arity at least `q + k + 1`: fixing
/// `k` of its variables leaves more than `q` free, so no backdoor of size
/// `k` exists.
pub fn finitize(instance: &Instance, family: &LanguageFamily, k: usize) -> Result<Option<Finitized>, Error> {
    finitize_with(instance, family, k, Exec::default())
}

pub fn finitize_with(
    instance: &Instance,
    family: &LanguageFamily,
    k: usize,
    exec: Exec,
) -> Result<Option<Finitized>, Error> {
    if instance.domain_size() != family.domain_size() {
        return Err(Error::DomainMismatch {
            expected: family.domain_size(),
            found: instance.domain_size(),
        });
    }
    let q = family.max_arity();
    if instance.constraints().iter().any(|c| c.arity() > q + k) {
        return Ok(None);
    }
    let constraints = instance.constraints();
    let types: Vec<TypeKey> = exec::map(exec, constraints.len(), |i| function_type(constraints[i].function(), family));

    let mut first: HashMap<&TypeKey, usize> = HashMap::new();
    let representatives: Vec<usize> = types.iter().enumerate().map(|(i, t)| *first.entry(t).or_insert(i)).collect();

    let replaced: Vec<ValuedConstraint> = constraints
        .iter()
        .zip(&representatives)
        .map(|(c, &r)| ValuedConstraint::new(c.scope().to_vec(), constraints[r].function().clone()))
        .collect::<Result<_, _>>()?;
    let finite_instance = Instance::with_variables(instance.variables().to_vec(), instance.domain_size(), replaced)?;

    let mut reps = representatives.clone();
    reps.sort_unstable();
    reps.dedup();
    let mut languages = Vec::with_capacity(family.len());
    for (i, lang) in family.languages().iter().enumerate() {
        let mut members: Vec<CostFunction> = Vec::new();
        for &r in &reps {
            let f = constraints[r].function();
            for ((_, _, g), mask) in f.restrictions().zip(types[r].masks()) {
                if mask >> i & 1 == 1 {
                    members.push(g);
                }
            }
        }
        let finite = Language::finite(lang.name(), instance.domain_size(), members)?
            .closure_under_partial_assignments()?
            .with_arity_bound(lang.arity_bound());
        languages.push(finite);
    }
    Ok(Some(Finitized {
        instance: finite_instance,
        family: LanguageFamily::new(languages)?,
        types,
        representatives,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backdoor::{is_backdoor, Target};
    use crate::cost::Cost;

    #[test]
    fn single_type_collapses_to_first_function() {
        // two distinct all-finite unary tables over a family that accepts
        // every unary function have the same type
        let fam = LanguageFamily::horn_and_submodular(2);
        let mut p = Instance::empty(2, 2);
        p.add(vec![0], CostFunction::new(1, 2, vec![Cost::integer(1), Cost::zero()]).unwrap()).unwrap();
        p.add(vec![1], CostFunction::new(1, 2, vec![Cost::integer(3), Cost::integer(2)]).unwrap()).unwrap();
        let f = finitize(&p, &fam, 0).unwrap().unwrap();
        assert_eq!(f.representatives, vec![0, 0]);
        for c in f.instance.constraints() {
            assert_eq!(c.function(), p.constraints()[0].function());
        }
        assert_eq!(f.distinct_types(), 1);
    }

    #[test]
    fn arity_gate_says_no() {
        let fam = LanguageFamily::horn_and_submodular(2);
        let mut p = Instance::empty(4, 2);
        p.add(vec![0, 1, 2, 3], CostFunction::crisp(4, 2, |_| true).unwrap()).unwrap();
        assert!(finitize(&p, &fam, 1).unwrap().is_none());
        assert!(finitize(&p, &fam, 2).unwrap().is_some());
    }

    #[test]
    fn finite_languages_are_closed_and_bounded() {
        let fam = LanguageFamily::horn_and_submodular(2);
        let p = crate::generators::random_mixed(4, 5, 6, 3).unwrap();
        let f = finitize(&p, &fam, 1).unwrap().unwrap();
        for lang in f.family.languages() {
            let set = lang.functions().unwrap();
            assert!(lang.is_closed_under_partial_assignments());
            assert!(set.len() as u128 <= f.language_size_bound());
            assert_eq!(&lang.closure_under_partial_assignments().unwrap(), lang);
            assert!(set.iter().all(|g| g.arity() <= 2));
        }
        for x in 0..5 {
            assert_eq!(
                is_backdoor(&p, &[x], &fam, Target::Scattered).unwrap(),
                is_backdoor(&f.instance, &[x], &f.family, Target::Scattered).unwrap()
            );
        }
    }
}

use std::collections::BTreeSet;
use std::fmt;

use crate::cost::Cost;
use crate::error::Error;
use crate::function::{increment, CostFunction};
use crate::instance::{Instance, ValuedConstraint};
use crate::language::{Language, LanguageFamily};

/// How infinite costs are written in the appended value column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InfinityEncoding {
    /// Infinity is a cost value of its own, placed after the finite ones.
    #[default]
    Marker,
    /// Infinity is not a cost value; rows with infinite cost use epsilon.
    Epsilon,
}

/// A value of the extended domain. The three variants never coincide.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedDomainValue {
    Domain(usize),
    CostValue(Cost),
    Epsilon,
}

impl fmt::Display for ExtendedDomainValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedDomainValue::Domain(v) => write!(f, "d{v}"),
            ExtendedDomainValue::CostValue(c) => write!(f, "c{c}"),
            ExtendedDomainValue::Epsilon => f.write_str("eps"),
        }
    }
}

/// The extended domain: the original values `0..d`, then the cost values
/// in increasing order, then epsilon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedDomain {
    domain_size: usize,
    costs: Vec<Cost>,
}

impl ExtendedDomain {
    pub fn len(&self) -> usize {
        self.domain_size + self.costs.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cost_values(&self) -> &[Cost] {
        &self.costs
    }

    pub fn value(&self, index: usize) -> Option<ExtendedDomainValue> {
        let d = self.domain_size;
        match index {
            i if i < d => Some(ExtendedDomainValue::Domain(i)),
            i if i < d + self.costs.len() => Some(ExtendedDomainValue::CostValue(self.costs[i - d].clone())),
            i if i == d + self.costs.len() => Some(ExtendedDomainValue::Epsilon),
            _ => None,
        }
    }

    pub fn epsilon(&self) -> usize {
        self.domain_size + self.costs.len()
    }

    /// Index of a cost, epsilon if it is not a cost value.
    pub fn encode_cost(&self, c: &Cost) -> usize {
        match self.costs.binary_search(c) {
            Ok(i) => self.domain_size + i,
            Err(_) => self.epsilon(),
        }
    }
}

/// Fresh variables and constraints created for one input constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintProvenance {
    pub original: usize,
    pub fresh_variables: Vec<usize>,
    pub constraints: Vec<usize>,
}

/// Output of [`vcsp_to_csp`].
#[derive(Clone, Debug)]
pub struct CspReduction {
    /// Crisp instance over the extended domain.
    pub instance: Instance,
    /// Crisp finite languages, closed under partial assignments.
    pub family: LanguageFamily,
    pub domain: ExtendedDomain,
    pub provenance: Vec<ConstraintProvenance>,
}

impl CspReduction {
    pub fn is_fresh(&self, x: usize) -> bool {
        self.provenance.iter().any(|p| p.fresh_variables.contains(&x))
    }
}

/// Graph of `f` as a crisp relation of arity `t + 1` over the extended
/// domain: the tuple `(x, c)` is allowed iff `c` encodes `f(x)`.
fn graph(f: &CostFunction, domain: &ExtendedDomain) -> Result<CostFunction, Error> {
    let t = f.arity();
    let mut tuples = Vec::with_capacity(f.len());
    let mut x = vec![0; t];
    loop {
        let mut row = x.clone();
        row.push(domain.encode_cost(f.value(&x)));
        tuples.push(row);
        if !increment(&mut x, f.domain_size()) {
            break;
        }
    }
    CostFunction::relation(t + 1, domain.len(), &tuples)
}

/// Encodes backdoor detection for finite valued languages as backdoor
/// detection for crisp languages.
///
/// Each constraint with function `f` becomes `k + 1` copies of the graph of
/// `f`, each with its own fresh value variable. Every language is replaced
/// by the closure of the graphs of its members together with the empty
/// relations of arity up to `q + 1`.
pub fn vcsp_to_csp(
    instance: &Instance,
    family: &LanguageFamily,
    k: usize,
    encoding: InfinityEncoding,
) -> Result<CspReduction, Error> {
    let d = instance.domain_size();
    if d != family.domain_size() {
        return Err(Error::DomainMismatch {
            expected: family.domain_size(),
            found: d,
        });
    }
    let mut values: BTreeSet<Cost> = BTreeSet::new();
    for lang in family.languages() {
        let set = lang.functions().ok_or_else(|| Error::NotFinite(lang.name().to_string()))?;
        for f in set {
            values.extend(f.distinct_values().iter().cloned());
        }
    }
    if encoding == InfinityEncoding::Epsilon {
        values.remove(&Cost::Infinite);
    }
    // BTreeSet order puts infinity after every finite cost
    let domain = ExtendedDomain {
        domain_size: d,
        costs: values.into_iter().collect(),
    };
    let wide = domain.len();
    let q = family.max_arity();

    let mut languages = Vec::with_capacity(family.len());
    for lang in family.languages() {
        let mut members = Vec::new();
        for f in lang.functions().expect("checked above") {
            members.push(graph(f, &domain)?);
        }
        let closed = Language::finite(lang.name(), wide, members)?.closure_under_partial_assignments()?;
        let mut all: Vec<CostFunction> = closed.functions().expect("finite").iter().cloned().collect();
        for arity in 1..=q + 1 {
            all.push(CostFunction::crisp(arity, wide, |_| false)?);
        }
        languages.push(
            Language::finite(lang.name(), wide, all)?
                .with_arity_bound(q + 1)
                .declare_closed(true),
        );
    }

    let base = instance.index_bound();
    let mut variables = instance.variables().to_vec();
    let mut constraints = Vec::new();
    let mut provenance = Vec::new();
    for (j, c) in instance.constraints().iter().enumerate() {
        let relation = graph(c.function(), &domain)?;
        let fresh: Vec<usize> = (0..=k).map(|i| base + j * (k + 1) + i).collect();
        let mut created = Vec::new();
        for &v in &fresh {
            let mut scope = c.scope().to_vec();
            scope.push(v);
            created.push(constraints.len());
            constraints.push(ValuedConstraint::new(scope, relation.clone())?);
        }
        variables.extend_from_slice(&fresh);
        provenance.push(ConstraintProvenance {
            original: j,
            fresh_variables: fresh,
            constraints: created,
        });
    }
    Ok(CspReduction {
        instance: Instance::with_variables(variables, wide, constraints)?,
        family: LanguageFamily::new(languages)?,
        domain,
        provenance,
    })
}

//! VCSP instances, partial assignments and connectivity.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use crate::cost::Cost;
use crate::error::Error;
use crate::function::CostFunction;

/// A cost function attached to a tuple of variables. Variables may repeat.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValuedConstraint {
    scope: Vec<usize>,
    function: CostFunction,
}

impl ValuedConstraint {
    pub fn new(scope: Vec<usize>, function: CostFunction) -> Result<Self, Error> {
        if scope.len() != function.arity() {
            return Err(Error::ArityMismatch {
                expected: function.arity(),
                found: scope.len(),
            });
        }
        Ok(ValuedConstraint { scope, function })
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn function(&self) -> &CostFunction {
        &self.function
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    /// Distinct scope variables in ascending order.
    pub fn variables(&self) -> Vec<usize> {
        let mut vars = self.scope.clone();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Applies a dense partial assignment indexed by variable.
    pub(crate) fn restrict_dense(&self, values: &[Option<usize>]) -> ValuedConstraint {
        let fixed: Vec<Option<usize>> = self
            .scope
            .iter()
            .map(|&x| values.get(x).copied().flatten())
            .collect();
        if fixed.iter().all(Option::is_none) {
            return self.clone();
        }
        let scope = self
            .scope
            .iter()
            .zip(&fixed)
            .filter(|(_, f)| f.is_none())
            .map(|(&x, _)| x)
            .collect();
        ValuedConstraint {
            scope,
            function: self.function.restrict_unchecked(&fixed),
        }
    }
}

/// A partial map from variables to domain values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialAssignment {
    bindings: BTreeMap<usize, usize>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, variable: usize, value: usize) -> &mut Self {
        self.bindings.insert(variable, value);
        self
    }

    pub fn get(&self, variable: usize) -> Option<usize> {
        self.bindings.get(&variable).copied()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Bindings in ascending variable order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bindings.iter().map(|(&k, &v)| (k, v))
    }

    pub fn variables(&self) -> Vec<usize> {
        self.bindings.keys().copied().collect()
    }

    /// Union of two assignments; bindings in `other` win on overlap.
    pub fn union(&self, other: &PartialAssignment) -> PartialAssignment {
        let mut out = self.clone();
        out.bindings.extend(other.iter());
        out
    }

    pub(crate) fn to_dense(&self, bound: usize) -> Vec<Option<usize>> {
        let size = bound.max(self.bindings.keys().next_back().map_or(0, |m| m + 1));
        let mut dense = vec![None; size];
        for (x, v) in self.iter() {
            dense[x] = Some(v);
        }
        dense
    }
}

impl FromIterator<(usize, usize)> for PartialAssignment {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        PartialAssignment {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// A VCSP instance. Variables keep their original indices through
/// partial-assignment application, so reduced instances and components
/// refer to the same variable names as the instance they came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    domain_size: usize,
    variables: Vec<usize>,
    constraints: Vec<ValuedConstraint>,
}

/// One maximal connected subinstance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub variables: Vec<usize>,
    pub constraints: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Ordered by smallest variable.
    pub components: Vec<Component>,
    /// Indices of nullary constraints; they belong to no component.
    pub nullary: Vec<usize>,
}

impl Instance {
    /// An instance over variables `0..num_variables`.
    pub fn new(
        num_variables: usize,
        domain_size: usize,
        constraints: Vec<ValuedConstraint>,
    ) -> Result<Self, Error> {
        Self::with_variables((0..num_variables).collect(), domain_size, constraints)
    }

    pub fn with_variables(
        mut variables: Vec<usize>,
        domain_size: usize,
        constraints: Vec<ValuedConstraint>,
    ) -> Result<Self, Error> {
        if domain_size == 0 {
            return Err(Error::EmptyDomain);
        }
        variables.sort_unstable();
        variables.dedup();
        let inst = Instance {
            domain_size,
            variables,
            constraints: Vec::new(),
        };
        let mut inst = inst;
        for c in constraints {
            inst.push(c)?;
        }
        Ok(inst)
    }

    pub fn empty(num_variables: usize, domain_size: usize) -> Self {
        Instance {
            domain_size,
            variables: (0..num_variables).collect(),
            constraints: Vec::new(),
        }
    }

    /// Appends a constraint, returning its index.
    pub fn push(&mut self, constraint: ValuedConstraint) -> Result<usize, Error> {
        if constraint.function.domain_size() != self.domain_size {
            return Err(Error::DomainMismatch {
                expected: self.domain_size,
                found: constraint.function.domain_size(),
            });
        }
        if let Some(&x) = constraint.scope.iter().find(|&&x| !self.has_variable(x)) {
            return Err(Error::UnknownVariable(x));
        }
        self.constraints.push(constraint);
        Ok(self.constraints.len() - 1)
    }

    pub fn add(&mut self, scope: Vec<usize>, function: CostFunction) -> Result<usize, Error> {
        self.push(ValuedConstraint::new(scope, function)?)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Variables in ascending order.
    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn has_variable(&self, x: usize) -> bool {
        self.variables.binary_search(&x).is_ok()
    }

    /// One past the largest variable index.
    pub fn index_bound(&self) -> usize {
        self.variables.last().map_or(0, |x| x + 1)
    }

    pub fn constraints(&self) -> &[ValuedConstraint] {
        &self.constraints
    }

    pub fn constraint(&self, index: usize) -> Result<&ValuedConstraint, Error> {
        self.constraints.get(index).ok_or(Error::UnknownConstraint(index))
    }

    /// Replaces the cost function of one constraint, keeping its scope.
    pub fn replace_function(&self, index: usize, function: CostFunction) -> Result<Instance, Error> {
        let old = self.constraint(index)?;
        if function.arity() != old.arity() {
            return Err(Error::ArityMismatch {
                expected: old.arity(),
                found: function.arity(),
            });
        }
        if function.domain_size() != self.domain_size {
            return Err(Error::DomainMismatch {
                expected: self.domain_size,
                found: function.domain_size(),
            });
        }
        let mut out = self.clone();
        out.constraints[index].function = function;
        Ok(out)
    }

    /// Sum of all constraint costs under a total assignment.
    pub fn evaluate(&self, assignment: &PartialAssignment) -> Result<Cost, Error> {
        let dense = self.check_assignment(assignment)?;
        if let Some(&x) = self.variables.iter().find(|&&x| dense[x].is_none()) {
            return Err(Error::UnboundVariable(x));
        }
        Ok(self.evaluate_with(|x| dense[x].unwrap()))
    }

    /// Cost under a value lookup that must cover every scope variable.
    pub(crate) fn evaluate_with(&self, value: impl Fn(usize) -> usize) -> Cost {
        let mut total = Cost::zero();
        let mut tuple = Vec::new();
        for c in &self.constraints {
            tuple.clear();
            tuple.extend(c.scope.iter().map(|&x| value(x)));
            total += c.function.value(&tuple);
            if total.is_infinite() {
                break;
            }
        }
        total
    }

    fn check_assignment(&self, assignment: &PartialAssignment) -> Result<Vec<Option<usize>>, Error> {
        for (x, v) in assignment.iter() {
            if !self.has_variable(x) {
                return Err(Error::UnknownVariable(x));
            }
            if v >= self.domain_size {
                return Err(Error::ValueOutOfRange {
                    variable: x,
                    value: v,
                    domain_size: self.domain_size,
                });
            }
        }
        Ok(assignment.to_dense(self.index_bound()))
    }

    /// The reduced instance `P|tau`: every constraint is restricted by the
    /// bound variables and the bound variables leave the instance. Fully
    /// assigned constraints stay as nullary constants.
    pub fn apply_assignment(&self, assignment: &PartialAssignment) -> Result<Instance, Error> {
        let dense = self.check_assignment(assignment)?;
        Ok(self.apply_dense(&dense))
    }

    pub(crate) fn apply_dense(&self, values: &[Option<usize>]) -> Instance {
        Instance {
            domain_size: self.domain_size,
            variables: self
                .variables
                .iter()
                .copied()
                .filter(|&x| values.get(x).copied().flatten().is_none())
                .collect(),
            constraints: self.constraints.iter().map(|c| c.restrict_dense(values)).collect(),
        }
    }

    /// Sum of all nullary constraints.
    pub fn constant_cost(&self) -> Cost {
        self.constraints
            .iter()
            .filter(|c| c.arity() == 0)
            .map(|c| c.function.entry(0))
            .sum()
    }

    /// Partition into maximal connected subinstances.
    pub fn connected_components(&self) -> Decomposition {
        components_of(&self.variables, self.constraints.iter().map(|c| c.scope.as_slice()))
    }

    /// The subinstance on a component, keeping the original variable names.
    pub fn subinstance(&self, component: &Component) -> Instance {
        Instance {
            domain_size: self.domain_size,
            variables: component.variables.clone(),
            constraints: component
                .constraints
                .iter()
                .map(|&i| self.constraints[i].clone())
                .collect(),
        }
    }

    /// Total size: number of cost table rows over all constraints.
    pub fn size(&self) -> usize {
        self.constraints.iter().map(|c| c.function.len()).sum()
    }
}

/// Components over `variables` where each scope links its variables. Scope
/// entries outside `variables` are ignored; a scope with no variable left is
/// reported as nullary.
pub(crate) fn components_of<'a>(
    variables: &[usize],
    scopes: impl Iterator<Item = &'a [usize]>,
) -> Decomposition {
    let position = |x: usize| variables.binary_search(&x).ok();
    let mut uf = UnionFind::<usize>::new(variables.len());
    let mut anchors = Vec::new();
    for scope in scopes {
        let mut live = scope.iter().filter_map(|&x| position(x));
        let first = live.next();
        for p in live {
            uf.union(first.unwrap(), p);
        }
        anchors.push(first);
    }
    // component ids in order of smallest variable
    let mut id_of_root = vec![usize::MAX; variables.len()];
    let mut components: Vec<Component> = Vec::new();
    for (p, &x) in variables.iter().enumerate() {
        let root = uf.find(p);
        if id_of_root[root] == usize::MAX {
            id_of_root[root] = components.len();
            components.push(Component {
                variables: Vec::new(),
                constraints: Vec::new(),
            });
        }
        components[id_of_root[root]].variables.push(x);
    }
    let mut nullary = Vec::new();
    for (i, anchor) in anchors.into_iter().enumerate() {
        match anchor {
            Some(p) => components[id_of_root[uf.find(p)]].constraints.push(i),
            None => nullary.push(i),
        }
    }
    Decomposition { components, nullary }
}

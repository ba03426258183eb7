//! Valued constraint languages and their membership recognizers.

use indexmap::IndexSet;

use crate::error::Error;
use crate::function::CostFunction;
use crate::instance::Instance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LanguageKind {
    /// An explicit finite set of cost functions, compared by table equality.
    FiniteExplicit(IndexSet<CostFunction>),
    /// Crisp relations closed under coordinatewise minimum (Horn relations
    /// when the domain is Boolean).
    MinClosedCrisp,
    /// Boolean cost functions with `f(s & t) + f(s | t) <= f(s) + f(t)`.
    SubmodularBoolean,
}

/// A membership recognizer over cost functions of bounded arity.
///
/// Every language accepts all nullary cost functions. The conservativity
/// and closure flags are declarations; only finite languages can have their
/// closure computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    name: String,
    domain_size: usize,
    arity_bound: usize,
    kind: LanguageKind,
    declared_conservative: bool,
    declared_closed: bool,
}

pub const MIN_CLOSED: &str = "min_closed";
pub const SUBMODULAR: &str = "submodular";

impl Language {
    pub fn min_closed_crisp(domain_size: usize, arity_bound: usize) -> Self {
        Language {
            name: MIN_CLOSED.to_string(),
            domain_size,
            arity_bound,
            kind: LanguageKind::MinClosedCrisp,
            declared_conservative: true,
            declared_closed: true,
        }
    }

    pub fn submodular_boolean(arity_bound: usize) -> Self {
        Language {
            name: SUBMODULAR.to_string(),
            domain_size: 2,
            arity_bound,
            kind: LanguageKind::SubmodularBoolean,
            declared_conservative: true,
            declared_closed: true,
        }
    }

    /// A finite language. The arity bound is the largest member arity.
    pub fn finite(
        name: impl Into<String>,
        domain_size: usize,
        functions: impl IntoIterator<Item = CostFunction>,
    ) -> Result<Self, Error> {
        let set: IndexSet<CostFunction> = functions.into_iter().collect();
        if let Some(f) = set.iter().find(|f| f.domain_size() != domain_size) {
            return Err(Error::DomainMismatch {
                expected: domain_size,
                found: f.domain_size(),
            });
        }
        let arity_bound = set.iter().map(CostFunction::arity).max().unwrap_or(0);
        Ok(Language {
            name: name.into(),
            domain_size,
            arity_bound,
            kind: LanguageKind::FiniteExplicit(set),
            declared_conservative: false,
            declared_closed: false,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_arity_bound(mut self, arity_bound: usize) -> Self {
        self.arity_bound = arity_bound;
        self
    }

    pub fn declare_conservative(mut self, flag: bool) -> Self {
        self.declared_conservative = flag;
        self
    }

    pub fn declare_closed(mut self, flag: bool) -> Self {
        self.declared_closed = flag;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn kind(&self) -> &LanguageKind {
        &self.kind
    }

    pub fn is_conservative(&self) -> bool {
        self.declared_conservative
    }

    pub fn is_closed_under_partial_assignments(&self) -> bool {
        self.declared_closed
    }

    /// Members of a finite language, `None` for the built-in families.
    pub fn functions(&self) -> Option<&IndexSet<CostFunction>> {
        match &self.kind {
            LanguageKind::FiniteExplicit(set) => Some(set),
            _ => None,
        }
    }

    pub fn contains(&self, f: &CostFunction) -> Result<bool, Error> {
        if f.domain_size() != self.domain_size {
            return Err(Error::DomainMismatch {
                expected: self.domain_size,
                found: f.domain_size(),
            });
        }
        Ok(self.accepts(f))
    }

    /// Membership without the domain check.
    pub(crate) fn accepts(&self, f: &CostFunction) -> bool {
        if f.arity() == 0 {
            return true;
        }
        if f.arity() > self.arity_bound || f.domain_size() != self.domain_size {
            return false;
        }
        match &self.kind {
            LanguageKind::FiniteExplicit(set) => set.contains(f),
            LanguageKind::MinClosedCrisp => is_min_closed_crisp(f),
            LanguageKind::SubmodularBoolean => is_submodular_boolean(f),
        }
    }

    /// Least superset closed under fixing any subset of argument positions.
    pub fn closure_under_partial_assignments(&self) -> Result<Language, Error> {
        let set = self.functions().ok_or_else(|| Error::NotFinite(self.name.clone()))?;
        let mut closed: IndexSet<CostFunction> = set.clone();
        for f in set {
            // restrictions of restrictions are restrictions, so one pass suffices
            for (_, _, g) in f.restrictions() {
                closed.insert(g);
            }
        }
        Ok(Language {
            name: self.name.clone(),
            domain_size: self.domain_size,
            arity_bound: self.arity_bound,
            kind: LanguageKind::FiniteExplicit(closed),
            declared_conservative: self.declared_conservative,
            declared_closed: true,
        })
    }
}

/// Crisp, and the coordinatewise minimum of two allowed tuples is allowed.
pub fn is_min_closed_crisp(f: &CostFunction) -> bool {
    if !f.is_crisp() {
        return false;
    }
    let allowed: Vec<Vec<usize>> = (0..f.len())
        .filter(|&r| f.entry(r).is_finite())
        .map(|r| f.tuple_of(r))
        .collect();
    let mut meet = vec![0; f.arity()];
    for (i, s) in allowed.iter().enumerate() {
        for t in &allowed[i + 1..] {
            for (m, (a, b)) in meet.iter_mut().zip(s.iter().zip(t)) {
                *m = *a.min(b);
            }
            if f.value(&meet).is_infinite() {
                return false;
            }
        }
    }
    true
}

/// Boolean submodularity over all pairs of rows. With `d = 2` the row index
/// is the tuple read as a bit string, so meet and join are bitwise.
pub fn is_submodular_boolean(f: &CostFunction) -> bool {
    if f.domain_size() != 2 {
        return f.arity() == 0;
    }
    let n = f.len();
    for s in 0..n {
        for t in (s + 1)..n {
            let (meet, join) = (s & t, s | t);
            if meet == s || meet == t {
                continue;
            }
            if f.entry(meet) + f.entry(join) > f.entry(s) + f.entry(t) {
                return false;
            }
        }
    }
    true
}

/// `P` is in `VCSP[Gamma]`: every constraint's function is a member.
pub fn instance_in_language(instance: &Instance, language: &Language) -> Result<bool, Error> {
    if instance.domain_size() != language.domain_size() {
        return Err(Error::DomainMismatch {
            expected: language.domain_size(),
            found: instance.domain_size(),
        });
    }
    Ok(instance.constraints().iter().all(|c| language.accepts(c.function())))
}

/// An ordered list of languages over a shared domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageFamily {
    languages: Vec<Language>,
    domain_size: usize,
}

/// Set of language indices, bit `i` for language `i`.
pub type LanguageMask = u64;

impl LanguageFamily {
    pub fn new(languages: Vec<Language>) -> Result<Self, Error> {
        if languages.is_empty() || languages.len() > 64 {
            return Err(Error::FamilySize(languages.len()));
        }
        let domain_size = languages[0].domain_size();
        if let Some(l) = languages.iter().find(|l| l.domain_size() != domain_size) {
            return Err(Error::DomainMismatch {
                expected: domain_size,
                found: l.domain_size(),
            });
        }
        Ok(LanguageFamily {
            languages,
            domain_size,
        })
    }

    /// `{min_closed, submodular}` over the Boolean domain with arity bound `q`.
    pub fn horn_and_submodular(q: usize) -> Self {
        LanguageFamily::new(vec![
            Language::min_closed_crisp(2, q),
            Language::submodular_boolean(q),
        ])
        .expect("two boolean languages")
    }

    pub fn languages(&self) -> &[Language] {
        &self.languages
    }

    pub fn len(&self) -> usize {
        self.languages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty()
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Largest arity bound over the family.
    pub fn max_arity(&self) -> usize {
        self.languages.iter().map(Language::arity_bound).max().unwrap_or(0)
    }

    pub fn full_mask(&self) -> LanguageMask {
        if self.languages.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.languages.len()) - 1
        }
    }

    /// Indices of the languages that accept `f`.
    pub fn membership_mask(&self, f: &CostFunction) -> LanguageMask {
        if f.arity() == 0 {
            return self.full_mask();
        }
        self.languages
            .iter()
            .enumerate()
            .filter(|(_, l)| l.accepts(f))
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.languages.iter().position(|l| l.name() == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::function::increment;

    fn c(v: u64) -> Cost {
        Cost::integer(v)
    }

    fn horn() -> Language {
        Language::min_closed_crisp(2, 2)
    }

    fn submod() -> Language {
        Language::submodular_boolean(2)
    }

    #[test]
    fn nullary_always_member() {
        let k = CostFunction::constant(2, c(7));
        let empty = Language::finite("empty", 2, []).unwrap();
        assert!(horn().contains(&k).unwrap());
        assert!(submod().contains(&k).unwrap());
        assert!(empty.contains(&k).unwrap());
        assert!(empty.contains(&CostFunction::constant(2, Cost::Infinite)).unwrap());
    }

    #[test]
    fn xor_is_not_min_closed() {
        let xor = CostFunction::relation(2, 2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!horn().contains(&xor).unwrap());
        // the lattice {00, 11} is min-closed
        let eq = CostFunction::relation(2, 2, &[vec![0, 0], vec![1, 1]]).unwrap();
        assert!(horn().contains(&eq).unwrap());
    }

    /// Exhaustive pair check written independently of the recognizer.
    fn submodular_oracle(table: [Cost; 4]) -> bool {
        let tuples = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let at = |(a, b): (usize, usize)| table[a * 2 + b].clone();
        tuples.iter().all(|&s| {
            tuples.iter().all(|&t| {
                let meet = (s.0.min(t.0), s.1.min(t.1));
                let join = (s.0.max(t.0), s.1.max(t.1));
                at(meet) + at(join) <= at(s) + at(t)
            })
        })
    }

    #[test]
    fn equality_cost_is_submodular() {
        // (0,0)->0, (0,1)->1, (1,0)->1, (1,1)->0: the only incomparable
        // pair gives 0 + 0 <= 1 + 1, so the exhaustive verdict is "member".
        let table = [c(0), c(1), c(1), c(0)];
        assert!(submodular_oracle(table.clone()));
        let f = CostFunction::new(2, 2, table.to_vec()).unwrap();
        assert!(submod().contains(&f).unwrap());
        // and its negation is not
        let g = CostFunction::new(2, 2, vec![c(1), c(0), c(0), c(1)]).unwrap();
        assert!(!submod().contains(&g).unwrap());
    }

    #[test]
    fn submodular_recognizer_matches_oracle_on_all_small_tables() {
        let values = [c(0), c(1), c(2), Cost::Infinite];
        let mut code = [0usize; 4];
        loop {
            let table = [
                values[code[0]].clone(),
                values[code[1]].clone(),
                values[code[2]].clone(),
                values[code[3]].clone(),
            ];
            let f = CostFunction::new(2, 2, table.to_vec()).unwrap();
            assert_eq!(submod().contains(&f).unwrap(), submodular_oracle(table), "{f:?}");
            if !increment(&mut code, 4) {
                break;
            }
        }
    }

    #[test]
    fn arity_bound_enforced() {
        let f = CostFunction::crisp(3, 2, |_| true).unwrap();
        assert!(!horn().contains(&f).unwrap());
        assert!(Language::min_closed_crisp(2, 3).contains(&f).unwrap());
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let f = CostFunction::constant(3, c(0));
        assert!(horn().contains(&f).is_err());
    }

    #[test]
    fn unary_functions_belong_to_builtins() {
        // every unary Boolean table is submodular
        for a in [c(0), c(3), Cost::Infinite] {
            for b in [c(0), c(1), Cost::Infinite] {
                let f = CostFunction::new(1, 2, vec![a.clone(), b]).unwrap();
                assert!(submod().contains(&f).unwrap());
            }
        }
        // every unary crisp relation is min-closed, d <= 3
        for d in 1..=3usize {
            for mask in 0..(1u32 << d) {
                let f = CostFunction::crisp(1, d, |t| mask >> t[0] & 1 == 1).unwrap();
                assert!(Language::min_closed_crisp(d, 2).contains(&f).unwrap());
            }
        }
    }

    #[test]
    fn closure_of_empty_language() {
        let l = Language::finite("e", 2, []).unwrap();
        let cl = l.closure_under_partial_assignments().unwrap();
        assert!(cl.functions().unwrap().is_empty());
        assert!(cl.is_closed_under_partial_assignments());
    }

    #[test]
    fn closure_of_unary() {
        let f = CostFunction::new(1, 2, vec![c(1), c(4)]).unwrap();
        let cl = Language::finite("u", 2, [f.clone()]).unwrap().closure_under_partial_assignments().unwrap();
        let expected: IndexSet<_> =
            [f, CostFunction::constant(2, c(1)), CostFunction::constant(2, c(4))].into_iter().collect();
        assert_eq!(cl.functions().unwrap(), &expected);
    }

    #[test]
    fn closure_of_binary_enumerates_all_restrictions() {
        let f = CostFunction::new(2, 2, vec![c(0), c(1), c(1), c(2)]).unwrap();
        let cl = Language::finite("b", 2, [f.clone()]).unwrap().closure_under_partial_assignments().unwrap();
        // direct enumeration of (Q, gamma): fix x, fix y, fix both
        let mut expected = IndexSet::new();
        expected.insert(f.clone());
        for v in 0..2 {
            expected.insert(CostFunction::from_fn(1, 2, |t| f.value(&[v, t[0]]).clone()).unwrap());
            expected.insert(CostFunction::from_fn(1, 2, |t| f.value(&[t[0], v]).clone()).unwrap());
        }
        for a in 0..2 {
            for b in 0..2 {
                expected.insert(CostFunction::constant(2, f.value(&[a, b]).clone()));
            }
        }
        // (0,1,1,2) has restrictions [0,1],[1,2] (twice each) and constants 0,1,2
        assert_eq!(expected.len(), 6);
        assert_eq!(cl.functions().unwrap().len(), expected.len());
        assert!(expected.iter().all(|g| cl.functions().unwrap().contains(g)));
    }

    #[test]
    fn closure_is_idempotent() {
        let f = CostFunction::new(2, 3, (0..9).map(|i| c(i % 4)).collect()).unwrap();
        let g = CostFunction::new(1, 3, vec![c(0), Cost::Infinite, c(2)]).unwrap();
        let once = Language::finite("x", 3, [f, g]).unwrap().closure_under_partial_assignments().unwrap();
        let twice = once.closure_under_partial_assignments().unwrap();
        assert_eq!(once.functions(), twice.functions());
    }

    #[test]
    fn closure_requires_finite_language() {
        assert!(matches!(horn().closure_under_partial_assignments(), Err(Error::NotFinite(_))));
    }

    #[test]
    fn instance_membership() {
        let nand = CostFunction::relation(2, 2, &[vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap();
        let imp = CostFunction::relation(2, 2, &[vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let xor = CostFunction::relation(2, 2, &[vec![0, 1], vec![1, 0]]).unwrap();
        let mut p = Instance::empty(3, 2);
        assert!(instance_in_language(&p, &horn()).unwrap());
        assert!(instance_in_language(&p, &submod()).unwrap());
        p.add(vec![0, 1], nand).unwrap();
        p.add(vec![1, 2], imp).unwrap();
        assert!(instance_in_language(&p, &horn()).unwrap());
        assert!(!instance_in_language(&p, &submod()).unwrap());
        p.add(vec![0, 2], xor).unwrap();
        assert!(!instance_in_language(&p, &horn()).unwrap());
        assert!(!instance_in_language(&p, &submod()).unwrap());
    }

    #[test]
    fn family_masks() {
        let fam = LanguageFamily::horn_and_submodular(2);
        let imp = CostFunction::relation(2, 2, &[vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let nand = CostFunction::relation(2, 2, &[vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(fam.membership_mask(&imp), 0b11);
        assert_eq!(fam.membership_mask(&nand), 0b01);
        assert_eq!(fam.membership_mask(&CostFunction::constant(2, c(1))), 0b11);
        assert!(LanguageFamily::new(vec![]).is_err());
        assert!(LanguageFamily::new(vec![horn(), Language::min_closed_crisp(3, 2)]).is_err());
    }
}

use crate::error::Error;
use crate::function::CostFunction;
use crate::instance::{Instance, ValuedConstraint};
use crate::language::{LanguageFamily, LanguageMask};

/// Fingerprint of a constraint: for every subset `Q` of its scope positions
/// and every assignment `gamma` to `Q`, the set of languages accepting the
/// restricted function.
///
/// Entries follow the canonical restriction order (`Q` by bitmask
/// ascending, `gamma` lexicographic), so equal keys have equal arity and
/// agree entry by entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeKey {
    arity: usize,
    masks: Vec<LanguageMask>,
}

impl TypeKey {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Language masks in canonical restriction order.
    pub fn masks(&self) -> &[LanguageMask] {
        &self.masks
    }

    /// The mask stored for positions `q_mask` fixed to `gamma`.
    pub fn entry(&self, q_mask: u64, gamma: &[usize], domain_size: usize) -> Option<LanguageMask> {
        if self.arity >= 64 || q_mask >> self.arity != 0 || gamma.len() != q_mask.count_ones() as usize {
            return None;
        }
        // entries before this Q: sum of d^|Q'| over smaller bitmasks
        let offset: usize = (0..q_mask).map(|m| domain_size.pow(m.count_ones())).sum();
        let code = gamma.iter().try_fold(0usize, |acc, &v| (v < domain_size).then_some(acc * domain_size + v))?;
        self.masks.get(offset + code).copied()
    }
}

/// Type of a constraint under `family`, for backdoors of size at most `k`.
pub fn compute_type(c: &ValuedConstraint, family: &LanguageFamily, k: usize) -> Result<TypeKey, Error> {
    let limit = family.max_arity() + k;
    if c.arity() > limit {
        return Err(Error::Precondition(format!(
            "constraint arity {} exceeds q + k = {limit}",
            c.arity()
        )));
    }
    Ok(function_type(c.function(), family))
}

pub(crate) fn function_type(f: &CostFunction, family: &LanguageFamily) -> TypeKey {
    TypeKey {
        arity: f.arity(),
        masks: f.restrictions().map(|(_, _, g)| family.membership_mask(&g)).collect(),
    }
}

/// The instance with the function of constraint `index` replaced by `f`.
pub fn replace_cost_function(instance: &Instance, index: usize, f: CostFunction) -> Result<Instance, Error> {
    instance.replace_function(index, f)
}

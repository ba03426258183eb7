use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid cost `{0}`")]
    InvalidCost(String),

    #[error("cost table has {actual} entries, expected {expected}")]
    TableLength { expected: usize, actual: usize },

    #[error("domain size must be at least 1")]
    EmptyDomain,

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("domain size mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: usize, found: usize },

    #[error("value {value} for variable {variable} is outside the domain 0..{domain_size}")]
    ValueOutOfRange {
        variable: usize,
        value: usize,
        domain_size: usize,
    },

    #[error("variable {0} is not a variable of the instance")]
    UnknownVariable(usize),

    #[error("assignment is not total: variable {0} is unbound")]
    UnboundVariable(usize),

    #[error("constraint {0} does not exist")]
    UnknownConstraint(usize),

    #[error("enumeration of {required} candidates exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("{solver} solver cannot handle constraint {constraint}: {reason}")]
    NotInClass {
        solver: &'static str,
        constraint: usize,
        reason: String,
    },

    #[error("component with variables {variables:?} belongs to no language of the family")]
    ComponentOutsideFamily { variables: Vec<usize> },

    #[error("reduced instance under {assignment:?} is outside the target class")]
    NotABackdoor { assignment: Vec<(usize, usize)> },

    #[error("language family must contain between 1 and 64 languages, got {0}")]
    FamilySize(usize),

    #[error("language `{0}` is not a finite explicit language")]
    NotFinite(String),

    #[error("unknown language `{0}`")]
    UnknownLanguage(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid generator parameters: {0}")]
    Generator(String),
}

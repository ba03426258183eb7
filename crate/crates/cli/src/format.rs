//! JSON instance files.
//!
//! ```json
//! {
//!   "domain_size": 2,
//!   "num_variables": 2,
//!   "constraints": [{ "scope": [0, 1], "table": ["0", "1/2", "inf", "3"] }],
//!   "languages": [{ "name": "l", "functions": [{ "arity": 1, "table": ["0", "inf"] }] }],
//!   "metadata": {}
//! }
//! ```
//!
//! Costs are strings: reduced `p/q`, integers as `p`, infinity as `inf`.
//! Tables list rows in mixed-radix order with the first scope position most
//! significant. Variables are `0..num_variables` unless an explicit
//! `variables` list is given.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use vcsp_backdoor::{Cost, CostFunction, Instance, Language, ValuedConstraint};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}, row {row}: malformed cost {text:?}")]
    Cost { context: String, row: usize, text: String },
    #[error("{context}: table has {actual} rows, expected {expected}")]
    TableLength {
        context: String,
        expected: usize,
        actual: usize,
    },
    #[error("constraint {constraint}: variable {variable} is not declared")]
    Scope { constraint: usize, variable: usize },
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub scope: Vec<usize>,
    pub table: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    pub arity: usize,
    pub table: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageDoc {
    pub name: String,
    /// Defaults to the largest member arity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_bound: Option<usize>,
    #[serde(default)]
    pub conservative: bool,
    #[serde(default)]
    pub closed: bool,
    pub functions: Vec<FunctionDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub domain_size: usize,
    pub num_variables: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<usize>>,
    #[serde(default)]
    pub constraints: Vec<ConstraintDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub languages: Vec<LanguageDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

fn parse_table(context: &str, arity: usize, d: usize, table: &[String]) -> Result<CostFunction, FormatError> {
    let costs = table
        .iter()
        .enumerate()
        .map(|(row, text)| {
            text.parse::<Cost>().map_err(|_| FormatError::Cost {
                context: context.to_string(),
                row,
                text: text.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let expected = vcsp_backdoor::function::table_len(d, arity).ok_or_else(|| FormatError::Invalid {
        context: context.to_string(),
        message: format!("table of arity {arity} over domain {d} is too large"),
    })?;
    if costs.len() != expected {
        return Err(FormatError::TableLength {
            context: context.to_string(),
            expected,
            actual: costs.len(),
        });
    }
    CostFunction::new(arity, d, costs).map_err(|e| FormatError::Invalid {
        context: context.to_string(),
        message: e.to_string(),
    })
}

fn emit_table(f: &CostFunction) -> Vec<String> {
    f.entries().map(ToString::to_string).collect()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn instance(&self) -> Result<Instance, FormatError> {
        let d = self.domain_size;
        if d == 0 {
            return Err(FormatError::Invalid {
                context: "domain_size".into(),
                message: "domain must be nonempty".into(),
            });
        }
        let variables = match &self.variables {
            Some(vs) => {
                if vs.len() != self.num_variables {
                    return Err(FormatError::Invalid {
                        context: "variables".into(),
                        message: format!("{} listed, num_variables is {}", vs.len(), self.num_variables),
                    });
                }
                vs.clone()
            }
            None => (0..self.num_variables).collect(),
        };
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(&variable) = c.scope.iter().find(|x| !variables.contains(x)) {
                return Err(FormatError::Scope { constraint: i, variable });
            }
            let f = parse_table(&format!("constraint {i}"), c.scope.len(), d, &c.table)?;
            constraints.push(ValuedConstraint::new(c.scope.clone(), f).expect("arity matches scope"));
        }
        Instance::with_variables(variables, d, constraints).map_err(|e| FormatError::Invalid {
            context: "instance".into(),
            message: e.to_string(),
        })
    }

    /// Finite languages declared in the file.
    pub fn finite_languages(&self) -> Result<Vec<Language>, FormatError> {
        self.languages
            .iter()
            .map(|l| {
                let mut fs = Vec::with_capacity(l.functions.len());
                for (j, f) in l.functions.iter().enumerate() {
                    let context = format!("language {}, function {j}", l.name);
                    fs.push(parse_table(&context, f.arity, self.domain_size, &f.table)?);
                }
                let mut lang = Language::finite(l.name.clone(), self.domain_size, fs).map_err(|e| FormatError::Invalid {
                    context: format!("language {}", l.name),
                    message: e.to_string(),
                })?;
                if let Some(q) = l.arity_bound {
                    lang = lang.with_arity_bound(q);
                }
                Ok(lang.declare_conservative(l.conservative).declare_closed(l.closed))
            })
            .collect()
    }

    /// Canonical document for an instance.
    pub fn from_instance(instance: &Instance) -> Self {
        let vars = instance.variables();
        let contiguous = vars.iter().enumerate().all(|(i, &x)| i == x);
        InstanceFile {
            domain_size: instance.domain_size(),
            num_variables: vars.len(),
            variables: (!contiguous).then(|| vars.to_vec()),
            constraints: instance
                .constraints()
                .iter()
                .map(|c| ConstraintDoc {
                    scope: c.scope().to_vec(),
                    table: emit_table(c.function()),
                })
                .collect(),
            languages: Vec::new(),
            metadata: None,
        }
    }

    /// Adds finite languages; built-in languages are skipped.
    pub fn with_languages<'a>(mut self, languages: impl IntoIterator<Item = &'a Language>) -> Self {
        for l in languages {
            if let Some(set) = l.functions() {
                self.languages.push(LanguageDoc {
                    name: l.name().to_string(),
                    arity_bound: Some(l.arity_bound()),
                    conservative: l.is_conservative(),
                    closed: l.is_closed_under_partial_assignments(),
                    functions: set
                        .iter()
                        .map(|f| FunctionDoc {
                            arity: f.arity(),
                            table: emit_table(f),
                        })
                        .collect(),
                });
            }
        }
        self
    }

    pub fn with_metadata(mut self, metadata: Value) -> Self {
        self.metadata = Some(metadata);
        self
    }
}

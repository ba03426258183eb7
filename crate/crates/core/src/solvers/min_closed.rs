use crate::cost::Cost;
use crate::error::Error;
use crate::function::increment;
use crate::instance::{Instance, PartialAssignment};
use crate::language::is_min_closed_crisp;

use super::{zero_assignment, Solution};

/// Feasibility for crisp min-closed instances.
///
/// Generalized arc consistency prunes the variable domains; if none is
/// wiped out, giving every variable its smallest surviving value satisfies
/// all constraints. That assignment is the coordinatewise minimum of all
/// solutions, hence also the lexicographically smallest one. Nullary
/// constants are added to the result.
pub fn solve_min_closed(instance: &Instance) -> Result<Solution, Error> {
    for (i, c) in instance.constraints().iter().enumerate() {
        if c.arity() > 0 && !is_min_closed_crisp(c.function()) {
            return Err(Error::NotInClass {
                solver: "min_closed",
                constraint: i,
                reason: "cost function is not a min-closed crisp relation".into(),
            });
        }
    }
    let constant = instance.constant_cost();
    let infeasible = || {
        let assignment = zero_assignment(instance);
        Solution {
            assignment,
            cost: Cost::Infinite,
        }
    };
    if constant.is_infinite() {
        return Ok(infeasible());
    }

    let d = instance.domain_size();
    let vars = instance.variables();
    let pos = |x: usize| vars.binary_search(&x).expect("scope variable");
    let mut domains = vec![vec![true; d]; vars.len()];

    let mut changed = true;
    while changed {
        changed = false;
        for c in instance.constraints().iter().filter(|c| c.arity() > 0) {
            let scope: Vec<usize> = c.scope().iter().map(|&x| pos(x)).collect();
            let mut supported = vec![vec![false; d]; scope.len()];
            let mut tuple = vec![0; scope.len()];
            loop {
                let ok = c.function().value(&tuple).is_finite()
                    && scope.iter().zip(&tuple).all(|(&p, &v)| domains[p][v])
                    && scope.iter().enumerate().all(|(i, &p)| {
                        scope[..i].iter().zip(&tuple).all(|(&q, &w)| q != p || w == tuple[i])
                    });
                if ok {
                    for (i, &v) in tuple.iter().enumerate() {
                        supported[i][v] = true;
                    }
                }
                if !increment(&mut tuple, d) {
                    break;
                }
            }
            for (i, &p) in scope.iter().enumerate() {
                for v in 0..d {
                    if domains[p][v] && !supported[i][v] {
                        domains[p][v] = false;
                        changed = true;
                    }
                }
            }
            if scope.iter().any(|&p| domains[p].iter().all(|&b| !b)) {
                return Ok(infeasible());
            }
        }
    }

    let assignment: PartialAssignment = vars
        .iter()
        .zip(&domains)
        .map(|(&x, dom)| (x, dom.iter().position(|&b| b).expect("nonempty domain")))
        .collect();
    let cost = instance.evaluate(&assignment)?;
    debug_assert_eq!(cost, constant);
    Ok(Solution { assignment, cost })
}

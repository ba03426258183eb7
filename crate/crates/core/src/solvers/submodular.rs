//! Pairwise submodular pseudo-Boolean minimization by minimum s-t cut.
//!
//! Convention: a variable on the source side takes value 0, on the sink
//! side value 1. An edge `u -> v` is cut when `u = 0` and `v = 1`, so
//!
//! * `w * x`           is the edge `s -> x`,
//! * `w * (1 - x)`     is the edge `x -> t`,
//! * `w * (1 - a) * b` is the edge `a -> b`.
//!
//! Infinite table entries become infinite edges encoding the feasible set
//! of each term (a sublattice of `{0,1}^2`); the finite part is extended to
//! a finite submodular table before decomposition.

use num::rational::BigRational;
use num::{Signed, Zero};

use crate::cost::Cost;
use crate::error::Error;
use crate::instance::{Instance, PartialAssignment};
use crate::language::is_submodular_boolean;

use super::maxflow::FlowNetwork;
use super::{zero_assignment, Solution};

const SOURCE: usize = 0;
const SINK: usize = 1;

struct Builder {
    network: FlowNetwork,
    linear: Vec<BigRational>,
    constant: BigRational,
    infeasible: bool,
}

impl Builder {
    fn node(p: usize) -> usize {
        p + 2
    }

    fn forbid(&mut self, p: usize, value: usize) {
        if value == 0 {
            self.network.add_edge(Self::node(p), SINK, Cost::Infinite);
        } else {
            self.network.add_edge(SOURCE, Self::node(p), Cost::Infinite);
        }
    }

    /// `u0 * (1 - x) + u1 * x`
    fn unary(&mut self, p: usize, u0: &Cost, u1: &Cost) {
        match (u0, u1) {
            (Cost::Infinite, Cost::Infinite) => self.infeasible = true,
            (Cost::Infinite, Cost::Finite(b)) => {
                self.forbid(p, 0);
                self.linear[p] += b;
            }
            (Cost::Finite(a), Cost::Infinite) => {
                self.forbid(p, 1);
                self.constant += a;
            }
            (Cost::Finite(a), Cost::Finite(b)) => {
                self.constant += a;
                self.linear[p] += b - a;
            }
        }
    }

    /// Table `[f00, f01, f10, f11]` on distinct positions `a`, `b`.
    fn pairwise(&mut self, a: usize, b: usize, table: [&Cost; 4]) {
        let feasible: Vec<bool> = table.iter().map(|c| c.is_finite()).collect();
        if !feasible.iter().any(|&f| f) {
            self.infeasible = true;
            return;
        }
        // projections of the feasible set
        let a_can = [feasible[0] || feasible[1], feasible[2] || feasible[3]];
        let b_can = [feasible[0] || feasible[2], feasible[1] || feasible[3]];
        for v in 0..2 {
            if !a_can[v] {
                self.forbid(a, v);
            }
            if !b_can[v] {
                self.forbid(b, v);
            }
        }
        // forbidden pairs inside the product of the projections
        if a_can[1] && b_can[0] && !feasible[2] {
            // forbid a = 1, b = 0
            self.network.add_edge(Self::node(b), Self::node(a), Cost::Infinite);
        }
        if a_can[0] && b_can[1] && !feasible[1] {
            // forbid a = 0, b = 1
            self.network.add_edge(Self::node(a), Self::node(b), Cost::Infinite);
        }

        let finite = |c: &Cost| c.as_rational().cloned();
        let zero = BigRational::zero();
        let f00 = finite(table[0]).unwrap_or_else(|| zero.clone());
        let f11 = finite(table[3]).unwrap_or_else(|| zero.clone());
        let diag = &f00 + &f11;
        let (f01, f10) = match (finite(table[1]), finite(table[2])) {
            (Some(x), Some(y)) => (x, y),
            (None, Some(y)) => ((&diag - &y).max(zero.clone()), y),
            (Some(x), None) => {
                let y = (&diag - &x).max(zero.clone());
                (x, y)
            }
            (None, None) => (diag.clone(), zero.clone()),
        };
        let pair = &f01 + &f10 - &diag;
        debug_assert!(!pair.is_negative());
        // f = f00 + (f10 - f00) a + (f11 - f10) b + pair (1 - a) b
        self.constant += &f00;
        self.linear[a] += &f10 - &f00;
        self.linear[b] += &f11 - &f10;
        self.network.add_edge(Self::node(a), Self::node(b), Cost::Finite(pair));
    }
}

/// Exact minimization of Boolean instances whose constraints are
/// submodular and of arity at most 2. Returns the lexicographically
/// smallest optimal assignment.
pub fn solve_submodular_boolean(instance: &Instance) -> Result<Solution, Error> {
    if instance.domain_size() != 2 {
        return Err(Error::NotInClass {
            solver: "submodular",
            constraint: 0,
            reason: format!("domain size {} is not Boolean", instance.domain_size()),
        });
    }
    for (i, c) in instance.constraints().iter().enumerate() {
        let reason = if c.arity() > 2 {
            Some(format!("arity {} exceeds 2", c.arity()))
        } else if !is_submodular_boolean(c.function()) {
            Some("cost function is not submodular".to_string())
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(Error::NotInClass {
                solver: "submodular",
                constraint: i,
                reason,
            });
        }
    }

    let vars = instance.variables();
    let pos = |x: usize| vars.binary_search(&x).expect("scope variable");
    let mut b = Builder {
        network: FlowNetwork::new(vars.len() + 2),
        linear: vec![BigRational::zero(); vars.len()],
        constant: BigRational::zero(),
        infeasible: false,
    };
    for c in instance.constraints() {
        let f = c.function();
        match *c.scope() {
            [] => match f.entry(0) {
                Cost::Infinite => b.infeasible = true,
                Cost::Finite(v) => b.constant += v,
            },
            [x] => b.unary(pos(x), f.entry(0), f.entry(1)),
            [x, y] if x == y => b.unary(pos(x), f.entry(0), f.entry(3)),
            [x, y] => b.pairwise(pos(x), pos(y), [f.entry(0), f.entry(1), f.entry(2), f.entry(3)]),
            _ => unreachable!("arity checked above"),
        }
    }
    if b.infeasible {
        return Ok(Solution {
            assignment: zero_assignment(instance),
            cost: Cost::Infinite,
        });
    }
    for (p, w) in std::mem::take(&mut b.linear).into_iter().enumerate() {
        if w.is_positive() {
            b.network.add_edge(SOURCE, Builder::node(p), Cost::Finite(w));
        } else if w.is_negative() {
            b.constant += &w;
            b.network.add_edge(Builder::node(p), SINK, Cost::Finite(-w));
        }
    }
    let flow = b.network.max_flow(SOURCE, SINK);
    if flow.is_infinite() {
        return Ok(Solution {
            assignment: zero_assignment(instance),
            cost: Cost::Infinite,
        });
    }
    let sink_side = b.network.reaches_sink(SINK);
    let assignment: PartialAssignment = vars
        .iter()
        .enumerate()
        .map(|(p, &x)| (x, usize::from(sink_side[Builder::node(p)])))
        .collect();
    let cost = instance.evaluate(&assignment)?;
    debug_assert_eq!(
        Some(&(flow.as_rational().unwrap() + &b.constant)),
        cost.as_rational(),
        "cut value disagrees with evaluation"
    );
    Ok(Solution { assignment, cost })
}

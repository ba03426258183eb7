//! Edmonds-Karp maximum flow over exact capacities with a symbolic infinity.

use std::collections::VecDeque;

use num::rational::BigRational;

use crate::cost::Cost;

struct Edge {
    to: usize,
    residual: Cost,
}

pub(crate) struct FlowNetwork {
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

/// Residual after pushing `flow` through `cap`; infinite capacity stays infinite.
fn sub(cap: &Cost, flow: &BigRational) -> Cost {
    match cap {
        Cost::Infinite => Cost::Infinite,
        Cost::Finite(c) => Cost::Finite(c - flow),
    }
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adjacency: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, capacity: Cost) {
        if capacity.is_zero() {
            return;
        }
        self.adjacency[from].push(self.edges.len());
        self.edges.push(Edge { to, residual: capacity });
        self.adjacency[to].push(self.edges.len());
        self.edges.push(Edge {
            to: from,
            residual: Cost::zero(),
        });
    }

    /// Maximum flow value. `Cost::Infinite` when an augmenting path of
    /// infinite capacity exists, in which case the residual graph is left
    /// as it was before that path.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> Cost {
        let mut total = Cost::zero();
        loop {
            let mut parent_edge = vec![usize::MAX; self.adjacency.len()];
            let mut seen = vec![false; self.adjacency.len()];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.adjacency[u] {
                    let edge = &self.edges[e];
                    if !seen[edge.to] && !edge.residual.is_zero() {
                        seen[edge.to] = true;
                        parent_edge[edge.to] = e;
                        queue.push_back(edge.to);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut path = Vec::new();
            let mut v = sink;
            while v != source {
                let e = parent_edge[v];
                path.push(e);
                v = self.edges[e ^ 1].to;
            }
            let bottleneck = path
                .iter()
                .map(|&e| &self.edges[e].residual)
                .min()
                .cloned()
                .expect("nonempty path");
            let Cost::Finite(amount) = bottleneck else {
                return Cost::Infinite;
            };
            for &e in &path {
                self.edges[e].residual = sub(&self.edges[e].residual, &amount);
                let back = &mut self.edges[e ^ 1].residual;
                *back = std::mem::take(back) + Cost::Finite(amount.clone());
            }
            total += &Cost::Finite(amount);
        }
    }

    /// Nodes from which `sink` is reachable in the residual graph. After a
    /// finite maximum flow these form the smallest sink side of a minimum cut.
    pub fn reaches_sink(&self, sink: usize) -> Vec<bool> {
        let mut reach = vec![false; self.adjacency.len()];
        reach[sink] = true;
        let mut queue = VecDeque::from([sink]);
        while let Some(v) = queue.pop_front() {
            // u -> v has residual capacity iff the paired edge stored at v points to u
            for &e in &self.adjacency[v] {
                let u = self.edges[e].to;
                if !reach[u] && !self.edges[e ^ 1].residual.is_zero() {
                    reach[u] = true;
                    queue.push_back(u);
                }
            }
        }
        reach
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS-style example with max flow 23
        let caps = [(0, 1, 16), (0, 2, 13), (1, 2, 10), (2, 1, 4), (1, 3, 12), (3, 2, 9), (2, 4, 14), (4, 3, 7), (3, 5, 20), (4, 5, 4)];
        let mut g = FlowNetwork::new(6);
        for (u, v, c) in caps {
            g.add_edge(u, v, Cost::integer(c));
        }
        assert_eq!(g.max_flow(0, 5), Cost::integer(23));
        let reach = g.reaches_sink(5);
        assert!(!reach[0]);
        assert!(reach[5]);
    }

    #[test]
    fn rational_and_infinite_capacities() {
        let mut g = FlowNetwork::new(3);
        g.add_edge(0, 1, Cost::Infinite);
        g.add_edge(1, 2, Cost::ratio(1, 3).unwrap());
        g.add_edge(0, 2, Cost::ratio(1, 6).unwrap());
        assert_eq!(g.max_flow(0, 2), Cost::ratio(1, 2).unwrap());

        let mut h = FlowNetwork::new(3);
        h.add_edge(0, 1, Cost::Infinite);
        h.add_edge(1, 2, Cost::Infinite);
        assert_eq!(h.max_flow(0, 2), Cost::Infinite);
    }
}

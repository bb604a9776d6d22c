use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::shortest::{distances_to, shortest_path};
use super::{GraphPath, MultiverseGraph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Opportunity<T> {
    /// Share of the reference path travelled while approaching the comparison target.
    pub value: T,
    /// False when the comparison target cannot be reached from any vertex of the reference path.
    pub reachable: bool,
}

/// Walks `reference` and accumulates arc weights while the shortest distance
/// to the comparison target strictly decreases; stops at the first step that
/// does not. `to_cmp[v]` is the shortest distance from `v` to that target.
pub fn opportunity_along<T: Scalar>(reference: &GraphPath<T>, to_cmp: &[T]) -> Opportunity<T> {
    let reachable = reference.vertices.iter().any(|&v| to_cmp[v].is_finite());
    if !reachable {
        return Opportunity {
            value: T::zero(),
            reachable,
        };
    }
    let mut accumulated = T::zero();
    let mut previous = to_cmp[reference.vertices[0]];
    for (&v, &w) in reference.vertices[1..].iter().zip(&reference.edge_weights) {
        let current = to_cmp[v];
        if current >= previous {
            break;
        }
        accumulated = accumulated + w;
        previous = current;
    }
    let total = reference.total_length;
    let value = if total > T::zero() {
        (accumulated / total).min(T::one())
    } else if to_cmp[reference.target()] == T::zero() {
        T::one()
    } else {
        T::zero()
    };
    Opportunity { value, reachable }
}

/// Opportunity of the optimal path `factual → ref_cf` with respect to `cmp_cf`.
pub fn graph_opportunity_potential<T: Scalar>(
    g: &MultiverseGraph<T>,
    factual: usize,
    ref_cf: usize,
    cmp_cf: usize,
) -> Result<Opportunity<T>> {
    g.check_vertex(cmp_cf)?;
    let reference = shortest_path(g, factual, ref_cf)?;
    Ok(opportunity_along(&reference, &distances_to(g, cmp_cf)))
}

/// Caches reverse shortest-path distances per comparison target.
#[derive(Debug)]
pub struct OpportunityScorer<'g, T> {
    graph: &'g MultiverseGraph<T>,
    to_target: HashMap<usize, Vec<T>>,
}

impl<'g, T: Scalar> OpportunityScorer<'g, T> {
    pub fn new(graph: &'g MultiverseGraph<T>) -> Self {
        Self {
            graph,
            to_target: HashMap::new(),
        }
    }

    pub fn distances_to(&mut self, target: usize) -> Result<&[T]> {
        self.graph.check_vertex(target)?;
        let g = self.graph;
        Ok(self.to_target.entry(target).or_insert_with(|| distances_to(g, target)))
    }

    pub fn score(&mut self, reference: &GraphPath<T>, cmp: usize) -> Result<Opportunity<T>> {
        if reference.vertices.iter().any(|&v| !self.graph.contains(v)) {
            return Err(Error::InvalidParameter("reference path leaves the graph".into()));
        }
        Ok(opportunity_along(reference, self.distances_to(cmp)?))
    }

    /// Mean opportunity of `reference` over `alternatives`, skipping its own target.
    /// Returns zero when no other alternative remains.
    pub fn mean_against(&mut self, reference: &GraphPath<T>, alternatives: &[usize]) -> Result<T> {
        let own = reference.target();
        let mut sum = T::zero();
        let mut count = 0usize;
        for &b in alternatives.iter().filter(|&&b| b != own) {
            sum = sum + self.score(reference, b)?.value;
            count += 1;
        }
        Ok(if count == 0 {
            T::zero()
        } else {
            sum / T::lit(count as f64)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Arc;

    fn graph(n: usize, arcs: &[(usize, usize, f64)]) -> MultiverseGraph<f64> {
        let arcs: Vec<_> = arcs.iter().map(|&(from, to, weight)| Arc { from, to, weight }).collect();
        MultiverseGraph::from_arcs(vec![vec![0.0]; n], &arcs).unwrap()
    }

    #[test]
    fn same_target_is_one() {
        let g = graph(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5)]);
        let o = graph_opportunity_potential(&g, 0, 3, 3).unwrap();
        assert_eq!(o.value, 1.0);
        assert!(o.reachable);
    }

    #[test]
    fn immediate_divergence_is_zero() {
        // 0→1 towards ref 1; cmp 2 only reachable from 0
        let g = graph(3, &[(0, 1, 1.0), (0, 2, 1.0)]);
        let o = graph_opportunity_potential(&g, 0, 1, 2).unwrap();
        assert_eq!(o.value, 0.0);
        assert!(o.reachable);
    }

    #[test]
    fn partial_share() {
        // path 0→1→2→3 (weights 1,1,2); cmp 4 hangs off 1
        let g = graph(5, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 2.0), (1, 4, 1.0), (2, 4, 5.0)]);
        let o = graph_opportunity_potential(&g, 0, 3, 4).unwrap();
        assert_eq!(o.value, 0.25);
    }

    #[test]
    fn unreachable_comparison_is_flagged() {
        let g = graph(3, &[(0, 1, 1.0)]);
        let o = graph_opportunity_potential(&g, 0, 1, 2).unwrap();
        assert_eq!(o, Opportunity { value: 0.0, reachable: false });
        assert!(graph_opportunity_potential(&g, 1, 0, 2).is_err());
    }

    #[test]
    fn mean_skips_own_target() {
        let g = graph(4, &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]);
        let mut s = OpportunityScorer::new(&g);
        let reference = shortest_path(&g, 0, 3).unwrap();
        assert_eq!(s.mean_against(&reference, &[3]).unwrap(), 0.0);
        // towards 1: first step reaches 1 (distance 0), then 3 cannot return
        assert_eq!(s.mean_against(&reference, &[3, 1]).unwrap(), 0.5);
    }
}

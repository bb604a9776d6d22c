//! Branching factors: how cheaply alternative-class vertices stay reachable.
//!
//! The per-vertex cost `c(v)` is the mean, over alternative classes, of the
//! shortest-path length from `v` to the nearest other vertex of that class.
//! Costs are rescaled by the largest cost among evaluated vertices, so the
//! score `r = −ln(c / c_max)` is non-negative and only meaningful comparatively.

use rayon::prelude::*;

use super::shortest::ShortestPathTree;
use super::{GraphPath, MultiverseGraph};
use crate::dataio::ClassId;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Floor for the rescaled cost; keeps `r` finite for zero-length arcs.
const MIN_RELATIVE_COST: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct BranchingFactors<T> {
    costs: Vec<Option<T>>,
    max_cost: Option<T>,
    alternative_classes: Vec<ClassId>,
}

impl<T: Scalar> BranchingFactors<T> {
    /// Evaluates every vertex of `g`, counting classes not in `exclude`.
    pub fn compute(g: &MultiverseGraph<T>, exclude: &[ClassId]) -> Self {
        let all: Vec<usize> = (0..g.len()).collect();
        Self::compute_for(g, exclude, &all)
    }

    /// Evaluates only `vertices`; the rest report no score.
    pub fn compute_for(g: &MultiverseGraph<T>, exclude: &[ClassId], vertices: &[usize]) -> Self {
        let mut alternative_classes: Vec<ClassId> =
            g.classes().iter().copied().filter(|c| !exclude.contains(c)).collect();
        alternative_classes.sort_unstable();
        alternative_classes.dedup();

        let evaluated: Vec<(usize, Option<T>)> = vertices
            .par_iter()
            .map(|&v| (v, raw_cost(g, v, &alternative_classes)))
            .collect();
        let mut costs = vec![None; g.len()];
        for (v, c) in evaluated {
            costs[v] = c;
        }
        let max_cost = costs.iter().flatten().copied().fold(None, |m: Option<T>, c| {
            Some(m.map_or(c, |m| m.max(c)))
        });
        Self {
            costs,
            max_cost,
            alternative_classes,
        }
    }

    pub fn alternative_classes(&self) -> &[ClassId] {
        &self.alternative_classes
    }

    /// Mean distance to the alternative classes before rescaling.
    pub fn cost(&self, v: usize) -> Option<T> {
        self.costs.get(v).copied().flatten()
    }

    pub fn max_cost(&self) -> Option<T> {
        self.max_cost
    }

    /// `r_v = −ln(c_v / c_max)`; `None` when no alternative class is reachable from `v`.
    pub fn get(&self, v: usize) -> Option<T> {
        let c = self.cost(v)?;
        let max = self.max_cost?;
        let relative = if max > T::zero() { c / max } else { T::one() };
        Some(-relative.max(T::lit(MIN_RELATIVE_COST)).ln())
    }

    pub fn node(&self, v: usize) -> Result<T> {
        self.get(v).ok_or(Error::NoAlternativeReachable(v))
    }

    pub fn as_vec(&self) -> Vec<Option<T>> {
        (0..self.costs.len()).map(|v| self.get(v)).collect()
    }
}

fn raw_cost<T: Scalar>(g: &MultiverseGraph<T>, v: usize, classes: &[ClassId]) -> Option<T> {
    if classes.is_empty() {
        return None;
    }
    let tree = ShortestPathTree::new(g, v).expect("vertex comes from the graph");
    let mut nearest = vec![T::infinity(); classes.len()];
    for (z, &d) in tree.distances().iter().enumerate() {
        if z == v || !d.is_finite() {
            continue;
        }
        if let Ok(i) = classes.binary_search(&g.class_of(z)) {
            nearest[i] = nearest[i].min(d);
        }
    }
    let reachable: Vec<T> = nearest.into_iter().filter(|d| d.is_finite()).collect();
    if reachable.is_empty() {
        None
    } else {
        Some(reachable.iter().copied().sum::<T>() / T::lit(reachable.len() as f64))
    }
}

/// Branching factor of a single vertex, rescaled against all vertices of `g`.
pub fn node_branching_factor<T: Scalar>(g: &MultiverseGraph<T>, v: usize, exclude: &[ClassId]) -> Result<T> {
    g.check_vertex(v)?;
    BranchingFactors::compute(g, exclude).node(v)
}

/// Discounted mean of `r` over the interior vertices `v_2 … v_{n−1}`; the
/// first interior vertex has discount exponent 0.
pub fn path_branching_factor<T: Scalar>(
    path: &GraphPath<T>,
    gamma: T,
    per_node: &BranchingFactors<T>,
) -> Result<T> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let n = path.vertices.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "path with {n} vertices has no interior vertex"
        )));
    }
    let mut sum = T::zero();
    let mut discount = T::one();
    for &v in &path.vertices[1..n - 1] {
        sum = sum + discount * per_node.node(v)?;
        discount = discount * gamma;
    }
    Ok(sum / T::lit((n - 2) as f64))
}

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::MultiverseGraph;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Vertex sequence `v_1 … v_n` with the `n − 1` traversed arc weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GraphPath<T> {
    pub vertices: Vec<usize>,
    pub edge_weights: Vec<T>,
    pub total_length: T,
}

impl<T: Scalar> GraphPath<T> {
    pub fn trivial(v: usize) -> Self {
        Self {
            vertices: vec![v],
            edge_weights: Vec::new(),
            total_length: T::zero(),
        }
    }

    /// Reads arc weights off `g`; fails if two consecutive vertices are not joined by an arc.
    pub fn from_vertices(g: &MultiverseGraph<T>, vertices: Vec<usize>) -> Result<Self> {
        let Some(&first) = vertices.first() else {
            return Err(Error::InvalidParameter("a graph path needs at least one vertex".into()));
        };
        g.check_vertex(first)?;
        let mut edge_weights = Vec::with_capacity(vertices.len().saturating_sub(1));
        for w in vertices.windows(2) {
            g.check_vertex(w[1])?;
            edge_weights.push(g.weight(w[0], w[1]).ok_or_else(|| {
                Error::InvalidParameter(format!("no arc {} -> {}", w[0], w[1]))
            })?);
        }
        let total_length = edge_weights.iter().fold(T::zero(), |acc, &w| acc + w);
        Ok(Self {
            vertices,
            edge_weights,
            total_length,
        })
    }

    pub fn source(&self) -> usize {
        self.vertices[0]
    }

    pub fn target(&self) -> usize {
        *self.vertices.last().expect("non-empty path")
    }

    pub fn hops(&self) -> usize {
        self.edge_weights.len()
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry<T> {
    dist: T,
    vertex: usize,
}

impl<T: Scalar> Eq for Entry<T> {}

impl<T: Scalar> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<T: Scalar> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths. Among equally long paths the
/// lexicographically smallest vertex sequence wins.
#[derive(Clone, Debug)]
pub struct ShortestPathTree<T> {
    source: usize,
    dist: Vec<T>,
    pred: Vec<Option<usize>>,
}

impl<T: Scalar> ShortestPathTree<T> {
    pub fn new(g: &MultiverseGraph<T>, source: usize) -> Result<Self> {
        g.check_vertex(source)?;
        let n = g.len();
        let mut dist = vec![T::infinity(); n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = T::zero();
        heap.push(Entry {
            dist: T::zero(),
            vertex: source,
        });
        while let Some(Entry { dist: d, vertex: u }) = heap.pop() {
            if done[u] || d > dist[u] {
                continue;
            }
            done[u] = true;
            for &(v, w) in g.neighbors(u) {
                if done[v] {
                    continue;
                }
                let candidate = d + w;
                if candidate < dist[v] {
                    dist[v] = candidate;
                    pred[v] = Some(u);
                    heap.push(Entry {
                        dist: candidate,
                        vertex: v,
                    });
                } else if candidate == dist[v] {
                    let current = pred[v].expect("finite distance has a predecessor");
                    if current != u {
                        let mut via_u = route(&pred, u);
                        via_u.push(v);
                        let mut via_current = route(&pred, current);
                        via_current.push(v);
                        if via_u < via_current {
                            pred[v] = Some(u);
                        }
                    }
                }
            }
        }
        Ok(Self { source, dist, pred })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Shortest distance to every vertex (`+∞` when unreachable).
    pub fn distances(&self) -> &[T] {
        &self.dist
    }

    pub fn distance(&self, v: usize) -> T {
        self.dist[v]
    }

    pub fn path_to(&self, g: &MultiverseGraph<T>, target: usize) -> Result<GraphPath<T>> {
        g.check_vertex(target)?;
        if !self.dist[target].is_finite() {
            return Err(Error::Unreachable {
                from: self.source,
                to: target,
            });
        }
        GraphPath::from_vertices(g, route(&self.pred, target))
    }
}

/// Vertex sequence from the tree root to `v`, following predecessors.
fn route(pred: &[Option<usize>], v: usize) -> Vec<usize> {
    let mut seq = vec![v];
    let mut at = v;
    while let Some(p) = pred[at] {
        seq.push(p);
        at = p;
    }
    seq.reverse();
    seq
}

pub fn shortest_path<T: Scalar>(g: &MultiverseGraph<T>, from: usize, to: usize) -> Result<GraphPath<T>> {
    g.check_vertex(to)?;
    ShortestPathTree::new(g, from)?.path_to(g, to)
}

/// Shortest distance from every vertex to `target`, via the reversed graph.
pub(crate) fn distances_to<T: Scalar>(g: &MultiverseGraph<T>, target: usize) -> Vec<T> {
    let n = g.len();
    let mut dist = vec![T::infinity(); n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[target] = T::zero();
    heap.push(Entry {
        dist: T::zero(),
        vertex: target,
    });
    while let Some(Entry { dist: d, vertex: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in g.in_neighbors(u) {
            let candidate = w + d;
            if candidate < dist[v] {
                dist[v] = candidate;
                heap.push(Entry {
                    dist: candidate,
                    vertex: v,
                });
            }
        }
    }
    dist
}

//! Directed k-NN graph over dataset rows and the metrics defined on it.

mod branching;
mod distance;
mod explain;
mod opportunity;
mod shortest;

pub use branching::{node_branching_factor, path_branching_factor, BranchingFactors};
pub use distance::{monotonicity_distance, weighted_distance};
pub use explain::{
    build_multiverse, counterfactual_reports, default_exclusions, diverse_alternatives, score_candidates,
    select_optimal, BuildConfig, CounterfactualReport, ExplainStatus, Explanation,
};
pub use opportunity::{graph_opportunity_potential, opportunity_along, Opportunity, OpportunityScorer};
pub use shortest::{shortest_path, GraphPath, ShortestPathTree};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataio::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::model::Classifier;
use crate::scalar::Scalar;

pub const GRAPH_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Arc<T> {
    pub from: usize,
    pub to: usize,
    pub weight: T,
}

/// Vertices are dataset rows; arcs carry non-negative weights.
///
/// Besides the topology the graph keeps what later queries need: the encoded
/// instance per vertex, its predicted class, the target class and the
/// counterfactual candidates (`f̃(x) ≥ t`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphDoc<T>", into = "GraphDoc<T>", bound = "T: Scalar")]
pub struct MultiverseGraph<T> {
    out: Vec<Vec<(usize, T)>>,
    incoming: Vec<Vec<(usize, T)>>,
    k: usize,
    lambda: T,
    threshold: T,
    candidates: Vec<usize>,
    is_candidate: Vec<bool>,
    instances: Vec<Vec<T>>,
    classes: Vec<ClassId>,
    target_class: ClassId,
}

impl<T: Scalar> MultiverseGraph<T> {
    /// Graph with explicit arcs. `k` defaults to the largest out-degree,
    /// `lambda` to 1, the threshold to 1, classes to 0 and target class to 1.
    pub fn from_arcs(instances: Vec<Vec<T>>, arcs: &[Arc<T>]) -> Result<Self> {
        let n = instances.len();
        let mut out: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for a in arcs {
            if a.from >= n {
                return Err(Error::UnknownVertex(a.from));
            }
            if a.to >= n {
                return Err(Error::UnknownVertex(a.to));
            }
            if a.from == a.to {
                return Err(Error::Data(format!("self-loop on vertex {}", a.from)));
            }
            if !(a.weight >= T::zero()) || !a.weight.is_finite() {
                return Err(Error::Data(format!(
                    "arc {} -> {} has invalid weight {}",
                    a.from, a.to, a.weight
                )));
            }
            out[a.from].push((a.to, a.weight));
        }
        for (v, list) in out.iter_mut().enumerate() {
            list.sort_by_key(|&(to, _)| to);
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Data(format!("duplicate arc {} -> {}", v, w[0].0)));
            }
        }
        let k = out.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self::assemble(
            out,
            k,
            T::one(),
            T::one(),
            Vec::new(),
            instances,
            vec![0; n],
            1,
        )?)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        out: Vec<Vec<(usize, T)>>,
        k: usize,
        lambda: T,
        threshold: T,
        candidates: Vec<usize>,
        instances: Vec<Vec<T>>,
        classes: Vec<ClassId>,
        target_class: ClassId,
    ) -> Result<Self> {
        let n = out.len();
        if instances.len() != n || classes.len() != n {
            return Err(Error::Data(format!(
                "{} vertices but {} instances and {} classes",
                n,
                instances.len(),
                classes.len()
            )));
        }
        let mut incoming: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (from, list) in out.iter().enumerate() {
            for &(to, w) in list {
                incoming[to].push((from, w));
            }
        }
        let mut g = Self {
            out,
            incoming,
            k,
            lambda,
            threshold,
            candidates: Vec::new(),
            is_candidate: vec![false; n],
            instances,
            classes,
            target_class,
        };
        g.set_candidates(candidates)?;
        Ok(g)
    }

    fn set_candidates(&mut self, mut candidates: Vec<usize>) -> Result<()> {
        candidates.sort_unstable();
        candidates.dedup();
        if let Some(&bad) = candidates.iter().find(|&&c| c >= self.len()) {
            return Err(Error::UnknownVertex(bad));
        }
        self.is_candidate = vec![false; self.len()];
        for &c in &candidates {
            self.is_candidate[c] = true;
        }
        self.candidates = candidates;
        Ok(())
    }

    pub fn with_candidates(mut self, candidates: Vec<usize>) -> Result<Self> {
        self.set_candidates(candidates)?;
        Ok(self)
    }

    pub fn with_classes(mut self, classes: Vec<ClassId>, target_class: ClassId) -> Result<Self> {
        if classes.len() != self.len() {
            return Err(Error::Data(format!(
                "{} classes for {} vertices",
                classes.len(),
                self.len()
            )));
        }
        self.classes = classes;
        self.target_class = target_class;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.len()
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Out-neighbors of `v` with arc weights, ascending by neighbor index.
    pub fn neighbors(&self, v: usize) -> &[(usize, T)] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[(usize, T)] {
        &self.incoming[v]
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<T> {
        let list = self.out.get(from)?;
        list.binary_search_by_key(&to, |&(t, _)| t).ok().map(|i| list[i].1)
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc<T>> + '_ {
        self.out.iter().enumerate().flat_map(|(from, list)| {
            list.iter().map(move |&(to, weight)| Arc { from, to, weight })
        })
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn is_candidate(&self, v: usize) -> bool {
        self.is_candidate.get(v).copied().unwrap_or(false)
    }

    pub fn instance(&self, v: usize) -> &[T] {
        &self.instances[v]
    }

    pub fn instances(&self) -> &[Vec<T>] {
        &self.instances
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn class_of(&self, v: usize) -> ClassId {
        self.classes[v]
    }

    pub fn target_class(&self) -> ClassId {
        self.target_class
    }

    /// Every vertex reachable from `from` along directed arcs (including `from`).
    pub fn reachable_from(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.out[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

/// Parameters of graph construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GraphConfig<T> {
    /// Outgoing arcs kept per vertex.
    pub k: usize,
    /// Penalty for changes against a column's monotonicity.
    pub lambda: T,
    /// Candidate threshold on the target-class probability, in `(0, 1]`.
    pub threshold: T,
    pub target_class: ClassId,
}

impl<T: Scalar> GraphConfig<T> {
    pub fn validate(&self, rows: usize) -> Result<()> {
        if self.k == 0 || self.k >= rows {
            return Err(Error::InvalidParameter(format!(
                "k must be in 1..{rows} (fewer than the number of rows), got {}",
                self.k
            )));
        }
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        if !(self.threshold > T::zero() && self.threshold <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be in (0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Builds the neighbourhood graph: all pairwise schema-aware distances, each
/// vertex keeping its `k` cheapest finite outgoing arcs (ties by target index).
pub fn build_graph<T: Scalar, C: Classifier<T> + ?Sized>(
    data: &Dataset<T>,
    clf: &C,
    cfg: &GraphConfig<T>,
) -> Result<MultiverseGraph<T>> {
    cfg.validate(data.len())?;
    let constraints = data.column_constraints();
    let rows = data.instances();
    let out: Vec<Vec<(usize, T)>> = (0..rows.len())
        .into_par_iter()
        .map(|i| {
            let mut arcs: Vec<(usize, T)> = rows
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, r)| (j, monotonicity_distance(&rows[i], r, &constraints, cfg.lambda)))
                .filter(|(_, w)| w.is_finite())
                .collect();
            arcs.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite weights").then(a.0.cmp(&b.0)));
            arcs.truncate(cfg.k);
            arcs.sort_by_key(|&(j, _)| j);
            arcs
        })
        .collect();

    let mut candidates = Vec::new();
    let mut classes = Vec::with_capacity(rows.len());
    for (j, r) in rows.iter().enumerate() {
        if clf.predict_proba(r, cfg.target_class)? >= cfg.threshold {
            candidates.push(j);
        }
        classes.push(clf.predict(r)?);
    }
    MultiverseGraph::assemble(
        out,
        cfg.k,
        cfg.lambda,
        cfg.threshold,
        candidates,
        rows.to_vec(),
        classes,
        cfg.target_class,
    )
}

/// On-disk / wire form of a [`MultiverseGraph`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GraphDoc<T> {
    pub schema_version: u32,
    pub vertices: Vec<usize>,
    pub arcs: Vec<Arc<T>>,
    pub k: usize,
    pub lambda: T,
    pub t: T,
    pub candidates: Vec<usize>,
    pub target_class: ClassId,
    pub classes: Vec<ClassId>,
    pub instances: Vec<Vec<T>>,
}

impl<T: Scalar> From<MultiverseGraph<T>> for GraphDoc<T> {
    fn from(g: MultiverseGraph<T>) -> Self {
        Self {
            schema_version: GRAPH_SCHEMA_VERSION,
            vertices: (0..g.len()).collect(),
            arcs: g.arcs().collect(),
            k: g.k,
            lambda: g.lambda,
            t: g.threshold,
            candidates: g.candidates,
            target_class: g.target_class,
            classes: g.classes,
            instances: g.instances,
        }
    }
}

impl<T: Scalar> TryFrom<GraphDoc<T>> for MultiverseGraph<T> {
    type Error = Error;

    fn try_from(doc: GraphDoc<T>) -> Result<Self> {
        if doc.schema_version != GRAPH_SCHEMA_VERSION {
            return Err(Error::Data(format!(
                "unsupported graph schema_version {}",
                doc.schema_version
            )));
        }
        if doc.vertices != (0..doc.instances.len()).collect::<Vec<_>>() {
            return Err(Error::Data("vertices must be 0..n in order, one per instance".into()));
        }
        let g = MultiverseGraph::from_arcs(doc.instances, &doc.arcs)?
            .with_candidates(doc.candidates)?
            .with_classes(doc.classes, doc.target_class)?;
        if g.out.iter().any(|l| l.len() > doc.k) {
            return Err(Error::Data(format!("a vertex has more than k = {} arcs", doc.k)));
        }
        Ok(MultiverseGraph {
            k: doc.k,
            lambda: doc.lambda,
            threshold: doc.t,
            ..g
        })
    }
}

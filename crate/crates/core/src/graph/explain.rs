//! Counterfactual reports for one factual vertex, diverse alternative sets and
//! the top-`c` opportunity-maximizing selection.

use serde::{Deserialize, Serialize};

use super::branching::{path_branching_factor, BranchingFactors};
use super::opportunity::OpportunityScorer;
use super::shortest::ShortestPathTree;
use super::{build_graph, GraphConfig, GraphPath, MultiverseGraph};
use crate::dataio::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::model::Classifier;
use crate::scalar::{l2_distance, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CounterfactualReport<T> {
    pub target: usize,
    pub path: GraphPath<T>,
    /// Total weight of `path`.
    pub distance: T,
    /// Discounted interior branching factor; absent for direct (one-arc) paths
    /// or when an interior vertex reaches no alternative class.
    pub branching_factor: Option<T>,
    /// Mean opportunity potential against an alternative set, once scored.
    pub opportunity: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplainStatus {
    Explained,
    /// The graph has no counterfactual candidates at all.
    NoCandidates,
    /// Candidates exist but none is reachable from the factual vertex.
    NoneReachable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Explanation<T> {
    pub factual: usize,
    pub status: ExplainStatus,
    /// Reachable candidates, ascending by distance then target index.
    pub reports: Vec<CounterfactualReport<T>>,
    pub unreachable: Vec<usize>,
}

/// Classes left out of branching factors: the factual and target classes,
/// or only the factual class when nothing else would remain.
pub fn default_exclusions<T: Scalar>(g: &MultiverseGraph<T>, factual: usize) -> Vec<ClassId> {
    let own = g.class_of(factual);
    let both = [own, g.target_class()];
    if g.classes().iter().any(|c| !both.contains(c)) {
        let mut v = both.to_vec();
        v.dedup();
        v
    } else {
        vec![own]
    }
}

/// Shortest paths from `factual` to every candidate, with optional branching factors.
pub fn counterfactual_reports<T: Scalar>(
    g: &MultiverseGraph<T>,
    factual: usize,
    branching: Option<(&BranchingFactors<T>, T)>,
) -> Result<Explanation<T>> {
    g.check_vertex(factual)?;
    if g.is_candidate(factual) {
        return Err(Error::FactualIsCounterfactual(factual));
    }
    if g.candidates().is_empty() {
        return Ok(Explanation {
            factual,
            status: ExplainStatus::NoCandidates,
            reports: Vec::new(),
            unreachable: Vec::new(),
        });
    }
    let tree = ShortestPathTree::new(g, factual)?;
    let mut reports = Vec::new();
    let mut unreachable = Vec::new();
    for &c in g.candidates() {
        if !tree.distance(c).is_finite() {
            unreachable.push(c);
            continue;
        }
        let path = tree.path_to(g, c)?;
        let branching_factor = match branching {
            Some((factors, gamma)) if path.vertices.len() >= 3 => path_branching_factor(&path, gamma, factors).ok(),
            _ => None,
        };
        reports.push(CounterfactualReport {
            target: c,
            distance: path.total_length,
            path,
            branching_factor,
            opportunity: None,
        });
    }
    sort_by_distance(&mut reports);
    let status = if reports.is_empty() {
        ExplainStatus::NoneReachable
    } else {
        ExplainStatus::Explained
    };
    Ok(Explanation {
        factual,
        status,
        reports,
        unreachable,
    })
}

fn sort_by_distance<T: Scalar>(reports: &mut [CounterfactualReport<T>]) {
    reports.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.target.cmp(&b.target))
    });
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BuildConfig<T> {
    pub graph: GraphConfig<T>,
    /// Discount for interior branching factors.
    pub gamma: T,
}

/// Builds the graph and explains `factual` in one go.
pub fn build_multiverse<T: Scalar, C: Classifier<T> + ?Sized>(
    data: &Dataset<T>,
    clf: &C,
    factual: usize,
    cfg: &BuildConfig<T>,
) -> Result<(MultiverseGraph<T>, Explanation<T>)> {
    if factual >= data.len() {
        return Err(Error::UnknownVertex(factual));
    }
    if !(cfg.gamma > T::zero()) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {}", cfg.gamma)));
    }
    let g = build_graph(data, clf, &cfg.graph)?;
    if g.is_candidate(factual) {
        return Err(Error::FactualIsCounterfactual(factual));
    }
    let factors = BranchingFactors::compute(&g, &default_exclusions(&g, factual));
    let explanation = counterfactual_reports(&g, factual, Some((&factors, cfg.gamma)))?;
    Ok((g, explanation))
}

/// Greedy scan in distance order keeping reports whose instance lies at
/// least `separation` (L²) from every report kept so far.
pub fn diverse_alternatives<T: Scalar>(
    g: &MultiverseGraph<T>,
    reports: &[CounterfactualReport<T>],
    count: usize,
    separation: T,
) -> Vec<CounterfactualReport<T>> {
    let mut kept: Vec<CounterfactualReport<T>> = Vec::with_capacity(count);
    for r in reports {
        if kept.len() >= count {
            break;
        }
        let x = g.instance(r.target);
        if kept.iter().all(|k| l2_distance(g.instance(k.target), x) >= separation) {
            kept.push(r.clone());
        }
    }
    kept
}

/// The `c` nearest reports, each scored by its mean opportunity against `alternatives`.
pub fn score_candidates<T: Scalar>(
    g: &MultiverseGraph<T>,
    reports: &[CounterfactualReport<T>],
    c: usize,
    alternatives: &[CounterfactualReport<T>],
) -> Result<Vec<CounterfactualReport<T>>> {
    if c == 0 {
        return Err(Error::InvalidParameter("c must be at least 1".into()));
    }
    let mut pool: Vec<CounterfactualReport<T>> = reports.to_vec();
    sort_by_distance(&mut pool);
    pool.truncate(c);
    let alt: Vec<usize> = alternatives.iter().map(|a| a.target).collect();
    let mut scorer = OpportunityScorer::new(g);
    for r in &mut pool {
        r.opportunity = Some(scorer.mean_against(&r.path, &alt)?);
    }
    Ok(pool)
}

/// Among the `c` nearest reports, the one with the highest mean opportunity;
/// ties go to the smaller distance, then the smaller target index.
pub fn select_optimal<T: Scalar>(
    g: &MultiverseGraph<T>,
    reports: &[CounterfactualReport<T>],
    c: usize,
    alternatives: &[CounterfactualReport<T>],
) -> Result<CounterfactualReport<T>> {
    let pool = score_candidates(g, reports, c, alternatives)?;
    let mut best: Option<&CounterfactualReport<T>> = None;
    for r in &pool {
        // pool is already in (distance, target) order, so only strict gains replace
        if best.map_or(true, |b| r.opportunity > b.opportunity) {
            best = Some(r);
        }
    }
    best.cloned().ok_or(Error::NoReachableCandidates)
}

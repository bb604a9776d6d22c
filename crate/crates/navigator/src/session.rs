//! Navigation sessions: a walk through the graph that starts at a factual
//! vertex and ends once it lands on a counterfactual candidate.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use multiverse::graph::{
    counterfactual_reports, default_exclusions, diverse_alternatives, select_optimal, BranchingFactors,
    CounterfactualReport, GraphPath, MultiverseGraph, OpportunityScorer, ShortestPathTree,
};

use crate::error::NavError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionOptions {
    /// Pool size for the optimum reported at session start.
    pub top_c: usize,
    pub alt_count: usize,
    pub alt_separation: f64,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            top_c: 10,
            alt_count: 5,
            alt_separation: 1.0,
        }
    }
}

impl SessionOptions {
    pub fn validate(&self) -> Result<(), NavError> {
        if self.top_c == 0 || self.alt_count == 0 {
            return Err(NavError::BadRequest("top_c and alt_count must be at least 1".into()));
        }
        if !(self.alt_separation >= 0.0 && self.alt_separation.is_finite()) {
            return Err(NavError::BadRequest("alt_separation must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub vertex: usize,
    /// Weight of the arc taken to arrive here; 0 for the factual vertex.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachableCandidate {
    pub vertex: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReachableSet {
    pub count: usize,
    /// Ascending by distance, then vertex.
    pub candidates: Vec<ReachableCandidate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPreview {
    pub neighbor: usize,
    pub edge_weight: f64,
    /// Candidates reachable after stepping to `neighbor`, with distances
    /// measured from the current vertex through that arc.
    pub reachable_candidates: ReachableSet,
    pub delta_reachable: i64,
    pub branching_factor: Option<f64>,
    /// Keyed by target vertex. The reference journey is the step followed by
    /// the shortest path to the nearest candidate reachable from `neighbor`.
    pub opportunity_to_each_target: BTreeMap<usize, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavigationSession {
    pub id: String,
    pub graph_id: String,
    pub factual: usize,
    pub current: usize,
    pub history: Vec<HistoryEntry>,
    pub total_weight: f64,
    /// Bumped on every accepted step.
    pub version: u64,
    pub created_at_ms: u64,
    pub updated_at_ms: u64,
    pub options: SessionOptions,
    /// Selection reported when the session started, if any candidate was reachable.
    pub optimum: Option<CounterfactualReport<f64>>,
    /// Optimum plus its diverse alternatives; previews score opportunity against these.
    pub targets: Vec<usize>,
    pub reachable_now: ReachableSet,
    pub previews: Vec<StepPreview>,
    pub complete: bool,
    pub realized_path: Option<GraphPath<f64>>,
    /// Share of the realized walk that kept approaching the reported optimum.
    pub realized_opportunity: Option<f64>,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

fn check_vertex(g: &MultiverseGraph<f64>, v: usize) -> Result<(), NavError> {
    if g.contains(v) {
        Ok(())
    } else {
        Err(NavError::UnknownVertex(v))
    }
}

/// Candidates reachable from `from`, with `offset` added to every distance.
pub fn reachable_from(g: &MultiverseGraph<f64>, tree: &ShortestPathTree<f64>, offset: f64) -> ReachableSet {
    let mut candidates: Vec<ReachableCandidate> = g
        .candidates()
        .iter()
        .filter(|&&c| tree.distance(c).is_finite())
        .map(|&c| ReachableCandidate {
            vertex: c,
            distance: offset + tree.distance(c),
        })
        .collect();
    candidates.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.vertex.cmp(&b.vertex)));
    ReachableSet {
        count: candidates.len(),
        candidates,
    }
}

/// One preview per out-neighbour of `session.current`.
pub fn compute_previews(g: &MultiverseGraph<f64>, session: &NavigationSession) -> Vec<StepPreview> {
    let u = session.current;
    let arcs = g.neighbors(u);
    let vertices: Vec<usize> = arcs.iter().map(|a| a.0).collect();
    let factors = BranchingFactors::compute_for(g, &default_exclusions(g, session.factual), &vertices);
    let mut scorer = OpportunityScorer::new(g);
    arcs.iter()
        .map(|&(v, w)| {
            let tree = ShortestPathTree::new(g, v).expect("neighbour is a vertex");
            let reachable = reachable_from(g, &tree, w);
            let mut opportunity = BTreeMap::new();
            if let Some(nearest) = reachable.candidates.first() {
                let tail = tree.path_to(g, nearest.vertex).expect("reachable");
                let mut vertices = vec![u];
                vertices.extend(&tail.vertices);
                let reference = GraphPath::from_vertices(g, vertices).expect("arcs exist");
                for &t in &session.targets {
                    let l = scorer.score(&reference, t).expect("target is a vertex").value;
                    opportunity.insert(t, l);
                }
            }
            StepPreview {
                neighbor: v,
                edge_weight: w,
                delta_reachable: reachable.count as i64 - session.reachable_now.count as i64,
                reachable_candidates: reachable,
                branching_factor: factors.get(v),
                opportunity_to_each_target: opportunity,
            }
        })
        .collect()
}

fn refresh(g: &MultiverseGraph<f64>, session: &mut NavigationSession) {
    let tree = ShortestPathTree::new(g, session.current).expect("current is a vertex");
    session.reachable_now = reachable_from(g, &tree, 0.0);
    session.previews = if session.complete {
        Vec::new()
    } else {
        compute_previews(g, session)
    };
}

pub fn start_session(
    g: &MultiverseGraph<f64>,
    graph_id: &str,
    id: String,
    factual: usize,
    options: SessionOptions,
) -> Result<NavigationSession, NavError> {
    options.validate()?;
    check_vertex(g, factual)?;
    if g.is_candidate(factual) {
        return Err(NavError::FactualIsCandidate(factual));
    }
    let reports = counterfactual_reports(g, factual, None).map_or_else(|_| Vec::new(), |e| e.reports);
    let (optimum, targets) = if reports.is_empty() {
        (None, Vec::new())
    } else {
        let alternatives = diverse_alternatives(g, &reports, options.alt_count, options.alt_separation);
        let best = select_optimal(g, &reports, options.top_c, &alternatives).map_err(NavError::internal)?;
        let mut targets: Vec<usize> = alternatives.iter().map(|r| r.target).collect();
        targets.push(best.target);
        targets.sort_unstable();
        targets.dedup();
        (Some(best), targets)
    };
    let now = now_ms();
    let mut session = NavigationSession {
        id,
        graph_id: graph_id.to_string(),
        factual,
        current: factual,
        history: vec![HistoryEntry {
            vertex: factual,
            weight: 0.0,
        }],
        total_weight: 0.0,
        version: 0,
        created_at_ms: now,
        updated_at_ms: now,
        options,
        optimum,
        targets,
        reachable_now: ReachableSet::default(),
        previews: Vec::new(),
        complete: false,
        realized_path: None,
        realized_opportunity: None,
    };
    refresh(g, &mut session);
    Ok(session)
}

pub fn take_step(g: &MultiverseGraph<f64>, session: &mut NavigationSession, neighbor: usize) -> Result<(), NavError> {
    if session.complete {
        return Err(NavError::Completed);
    }
    check_vertex(g, neighbor)?;
    let w = g.weight(session.current, neighbor).ok_or(NavError::NotAdjacent {
        from: session.current,
        to: neighbor,
    })?;
    session.history.push(HistoryEntry { vertex: neighbor, weight: w });
    session.current = neighbor;
    session.total_weight += w;
    session.version += 1;
    session.updated_at_ms = now_ms();
    if g.is_candidate(neighbor) {
        session.complete = true;
        let walk: Vec<usize> = session.history.iter().map(|h| h.vertex).collect();
        let realized = GraphPath::from_vertices(g, walk).map_err(NavError::internal)?;
        if let Some(opt) = &session.optimum {
            let mut scorer = OpportunityScorer::new(g);
            session.realized_opportunity = Some(scorer.score(&realized, opt.target).map_err(NavError::internal)?.value);
        }
        session.realized_path = Some(realized);
    }
    refresh(g, session);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use multiverse::graph::Arc;

    /// 0 → 1 → 2(candidate), 0 → 3 (dead end), 1 → 4(candidate)
    fn fixture() -> MultiverseGraph<f64> {
        let arcs = [(0, 1, 1.0), (1, 2, 2.0), (0, 3, 0.5), (1, 4, 1.0)];
        let arcs: Vec<Arc<f64>> = arcs.iter().map(|&(from, to, weight)| Arc { from, to, weight }).collect();
        MultiverseGraph::from_arcs(vec![vec![0.0]; 5], &arcs)
            .unwrap()
            .with_candidates(vec![2, 4])
            .unwrap()
    }

    #[test]
    fn dead_end_loses_everything() {
        let g = fixture();
        let s = start_session(&g, "g", "s".into(), 0, SessionOptions::default()).unwrap();
        assert_eq!(s.reachable_now.count, 2);
        let dead = s.previews.iter().find(|p| p.neighbor == 3).unwrap();
        assert_eq!(dead.delta_reachable, -2);
        assert!(dead.opportunity_to_each_target.is_empty());
    }

    #[test]
    fn adjacent_candidate_at_edge_weight() {
        let g = fixture();
        let mut s = start_session(&g, "g", "s".into(), 0, SessionOptions::default()).unwrap();
        take_step(&g, &mut s, 1).unwrap();
        let p = s.previews.iter().find(|p| p.neighbor == 4).unwrap();
        assert_eq!(p.reachable_candidates.candidates[0], ReachableCandidate { vertex: 4, distance: 1.0 });
        take_step(&g, &mut s, 4).unwrap();
        assert!(s.complete);
        assert_eq!(s.realized_path.as_ref().unwrap().vertices, vec![0, 1, 4]);
        assert_eq!(s.total_weight, 2.0);
        assert!(s.previews.is_empty());
        assert!(matches!(take_step(&g, &mut s, 2), Err(NavError::Completed)));
    }

    #[test]
    fn rejects_non_neighbours_and_candidates() {
        let g = fixture();
        let mut s = start_session(&g, "g", "s".into(), 0, SessionOptions::default()).unwrap();
        assert!(matches!(take_step(&g, &mut s, 2), Err(NavError::NotAdjacent { from: 0, to: 2 })));
        assert_eq!(s.history.len(), 1);
        assert!(matches!(
            start_session(&g, "g", "t".into(), 2, SessionOptions::default()),
            Err(NavError::FactualIsCandidate(2))
        ));
        assert!(matches!(
            start_session(&g, "g", "t".into(), 9, SessionOptions::default()),
            Err(NavError::UnknownVertex(9))
        ));
    }

    #[test]
    fn isolated_factual_has_no_previews() {
        let g = fixture();
        let s = start_session(&g, "g", "s".into(), 3, SessionOptions::default()).unwrap();
        assert!(s.previews.is_empty());
        assert!(s.optimum.is_none());
    }
}

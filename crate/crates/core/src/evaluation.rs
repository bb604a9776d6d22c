//! Batch comparison of the nearest-counterfactual strategy against top-`c`
//! opportunity selection over every undesired factual of a dataset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::graph::{
    build_graph, counterfactual_reports, diverse_alternatives, select_optimal, CounterfactualReport, GraphConfig,
    MultiverseGraph,
};
use crate::model::Classifier;
use crate::scalar::{l2_distance, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EvalConfig<T> {
    pub graph: GraphConfig<T>,
    /// Pool sizes for the opportunity-maximizing strategy.
    pub top_c: Vec<usize>,
    pub alt_count: usize,
    pub alt_separation: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Nearest,
    Facelift,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Nearest => "nearest",
            Strategy::Facelift => "facelift",
        }
    }
}

/// One selected counterfactual for one factual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub factual: usize,
    pub strategy: Strategy,
    pub c: usize,
    pub target: usize,
    /// Graph path length.
    pub distance: f64,
    pub steps: usize,
    /// Straight-line distance between factual and counterfactual instances.
    pub l2: f64,
    pub opportunity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and population standard deviation.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: f64::NAN, std: f64::NAN };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub strategy: Strategy,
    pub c: usize,
    pub n: usize,
    pub distance: MeanStd,
    pub steps: MeanStd,
    pub l2: MeanStd,
    pub opportunity: MeanStd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub rows: Vec<SummaryRow>,
    /// Undesired factuals considered.
    pub factuals: Vec<usize>,
    /// Factuals from which no candidate is reachable.
    pub skipped: Vec<usize>,
    pub selections: Vec<Selection>,
}

impl EvalSummary {
    pub fn row(&self, strategy: Strategy, c: usize) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.strategy == strategy && r.c == c)
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "strategy",
            "c",
            "n",
            "distance_mean",
            "distance_std",
            "steps_mean",
            "steps_std",
            "l2_mean",
            "l2_std",
            "opportunity_mean",
            "opportunity_std",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![r.strategy.as_str().to_string(), r.c.to_string(), r.n.to_string()];
            for m in [r.distance, r.steps, r.l2, r.opportunity] {
                rec.push(m.mean.to_string());
                rec.push(m.std.to_string());
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Vertices that are neither candidates nor predicted as the target class.
pub fn undesired_factuals<T: Scalar>(g: &MultiverseGraph<T>) -> Vec<usize> {
    (0..g.len())
        .filter(|&v| !g.is_candidate(v) && g.class_of(v) != g.target_class())
        .collect()
}

fn selection<T: Scalar>(
    g: &MultiverseGraph<T>,
    factual: usize,
    strategy: Strategy,
    c: usize,
    r: &CounterfactualReport<T>,
) -> Selection {
    Selection {
        factual,
        strategy,
        c,
        target: r.target,
        distance: r.distance.as_f64(),
        steps: r.path.hops(),
        l2: l2_distance(g.instance(factual), g.instance(r.target)).as_f64(),
        opportunity: r.opportunity.map_or(0.0, Scalar::as_f64),
    }
}

fn evaluate_factual<T: Scalar>(g: &MultiverseGraph<T>, factual: usize, cfg: &EvalConfig<T>) -> Result<Vec<Selection>> {
    let reports = counterfactual_reports(g, factual, None)?.reports;
    if reports.is_empty() {
        return Ok(Vec::new());
    }
    let alternatives = diverse_alternatives(g, &reports, cfg.alt_count, cfg.alt_separation);
    let mut out = Vec::with_capacity(cfg.top_c.len() + 1);
    let nearest = select_optimal(g, &reports, 1, &alternatives)?;
    out.push(selection(g, factual, Strategy::Nearest, 1, &nearest));
    for &c in &cfg.top_c {
        let best = select_optimal(g, &reports, c, &alternatives)?;
        out.push(selection(g, factual, Strategy::Facelift, c, &best));
    }
    Ok(out)
}

/// Evaluates every undesired factual on an already built graph.
pub fn evaluate_graph<T: Scalar>(g: &MultiverseGraph<T>, cfg: &EvalConfig<T>) -> Result<EvalSummary> {
    if cfg.top_c.iter().any(|&c| c == 0) {
        return Err(Error::InvalidParameter("every c must be at least 1".into()));
    }
    if cfg.alt_count == 0 {
        return Err(Error::InvalidParameter("alt_count must be at least 1".into()));
    }
    if !(cfg.alt_separation >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "alt_separation must be non-negative, got {}",
            cfg.alt_separation
        )));
    }
    let factuals = undesired_factuals(g);
    if factuals.is_empty() {
        return Err(Error::Data("no factual instance of an undesired class".into()));
    }
    let per_factual: Vec<Vec<Selection>> = factuals
        .par_iter()
        .map(|&f| evaluate_factual(g, f, cfg))
        .collect::<Result<_>>()?;

    let skipped: Vec<usize> = factuals
        .iter()
        .zip(&per_factual)
        .filter(|(_, s)| s.is_empty())
        .map(|(&f, _)| f)
        .collect();
    let selections: Vec<Selection> = per_factual.into_iter().flatten().collect();

    let mut keys: Vec<(Strategy, usize)> = vec![(Strategy::Nearest, 1)];
    keys.extend(cfg.top_c.iter().map(|&c| (Strategy::Facelift, c)));
    keys.dedup();
    let rows = keys
        .into_iter()
        .map(|(strategy, c)| {
            let chosen: Vec<&Selection> = selections.iter().filter(|s| s.strategy == strategy && s.c == c).collect();
            let stat = |f: fn(&Selection) -> f64| MeanStd::of(&chosen.iter().map(|s| f(s)).collect::<Vec<_>>());
            SummaryRow {
                strategy,
                c,
                n: chosen.len(),
                distance: stat(|s| s.distance),
                steps: stat(|s| s.steps as f64),
                l2: stat(|s| s.l2),
                opportunity: stat(|s| s.opportunity),
            }
        })
        .collect();
    Ok(EvalSummary {
        rows,
        factuals,
        skipped,
        selections,
    })
}

/// Builds the graph from `data` and `clf`, then runs [`evaluate_graph`].
pub fn evaluate<T: Scalar, C: Classifier<T> + ?Sized>(
    data: &Dataset<T>,
    clf: &C,
    cfg: &EvalConfig<T>,
) -> Result<EvalSummary> {
    let g = build_graph(data, clf, &cfg.graph)?;
    evaluate_graph(&g, cfg)
}

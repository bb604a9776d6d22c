use std::fs::File;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use multiverse::bsp::{bsp_indices, BspConfig};
use multiverse::dataio::{load_csv, Dataset, FeatureSchema};
use multiverse::evaluation::{evaluate, EvalConfig};
use multiverse::graph::{
    build_graph, build_multiverse, diverse_alternatives, score_candidates, select_optimal, BuildConfig,
    CounterfactualReport, ExplainStatus, GraphConfig, GRAPH_SCHEMA_VERSION,
};
use multiverse::model::{load_predictions, Classifier, KnnClassifier};
use multiverse::moons::two_moons;
use multiverse::vector::{
    direction_difference, find_branching_point, normalize_path, opportunity_matrix, path_length, NormalizedPath,
    OpportunityMatrix, Path as VPath, WeightVector,
};
use navigator::NavigatorConfig;

use crate::args::*;
use crate::output::{emit, io_error, to_json, CliError};

const OUTPUT_SCHEMA_VERSION: u32 = 1;

fn load_dataset(args: &DataArgs) -> Result<Dataset<f64>, CliError> {
    let schema = match &args.schema {
        Some(p) => FeatureSchema::load(p)?,
        None => {
            let f = File::open(&args.data).map_err(|e| io_error(&args.data, e))?;
            FeatureSchema::numeric_from_header(f, &args.label)?
        }
    };
    let raw = load_csv(&args.data, &schema, &args.label)?;
    Ok(raw.encode_and_scale()?)
}

fn load_model(args: &ModelArgs, data: &Dataset<f64>) -> Result<Box<dyn Classifier<f64>>, CliError> {
    match (&args.knn_k, &args.predictions) {
        (Some(k), _) => Ok(Box::new(KnnClassifier::new(data, *k)?)),
        (None, Some(p)) => Ok(Box::new(load_predictions(p, data)?)),
        (None, None) => Err(CliError::Invalid("either --knn-k or --predictions is required".into())),
    }
}

fn graph_config(args: &GraphArgs) -> GraphConfig<f64> {
    GraphConfig {
        k: args.k,
        lambda: args.lambda,
        threshold: args.threshold,
        target_class: args.target_class,
    }
}

pub fn build(args: &BuildArgs) -> Result<(), CliError> {
    let data = load_dataset(&args.data)?;
    let cfg = graph_config(&args.graph);
    cfg.validate(data.len())?;
    let clf = load_model(&args.model, &data)?;
    let g = build_graph(&data, clf.as_ref(), &cfg)?;
    emit(args.output.as_deref(), &to_json(&g)?)
}

#[derive(Serialize)]
struct ExplainOutput {
    schema_version: u32,
    factual: usize,
    status: ExplainStatus,
    top_c: usize,
    selected: CounterfactualReport<f64>,
    /// The `top_c` closest reports, scored against `alternatives`.
    candidates: Vec<CounterfactualReport<f64>>,
    alternatives: Vec<usize>,
    reachable: usize,
    unreachable: Vec<usize>,
}

pub fn explain(args: &ExplainArgs) -> Result<(), CliError> {
    let data = load_dataset(&args.data)?;
    let graph = graph_config(&args.graph);
    graph.validate(data.len())?;
    if args.top_c == 0 || args.alt.alt_count == 0 {
        return Err(CliError::Invalid("--top-c and --alt-count must be at least 1".into()));
    }
    let clf = load_model(&args.model, &data)?;
    let cfg = BuildConfig {
        graph,
        gamma: args.gamma,
    };
    let (g, ex) = build_multiverse(&data, clf.as_ref(), args.factual, &cfg)?;
    match ex.status {
        ExplainStatus::Explained => {}
        ExplainStatus::NoCandidates => {
            return Err(CliError::NoCandidates("the graph has no counterfactual candidates".into()))
        }
        ExplainStatus::NoneReachable => {
            return Err(CliError::NoCandidates(format!(
                "none of the {} candidates is reachable from row {}",
                ex.unreachable.len(),
                args.factual
            )))
        }
    }
    let alternatives = diverse_alternatives(&g, &ex.reports, args.alt.alt_count, args.alt.alt_separation);
    let selected = select_optimal(&g, &ex.reports, args.top_c, &alternatives)?;
    let candidates = score_candidates(&g, &ex.reports, args.top_c, &alternatives)?;
    let out = ExplainOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        factual: args.factual,
        status: ex.status,
        top_c: args.top_c,
        selected,
        candidates,
        alternatives: alternatives.iter().map(|r| r.target).collect(),
        reachable: ex.reports.len(),
        unreachable: ex.unreachable,
    };
    emit(args.output.as_deref(), &to_json(&out)?)
}

#[derive(Serialize)]
#[serde(untagged)]
enum PathEntry {
    Ok {
        index: usize,
        length: f64,
        normalized: NormalizedPath<f64>,
    },
    Failed {
        index: usize,
        error: String,
    },
}

#[derive(Serialize)]
struct PairMetrics {
    a: usize,
    b: usize,
    direction_difference: f64,
    /// First comparison point (1-based) where the paths separate by more than
    /// epsilon; null when they never do.
    branching_point: Option<usize>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum OpportunityEntry {
    Ok {
        /// Path indices, in matrix order.
        paths: Vec<usize>,
        #[serde(flatten)]
        matrix: OpportunityMatrix<f64>,
        best: Option<usize>,
    },
    Failed {
        error: String,
    },
}

#[derive(Serialize)]
struct PathmetricsOutput {
    schema_version: u32,
    o: usize,
    epsilon: f64,
    paths: Vec<PathEntry>,
    pairs: Vec<PairMetrics>,
    opportunity: OpportunityEntry,
}

fn read_paths(file: &Path) -> Result<Vec<VPath<f64>>, CliError> {
    let text = std::fs::read_to_string(file).map_err(|e| io_error(file, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", file.display())))?;
    let docs = match value {
        serde_json::Value::Array(items) => items,
        one => vec![one],
    };
    docs.into_iter()
        .map(|d| serde_json::from_value(d).map_err(|e| CliError::Invalid(format!("{}: {e}", file.display()))))
        .collect()
}

pub fn pathmetrics(args: &PathmetricsArgs) -> Result<(), CliError> {
    if args.o == 0 {
        return Err(CliError::Invalid("--o must be at least 1".into()));
    }
    if !(args.epsilon > 0.0) {
        return Err(CliError::Invalid(format!("--epsilon must be positive, got {}", args.epsilon)));
    }
    let mut paths = Vec::new();
    for f in &args.paths {
        paths.extend(read_paths(f)?);
    }
    if paths.len() < 2 {
        return Err(CliError::Invalid(format!("need at least 2 paths, got {}", paths.len())));
    }
    let dim = paths[0].dim();
    if let Some(p) = paths.iter().find(|p| p.dim() != dim) {
        return Err(CliError::Invalid(format!("paths mix dimensions {dim} and {}", p.dim())));
    }

    let normalized: Vec<Result<NormalizedPath<f64>, String>> =
        paths.iter().map(|p| normalize_path(p, args.o).map_err(|e| e.to_string())).collect();
    let entries = normalized
        .iter()
        .enumerate()
        .map(|(index, n)| match n {
            Ok(q) => PathEntry::Ok {
                index,
                length: path_length(&paths[index]),
                normalized: q.clone(),
            },
            Err(error) => PathEntry::Failed {
                index,
                error: error.clone(),
            },
        })
        .collect();

    let w = WeightVector::uniform(args.o)?;
    let ok: Vec<usize> = (0..paths.len()).filter(|&i| normalized[i].is_ok()).collect();
    let mut pairs = Vec::new();
    for (x, &a) in ok.iter().enumerate() {
        for &b in &ok[x + 1..] {
            let (qa, qb) = (normalized[a].as_ref().unwrap(), normalized[b].as_ref().unwrap());
            pairs.push(PairMetrics {
                a,
                b,
                direction_difference: direction_difference(qa, qb, &w)?,
                branching_point: find_branching_point(qa, qb, args.epsilon)?,
            });
        }
    }

    let opportunity = if ok.iter().any(|&i| paths[i].origin() != paths[ok[0]].origin()) {
        OpportunityEntry::Failed {
            error: "paths start from different factual points".into(),
        }
    } else {
        let ends: Vec<Vec<f64>> = ok.iter().map(|&i| paths[i].endpoint()).collect();
        match ok.first().map(|&i| opportunity_matrix(paths[i].origin(), &ends)) {
            Some(Ok(matrix)) => OpportunityEntry::Ok {
                paths: ok.clone(),
                best: matrix.best().map(|b| ok[b]),
                matrix,
            },
            Some(Err(e)) => OpportunityEntry::Failed { error: e.to_string() },
            None => OpportunityEntry::Failed {
                error: "no usable path".into(),
            },
        }
    };

    let out = PathmetricsOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        o: args.o,
        epsilon: args.epsilon,
        paths: entries,
        pairs,
        opportunity,
    };
    emit(args.output.as_deref(), &to_json(&out)?)
}

pub fn evaluate_cmd(args: &EvaluateArgs) -> Result<(), CliError> {
    let data = load_dataset(&args.data)?;
    let graph = graph_config(&args.graph);
    graph.validate(data.len())?;
    let clf = load_model(&args.model, &data)?;
    let cfg = EvalConfig {
        graph,
        top_c: args.top_c.clone(),
        alt_count: args.alt.alt_count,
        alt_separation: args.alt.alt_separation,
    };
    let summary = evaluate(&data, clf.as_ref(), &cfg)?;
    if let Some(p) = &args.selections {
        emit(Some(p), &to_json(&summary.selections)?)?;
    }
    emit(args.output.as_deref(), summary.to_csv_string().as_bytes())
}

pub fn serve(args: &ServeArgs) -> Result<(), CliError> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let config = NavigatorConfig {
        idle_timeout: Duration::from_secs(args.idle_timeout_secs),
        persist_dir: args.persist_dir.clone(),
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    rt.block_on(navigator::serve(args.addr, config, |addr| {
        eprintln!("navigator listening on http://{addr} (graph schema v{GRAPH_SCHEMA_VERSION})");
    }))
    .map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
#[serde(untagged)]
enum BspEntry {
    Ok {
        index: usize,
        rows: Vec<usize>,
        path: VPath<f64>,
    },
    Failed {
        index: usize,
        error: String,
    },
}

pub fn bsp(args: &BspArgs, seed: u64) -> Result<(), CliError> {
    let data = load_dataset(&args.data)?;
    if args.factual >= data.len() {
        return Err(CliError::Invalid(format!("row {} is out of range", args.factual)));
    }
    let cfg = BspConfig::new(args.tau, seed)?;
    let text = std::fs::read_to_string(&args.counterfactuals).map_err(|e| io_error(&args.counterfactuals, e))?;
    let cfs: Vec<Vec<f64>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", args.counterfactuals.display())))?;
    let factual = data.row(args.factual);
    let entries: Vec<BspEntry> = cfs
        .iter()
        .enumerate()
        .map(|(index, cf)| {
            let built = bsp_indices(factual, cf, data.instances(), &cfg).and_then(|rows| {
                let mut points: Vec<Vec<f64>> = rows.iter().map(|&i| data.row(i).to_vec()).collect();
                points.push(cf.clone());
                VPath::through(factual.to_vec(), &points).map(|path| (rows, path))
            });
            match built {
                Ok((rows, path)) => BspEntry::Ok { index, rows, path },
                Err(e) => BspEntry::Failed {
                    index,
                    error: e.to_string(),
                },
            }
        })
        .collect();
    emit(args.output.as_deref(), &to_json(&entries)?)
}

pub fn moons(args: &MoonsArgs, seed: u64) -> Result<(), CliError> {
    let data = two_moons::<f64>(args.n, args.noise, seed)?;
    emit(args.output.as_deref(), data.to_csv_string("label").as_bytes())
}

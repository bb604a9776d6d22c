use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use multiverse::graph::{build_graph, Arc as GraphArc, GraphConfig, MultiverseGraph};
use multiverse::model::KnnClassifier;
use multiverse::moons::two_moons;
use navigator::{router, AppState, NavigatorConfig};

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["schema_version"], 1, "{uri}: {v}");
    (status, v)
}

fn moons_graph(n: usize) -> MultiverseGraph<f64> {
    let ds = two_moons::<f64>(n, 0.2, 42).unwrap();
    let clf = KnnClassifier::new(&ds, 10).unwrap();
    build_graph(
        &ds,
        &clf,
        &GraphConfig {
            k: 10,
            lambda: 1.0,
            threshold: 0.7,
            target_class: 1,
        },
    )
    .unwrap()
}

/// 0→1, 0→2, 1→3, 2→3, 3→4, 2→5, 5→2; candidates {4, 5}.
fn six_vertex_graph() -> MultiverseGraph<f64> {
    let arcs = [(0, 1, 1.0), (0, 2, 2.0), (1, 3, 1.0), (2, 3, 0.5), (3, 4, 1.0), (2, 5, 3.0), (5, 2, 3.0)];
    let arcs: Vec<GraphArc<f64>> = arcs.iter().map(|&(from, to, weight)| GraphArc { from, to, weight }).collect();
    let rows = (0..6).map(|i| vec![i as f64, 0.0]).collect();
    MultiverseGraph::from_arcs(rows, &arcs)
        .unwrap()
        .with_candidates(vec![4, 5])
        .unwrap()
}

fn app() -> (Arc<AppState>, Router) {
    let state = Arc::new(AppState::new(NavigatorConfig::default()));
    (state.clone(), router(state))
}

async fn upload(app: &Router, g: &MultiverseGraph<f64>) -> String {
    let (status, v) = call(app, "POST", "/graphs", Some(serde_json::to_value(g).unwrap())).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["graph_id"].as_str().unwrap().to_string()
}

/// Reachability by repeated relaxation, independent of the service's Dijkstra.
fn closure(g: &MultiverseGraph<f64>, from: usize) -> Vec<bool> {
    let mut seen = vec![false; g.len()];
    seen[from] = true;
    loop {
        let mut changed = false;
        for a in g.arcs() {
            if seen[a.from] && !seen[a.to] {
                seen[a.to] = true;
                changed = true;
            }
        }
        if !changed {
            return seen;
        }
    }
}

#[tokio::test]
async fn errors_carry_codes_and_statuses() {
    let (_, app) = app();
    let (s, v) = call(&app, "POST", "/graphs", Some(json!({"nope": 1}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "bad-request");
    let (s, _) = call(&app, "GET", "/graphs/missing/summary", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let gid = upload(&app, &six_vertex_graph()).await;
    let (s, v) = call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": 17}))).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "unknown-vertex");
    let (s, v) = call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": 4}))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["code"], "factual-is-candidate");
    let (s, _) = call(&app, "GET", "/sessions/missing", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn previews_match_exhaustive_reachability() {
    let (_, app) = app();
    let g = six_vertex_graph();
    let gid = upload(&app, &g).await;
    let (s, sess) = call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": 0}))).await;
    assert_eq!(s, StatusCode::CREATED, "{sess}");
    let sid = sess["id"].as_str().unwrap().to_string();
    assert_eq!(sess["history"].as_array().unwrap().len(), 1);
    assert_eq!(sess["complete"], false);

    let (_, again) = call(&app, "GET", &format!("/sessions/{sid}"), None).await;
    assert_eq!(again, sess);

    let mut walk = vec![0usize];
    for next in [2usize, 3] {
        let (_, p) = call(&app, "GET", &format!("/sessions/{sid}/previews"), None).await;
        let current = *walk.last().unwrap();
        let now: usize = g.candidates().iter().filter(|&&c| closure(&g, current)[c]).count();
        let previews = p["previews"].as_array().unwrap();
        assert_eq!(previews.len(), g.neighbors(current).len());
        for pv in previews {
            let v = pv["neighbor"].as_u64().unwrap() as usize;
            let reach = closure(&g, v);
            let mut want: Vec<usize> = g.candidates().iter().copied().filter(|&c| reach[c]).collect();
            let mut got: Vec<usize> = pv["reachable_candidates"]["candidates"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| c["vertex"].as_u64().unwrap() as usize)
                .collect();
            want.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, want, "neighbour {v}");
            assert_eq!(pv["delta_reachable"].as_i64().unwrap(), want.len() as i64 - now as i64);
            for l in pv["opportunity_to_each_target"].as_object().unwrap().values() {
                assert!((0.0..=1.0).contains(&l.as_f64().unwrap()));
            }
        }
        let (s, _) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(json!({"neighbor": next}))).await;
        assert_eq!(s, StatusCode::OK);
        walk.push(next);
    }
    // 3 → 4 is adjacent to a candidate at edge weight 1
    let (_, p) = call(&app, "GET", &format!("/sessions/{sid}/previews"), None).await;
    let first = &p["previews"][0];
    assert_eq!(first["neighbor"], 4);
    assert_eq!(first["reachable_candidates"]["candidates"][0], json!({"vertex": 4, "distance": 1.0}));
}

#[tokio::test]
async fn walking_the_reported_optimum_completes_the_session() {
    let (_, app) = app();
    let g = moons_graph(200);
    let gid = upload(&app, &g).await;
    let (_, summary) = call(&app, "GET", &format!("/graphs/{gid}/summary"), None).await;
    assert_eq!(summary["projection"], "raw");
    assert_eq!(summary["vertices"][3]["x"].as_f64().unwrap(), g.instance(3)[0]);

    // the first factual whose reported optimum is three arcs away
    let mut found = None;
    for f in (0..g.len()).filter(|&v| !g.is_candidate(v)) {
        let (s, sess) = call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": f, "alt_separation": 0.1}))).await;
        assert_eq!(s, StatusCode::CREATED);
        if sess["optimum"]["path"]["vertices"].as_array().map(Vec::len) == Some(4) {
            found = Some(sess);
            break;
        }
    }
    let sess = found.expect("some factual has a three-step optimum");
    let sid = sess["id"].as_str().unwrap();
    let path: Vec<u64> = serde_json::from_value(sess["optimum"]["path"]["vertices"].clone()).unwrap();
    let weights: Vec<f64> = serde_json::from_value(sess["optimum"]["path"]["edge_weights"].clone()).unwrap();
    let mut last = Value::Null;
    for (i, &v) in path[1..].iter().enumerate() {
        let (s, doc) = call(
            &app,
            "POST",
            &format!("/sessions/{sid}/step"),
            Some(json!({"neighbor": v, "expected_version": i})),
        )
        .await;
        assert_eq!(s, StatusCode::OK, "{doc}");
        last = doc;
    }
    assert_eq!(last["complete"], true);
    assert_eq!(last["history"].as_array().unwrap().len(), 4);
    let total: f64 = weights.iter().sum();
    assert!((last["total_weight"].as_f64().unwrap() - total).abs() < 1e-12);
    assert_eq!(last["realized_path"]["vertices"], json!(path));
    assert_eq!(last["realized_opportunity"], 1.0);
    let (s, v) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(json!({"neighbor": path[0]}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"]["code"], "session-complete");
}

#[tokio::test]
async fn steps_are_serialized_per_session() {
    let (state, app) = app();
    let gid = upload(&app, &six_vertex_graph()).await;
    let (_, sess) = call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": 0}))).await;
    let sid = sess["id"].as_str().unwrap().to_string();

    let slot = state.session(&sid).unwrap();
    let held = slot.session.lock().await;
    let (s, v) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(json!({"neighbor": 1}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"]["code"], "conflict");
    drop(held);

    let (s, _) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(json!({"neighbor": 1, "expected_version": 0}))).await;
    assert_eq!(s, StatusCode::OK);
    let (s, _) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(json!({"neighbor": 3, "expected_version": 0}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, v) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(json!({"neighbor": 0}))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["code"], "not-adjacent");
}

#[tokio::test]
async fn idle_sessions_expire() {
    let state = Arc::new(AppState::new(NavigatorConfig {
        idle_timeout: Duration::from_millis(50),
        persist_dir: None,
    }));
    let app = router(state.clone());
    let gid = upload(&app, &six_vertex_graph()).await;
    for _ in 0..2 {
        call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": 0}))).await;
    }
    let (_, sess) = call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": 1}))).await;
    tokio::time::sleep(Duration::from_millis(120)).await;
    let (s, _) = call(&app, "GET", &format!("/sessions/{}", sess["id"].as_str().unwrap()), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(state.sweep_expired(), 2);
    assert_eq!(state.session_count(), 0);
}

#[tokio::test]
async fn persisted_sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = NavigatorConfig {
        idle_timeout: Duration::from_secs(3600),
        persist_dir: Some(dir.path().to_path_buf()),
    };
    let app = router(Arc::new(AppState::open(config.clone()).unwrap()));
    let gid = upload(&app, &six_vertex_graph()).await;
    let (_, sess) = call(&app, "POST", "/sessions", Some(json!({"graph_id": gid, "factual": 0}))).await;
    let sid = sess["id"].as_str().unwrap().to_string();
    let (_, stepped) = call(&app, "POST", &format!("/sessions/{sid}/step"), Some(json!({"neighbor": 2}))).await;

    let restarted = router(Arc::new(AppState::open(config).unwrap()));
    let (s, doc) = call(&restarted, "GET", &format!("/sessions/{sid}"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(doc, stepped);
    let (s, _) = call(&restarted, "GET", &format!("/graphs/{gid}/summary"), None).await;
    assert_eq!(s, StatusCode::OK);

    let ephemeral = router(Arc::new(AppState::new(NavigatorConfig::default())));
    let (s, _) = call(&ephemeral, "GET", &format!("/sessions/{sid}"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn higher_dimensional_graphs_get_a_pca_layout() {
    let (_, app) = app();
    let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.2, 0.5, 1.0 - i as f64 * 0.2]).collect();
    let g = MultiverseGraph::from_arcs(rows, &[]).unwrap();
    let gid = upload(&app, &g).await;
    let (_, summary) = call(&app, "GET", &format!("/graphs/{gid}/summary"), None).await;
    assert_eq!(summary["projection"], "pca");
    // collinear rows: all spread lands on the first axis
    for v in summary["vertices"].as_array().unwrap() {
        assert!(v["y"].as_f64().unwrap().abs() < 1e-9);
    }
}

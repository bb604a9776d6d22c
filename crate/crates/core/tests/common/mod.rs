//! Independent oracles and fixtures shared by the integration tests.
//! Nothing here calls into the library's own metric code.

#![allow(dead_code)]

use multiverse::graph::{Arc, MultiverseGraph};

pub const DENSE_SAMPLES: usize = 100_000;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// argmin over `t ∈ [0,1]` (sampled at `samples` points) of
/// `‖factual + t·(ref − factual) − cmp‖`.
pub fn dense_opportunity(factual: &[f64], reference: &[f64], cmp: &[f64], samples: usize) -> f64 {
    let mut best_t = 0.0;
    let mut best = f64::INFINITY;
    let mut point = vec![0.0; factual.len()];
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        for (i, p) in point.iter_mut().enumerate() {
            *p = factual[i] + t * (reference[i] - factual[i]);
        }
        let d = dist(&point, cmp);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    best_t
}

/// Absolute position at arc length `s` along the polyline through `vertices`.
pub fn point_at_arc_length(vertices: &[Vec<f64>], s: f64) -> Vec<f64> {
    let mut remaining = s;
    for w in vertices.windows(2) {
        let len = dist(&w[0], &w[1]);
        if len == 0.0 {
            continue;
        }
        if remaining <= len {
            let f = remaining / len;
            return w[0].iter().zip(&w[1]).map(|(a, b)| a + f * (b - a)).collect();
        }
        remaining -= len;
    }
    vertices.last().unwrap().clone()
}

pub fn polyline_length(vertices: &[Vec<f64>]) -> f64 {
    vertices.windows(2).map(|w| dist(&w[0], &w[1])).sum()
}

/// Every simple path from `from` to `to`, as (length summed left to right, vertices).
pub fn simple_paths(n: usize, arcs: &[(usize, usize, f64)], from: usize, to: usize) -> Vec<(f64, Vec<usize>)> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, w) in arcs {
        adj[a].push((b, w));
    }
    let mut out = Vec::new();
    let mut stack = vec![from];
    let mut on = vec![false; n];
    on[from] = true;
    fn dfs(
        adj: &[Vec<(usize, f64)>],
        to: usize,
        len: f64,
        stack: &mut Vec<usize>,
        on: &mut [bool],
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        let u = *stack.last().unwrap();
        if u == to {
            out.push((len, stack.clone()));
            return;
        }
        for &(v, w) in &adj[u] {
            if !on[v] {
                on[v] = true;
                stack.push(v);
                dfs(adj, to, len + w, stack, on, out);
                stack.pop();
                on[v] = false;
            }
        }
    }
    dfs(&adj, to, 0.0, &mut stack, &mut on, &mut out);
    out
}

/// Shortest simple path by enumeration; ties go to the lexicographically smallest sequence.
pub fn brute_shortest(n: usize, arcs: &[(usize, usize, f64)], from: usize, to: usize) -> Option<(f64, Vec<usize>)> {
    simple_paths(n, arcs, from, to)
        .into_iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)))
}

/// All-pairs shortest distances by Floyd–Warshall.
pub fn all_pairs(n: usize, arcs: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in arcs {
        d[a][b] = d[a][b].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Directed reachability by transitive closure.
pub fn reachability(n: usize, arcs: &[(usize, usize, f64)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b, _) in arcs {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Shared-prefix opportunity of the enumerated shortest path `factual → reference`
/// towards `cmp`, using Floyd–Warshall distances.
pub fn brute_graph_opportunity(n: usize, arcs: &[(usize, usize, f64)], factual: usize, reference: usize, cmp: usize) -> f64 {
    let (total, path) = brute_shortest(n, arcs, factual, reference).expect("reference reachable");
    let d = all_pairs(n, arcs);
    let weight = |a: usize, b: usize| arcs.iter().find(|&&(x, y, _)| x == a && y == b).unwrap().2;
    let mut acc = 0.0;
    for w in path.windows(2) {
        if d[w[1]][cmp] >= d[w[0]][cmp] {
            break;
        }
        acc += weight(w[0], w[1]);
    }
    if total > 0.0 {
        acc / total
    } else {
        1.0
    }
}

pub fn graph_from(n: usize, arcs: &[(usize, usize, f64)]) -> MultiverseGraph<f64> {
    let arcs: Vec<Arc<f64>> = arcs.iter().map(|&(from, to, weight)| Arc { from, to, weight }).collect();
    MultiverseGraph::from_arcs(vec![vec![0.0]; n], &arcs).unwrap()
}

/// Loan-style fixture with factual 0 and counterfactuals 1, 2, 3. Reference
/// paths: 0→1; 0→4→7→2; 0→4→5→6→3. The 3-path shares 0→4→5 (weight 7 of 8)
/// with the approach to 2, and the 2-path shares 0→4 (4 of 7) with the approach to 3.
pub const LOAN_ARCS: [(usize, usize, f64); 8] = [
    (0, 1, 1.0),
    (0, 4, 4.0),
    (4, 5, 3.0),
    (5, 6, 0.5),
    (6, 3, 0.5),
    (4, 7, 1.5),
    (7, 2, 1.5),
    (5, 2, 2.0),
];
pub const LOAN_N: usize = 8;
pub const LOAN_CFS: [usize; 3] = [1, 2, 3];

/// Three direct vectors fanning out from the origin; the middle one has the best mean opportunity.
pub fn fan_points() -> (Vec<f64>, Vec<Vec<f64>>) {
    (vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.9, 0.6245], vec![0.35, 1.2757]])
}

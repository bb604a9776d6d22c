mod common;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use multiverse::vector::{
    direction_difference, find_branching_point, normalize_path, opportunity_matrix, path_length,
    point_to_path_distance, vector_opportunity_potential, Path, WeightVector,
};

use common::{dense_opportunity, fan_points, point_at_arc_length, polyline_length};

fn coord() -> impl Strategy<Value = f64> {
    -5.0..5.0f64
}

fn vec_of(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(coord(), dim)
}

/// (origin, steps) with 1..6 steps in 2..5 dimensions and a non-trivial length.
fn polyline() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    (2usize..5)
        .prop_flat_map(|m| (vec_of(m), prop::collection::vec(vec_of(m), 1..6)))
        .prop_filter("needs length", |(_, steps)| {
            steps.iter().map(|s| s.iter().map(|v| v * v).sum::<f64>().sqrt()).sum::<f64>() > 1e-3
        })
}

fn vertices_of(origin: &[f64], steps: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut at = origin.to_vec();
    let mut out = vec![at.clone()];
    for s in steps {
        at = at.iter().zip(s).map(|(a, b)| a + b).collect();
        out.push(at.clone());
    }
    out
}

#[test]
fn corner_normalization_matches_interpolation_oracle() {
    let p = Path::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let q = normalize_path(&p, 4).unwrap();
    let verts = vertices_of(p.origin(), p.steps());
    for j in 0..4 {
        let expected = point_at_arc_length(&verts, (j + 1) as f64 / 4.0 * 2.0);
        for (a, b) in q.absolute(j).iter().zip(&expected) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }
    assert_eq!(q.points(), &[vec![0.5, 0.0], vec![1.0, 0.0], vec![1.0, 0.5], vec![1.0, 1.0]]);
}

#[test]
fn parallel_offset_paths_branch_per_epsilon() {
    let a = normalize_path(&Path::new(vec![0.0, 0.0], vec![vec![1.0, 0.0]]).unwrap(), 10).unwrap();
    let b = normalize_path(&Path::new(vec![0.0, 0.3], vec![vec![1.0, 0.0]]).unwrap(), 10).unwrap();
    assert_eq!(find_branching_point(&a, &b, 0.1).unwrap(), Some(1));
    assert_eq!(find_branching_point(&a, &b, 0.5).unwrap(), None);
    assert!(find_branching_point(&a, &b, 0.0).is_err());
}

#[test]
fn constant_offset_direction_difference() {
    let o = 7;
    let a = normalize_path(&Path::new(vec![0.0, 0.0], vec![vec![2.0, 0.0]]).unwrap(), o).unwrap();
    let delta = 0.25;
    let shifted: Vec<Vec<f64>> = a.points().iter().map(|p| vec![p[0], p[1] + delta]).collect();
    let doc = serde_json::json!({"origin": [0.0, 0.0], "o": o, "points": shifted});
    let b: multiverse::NormalizedPath = serde_json::from_value(doc).unwrap();
    let w = WeightVector::uniform(o).unwrap();
    assert_abs_diff_eq!(direction_difference(&a, &b, &w).unwrap(), (o as f64).sqrt() * delta, epsilon = 1e-12);
}

#[test]
fn point_to_path_matches_exhaustive_scan() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let steps: Vec<Vec<f64>> = (0..5).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let p = Path::new(vec![0.0, 0.0], steps).unwrap();
        let q = normalize_path(&p, 5).unwrap();
        let query = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let exhaustive = (0..5)
            .map(|j| {
                let x = q.absolute(j);
                ((x[0] - query[0]).powi(2) + (x[1] - query[1]).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(point_to_path_distance(&query, &q).unwrap(), exhaustive);
    }
}

#[test]
fn hand_opportunity_and_dense_oracle_agree() {
    let f = [0.0, 0.0];
    assert_abs_diff_eq!(vector_opportunity_potential(&f, &[2.0, 0.0], &[1.0, 1.0]).unwrap(), 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(dense_opportunity(&f, &[2.0, 0.0], &[1.0, 1.0], 100_001), 0.5, epsilon = 1e-4);
}

#[test]
fn three_point_matrix_matches_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let f = vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
    let cfs: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
    let m = opportunity_matrix(&f, &cfs).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            let oracle = dense_opportunity(&f, &cfs[a], &cfs[b], 20_001);
            assert_abs_diff_eq!(m.values[a][b], oracle, epsilon = 1e-4);
        }
        assert_abs_diff_eq!(m.means[a], m.values[a].iter().sum::<f64>() / 3.0, epsilon = 1e-15);
    }
}

#[test]
fn fan_of_three_vectors_keeps_its_order() {
    let (f, cfs) = fan_points();
    let m = opportunity_matrix(&f, &cfs).unwrap();
    assert!(m.values[0][1] > m.values[0][2]);
    assert_abs_diff_eq!(m.values[0][1], 0.9, epsilon = 1e-12);
    assert_abs_diff_eq!(m.values[0][2], 0.35, epsilon = 1e-12);
    assert_eq!(m.best(), Some(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalization_is_equally_spaced_and_hits_the_endpoint((origin, steps) in polyline(), o in 1usize..30) {
        let p = Path::new(origin.clone(), steps.clone()).unwrap();
        let q = normalize_path(&p, o).unwrap();
        let verts = vertices_of(&origin, &steps);
        let total = polyline_length(&verts);
        prop_assert!((path_length(&p) - total).abs() < 1e-9);
        for j in 0..o {
            let expected = point_at_arc_length(&verts, (j + 1) as f64 / o as f64 * total);
            let off: f64 = q.absolute(j).iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(off < 1e-9, "point {} off by {}", j, off);
        }
        prop_assert_eq!(q.absolute(o - 1), p.endpoint());
    }

    #[test]
    fn branching_point_is_monotone_in_epsilon((origin, steps_a) in polyline(), jitter in prop::collection::vec(-1.0..1.0f64, 12)) {
        let m = origin.len();
        let steps_b: Vec<Vec<f64>> = steps_a
            .iter()
            .enumerate()
            .map(|(i, s)| s.iter().enumerate().map(|(c, v)| v + jitter[(i * m + c) % jitter.len()]).collect())
            .collect();
        let pb = Path::new(origin.clone(), steps_b).unwrap();
        prop_assume!(path_length(&pb) > 1e-3);
        let a = normalize_path(&Path::new(origin, steps_a).unwrap(), 10).unwrap();
        let b = normalize_path(&pb, 10).unwrap();
        let mut last = 0usize;
        for e in 1..=20 {
            let o_star = find_branching_point(&a, &b, e as f64 * 0.05).unwrap().unwrap_or(usize::MAX);
            prop_assert!(o_star >= last);
            last = o_star;
        }
    }

    #[test]
    fn direction_difference_is_a_symmetric_nonnegative_gap(
        (origin, steps_a) in polyline(),
        (_, steps_b) in polyline(),
        o in 1usize..12,
    ) {
        prop_assume!(steps_a[0].len() == steps_b[0].len());
        let a = normalize_path(&Path::new(origin.clone(), steps_a).unwrap(), o).unwrap();
        let b = normalize_path(&Path::new(origin, steps_b).unwrap(), o).unwrap();
        let w = WeightVector::uniform(o).unwrap();
        let ab = direction_difference(&a, &b, &w).unwrap();
        prop_assert_eq!(ab, direction_difference(&b, &a, &w).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(direction_difference(&a, &a, &w).unwrap(), 0.0);
        let coincide = a.points() == b.points();
        prop_assert_eq!(ab == 0.0, coincide);
    }

    #[test]
    fn opportunity_is_scale_invariant_and_bounded(
        (f, r, c) in (2usize..10).prop_flat_map(|m| (vec_of(m), vec_of(m), vec_of(m))),
        scale in 0.01..100.0f64,
    ) {
        prop_assume!(f.iter().zip(&r).map(|(a, b)| (a - b).powi(2)).sum::<f64>() > 1e-6);
        let l = vector_opportunity_potential(&f, &r, &c).unwrap();
        prop_assert!((0.0..=1.0).contains(&l));
        let rs: Vec<f64> = f.iter().zip(&r).map(|(a, b)| a + scale * (b - a)).collect();
        let cs: Vec<f64> = f.iter().zip(&c).map(|(a, b)| a + scale * (b - a)).collect();
        let ls = vector_opportunity_potential(&f, &rs, &cs).unwrap();
        prop_assert!((l - ls).abs() < 1e-9);
        prop_assert_eq!(vector_opportunity_potential(&f, &r, &r).unwrap(), 1.0);
    }

    #[test]
    fn opportunity_matches_dense_sampling(
        (f, r, c) in (2usize..10).prop_flat_map(|m| (vec_of(m), vec_of(m), vec_of(m))),
    ) {
        prop_assume!(f.iter().zip(&r).map(|(a, b)| (a - b).powi(2)).sum::<f64>() > 1e-4);
        let l = vector_opportunity_potential(&f, &r, &c).unwrap();
        prop_assert!((l - dense_opportunity(&f, &r, &c, 20_001)).abs() < 1e-4);
    }
}

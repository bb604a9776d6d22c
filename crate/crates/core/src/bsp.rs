//! Post-hoc paths through existing data points, found by recursively
//! splitting the factual–counterfactual segment at its midpoint.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{l2_distance, Scalar};
use crate::vector::Path;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BspConfig<T> {
    /// Recursion stops once the membership radius drops below `tau`.
    pub tau: T,
    pub seed: u64,
}

impl<T: Scalar> BspConfig<T> {
    pub fn new(tau: T, seed: u64) -> Result<Self> {
        let cfg = Self { tau, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau > T::zero() && self.tau.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)))
        }
    }
}

struct Search<'a, T> {
    rows: &'a [Vec<T>],
    tau: T,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Search<'_, T> {
    fn members(&self, indices: &[usize], a: &[T], b: &[T], d: T) -> Vec<usize> {
        indices
            .iter()
            .copied()
            .filter(|&i| l2_distance(&self.rows[i], a) <= d && l2_distance(&self.rows[i], b) <= d)
            .collect()
    }

    fn pick(&mut self, indices: &[usize]) -> Vec<usize> {
        indices.choose(&mut self.rng).copied().into_iter().collect()
    }

    fn recurse(&mut self, indices: &[usize], a: &[T], b: &[T], d: T, top: bool) -> Vec<usize> {
        if d < self.tau {
            return self.pick(indices);
        }
        let mid: Vec<T> = a.iter().zip(b).map(|(&x, &y)| (x + y) / T::lit(2.0)).collect();
        let d = d / T::lit(2.0);
        let left = self.members(indices, a, &mid, d);
        let right = self.members(indices, &mid, b, d);
        if left.is_empty() && right.is_empty() {
            // at the top the whole dataset would be the "partition"
            return if top { Vec::new() } else { self.pick(indices) };
        }
        let mut out = Vec::new();
        if !left.is_empty() {
            out.extend(self.recurse(&left, a, &mid, d, false));
        }
        if !right.is_empty() {
            out.extend(self.recurse(&right, &mid, b, d, false));
        }
        out
    }
}

/// Row indices of the intermediate points, ordered from the factual side
/// towards the counterfactual (strictly decreasing distance to it).
pub fn bsp_indices<T: Scalar>(
    factual: &[T],
    counterfactual: &[T],
    rows: &[Vec<T>],
    cfg: &BspConfig<T>,
) -> Result<Vec<usize>> {
    cfg.validate()?;
    if factual.len() != counterfactual.len() {
        return Err(Error::DimensionMismatch {
            expected: factual.len(),
            actual: counterfactual.len(),
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != factual.len()) {
        return Err(Error::DimensionMismatch {
            expected: factual.len(),
            actual: bad.len(),
        });
    }
    let init_d = l2_distance(factual, counterfactual);
    if init_d == T::zero() {
        return Err(Error::ZeroLengthPath);
    }
    if init_d < cfg.tau {
        return Ok(Vec::new());
    }
    let mut search = Search {
        rows,
        tau: cfg.tau,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    let all: Vec<usize> = (0..rows.len()).collect();
    let selected = search.recurse(&all, factual, counterfactual, init_d, true);

    let mut by_distance: Vec<(T, usize)> = selected
        .into_iter()
        .map(|i| (l2_distance(&rows[i], counterfactual), i))
        .filter(|&(d, _)| d > T::zero() && d < init_d)
        .collect();
    by_distance.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite distances").then(a.1.cmp(&b.1)));
    by_distance.dedup_by(|later, earlier| later.0 == earlier.0);
    Ok(by_distance.into_iter().map(|(_, i)| i).collect())
}

/// Path `factual → selected rows → counterfactual`; a single direct step when nothing is selected.
pub fn construct_path_bsp<T: Scalar>(
    factual: &[T],
    counterfactual: &[T],
    rows: &[Vec<T>],
    cfg: &BspConfig<T>,
) -> Result<Path<T>> {
    let indices = bsp_indices(factual, counterfactual, rows, cfg)?;
    let mut points: Vec<Vec<T>> = indices.iter().map(|&i| rows[i].clone()).collect();
    points.push(counterfactual.to_vec());
    Path::through(factual.to_vec(), &points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(tau: f64) -> BspConfig<f64> {
        BspConfig::new(tau, 7).unwrap()
    }

    #[test]
    fn empty_selection_is_direct_step() {
        let rows = vec![vec![5.0, 5.0], vec![-3.0, 2.0]];
        let p = construct_path_bsp(&[0.0, 0.0], &[2.0, 0.0], &rows, &cfg(0.5)).unwrap();
        assert_eq!(p.steps(), &[vec![2.0, 0.0]]);
    }

    #[test]
    fn midpoint_row_is_used() {
        let rows = vec![vec![1.0, 0.0], vec![9.0, 9.0]];
        let idx = bsp_indices(&[0.0, 0.0], &[2.0, 0.0], &rows, &cfg(1.5)).unwrap();
        assert_eq!(idx, vec![0]);
        let p = construct_path_bsp(&[0.0, 0.0], &[2.0, 0.0], &rows, &cfg(1.5)).unwrap();
        assert_eq!(p.vertices(), vec![vec![1.0, 0.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn tau_above_initial_distance_selects_nothing() {
        let rows = vec![vec![1.0, 0.0]];
        assert!(bsp_indices(&[0.0, 0.0], &[2.0, 0.0], &rows, &cfg(3.0)).unwrap().is_empty());
    }

    #[test]
    fn endpoints_in_data_are_not_repeated() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        let idx = bsp_indices(&[0.0, 0.0], &[2.0, 0.0], &rows, &cfg(0.2)).unwrap();
        assert_eq!(idx, vec![1]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(BspConfig::new(0.0, 1).is_err());
        assert!(bsp_indices(&[1.0], &[1.0], &[vec![0.0]], &cfg(0.1)).is_err());
        assert!(bsp_indices(&[1.0], &[2.0], &[vec![0.0, 1.0]], &cfg(0.1)).is_err());
    }
}

//! 2-D display coordinates for graph vertices.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionKind {
    /// The two encoded features themselves.
    Raw,
    /// Scores on the first two principal directions of the centred rows.
    Pca,
}

/// Raw coordinates when rows have two columns, otherwise principal-component
/// scores. Each principal direction is signed so that its largest-magnitude
/// entry is positive, which keeps the layout stable across runs.
pub fn project_2d(rows: &[Vec<f64>]) -> (ProjectionKind, Vec<[f64; 2]>) {
    let m = rows.first().map_or(0, Vec::len);
    if m == 2 {
        return (ProjectionKind::Raw, rows.iter().map(|r| [r[0], r[1]]).collect());
    }
    let n = rows.len();
    if n == 0 || m == 0 {
        return (ProjectionKind::Pca, vec![[0.0, 0.0]; n]);
    }
    let x = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
    let mean = x.row_mean();
    let centred = DMatrix::from_fn(n, m, |i, j| x[(i, j)] - mean[j]);
    let cov = centred.transpose() * &centred / n as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let direction = |k: usize| -> Option<Vec<f64>> {
        let col = eig.eigenvectors.column(*order.get(k)?);
        let pivot = col.iter().copied().fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        Some(col.iter().map(|v| sign * v).collect())
    };
    let first = direction(0).expect("m >= 1");
    let second = direction(1);
    let coords = (0..n)
        .map(|i| {
            let row = centred.row(i);
            let score = |d: &[f64]| row.iter().zip(d).map(|(a, b)| a * b).sum::<f64>();
            [score(&first), second.as_deref().map_or(0.0, score)]
        })
        .collect();
    (ProjectionKind::Pca, coords)
}

//! Counterfactual journeys as sequences of step vectors.
//!
//! A [`Path`] starts at a factual point and applies `n` step vectors. Paths of
//! different lengths are compared after [`normalize_path`] resamples them into
//! `o` points at equal arc-length spacing. On top of that sit the branching
//! point search, the weighted direction difference and the closed-form
//! opportunity potential of direct counterfactual vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{add, dot, l2_distance, norm, sub, Scalar};

/// Factual origin plus `n ≥ 1` step vectors of equal dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathDoc<T>", bound = "T: Scalar")]
pub struct Path<T> {
    origin: Vec<T>,
    steps: Vec<Vec<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct PathDoc<T> {
    origin: Vec<T>,
    steps: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<PathDoc<T>> for Path<T> {
    type Error = Error;

    fn try_from(doc: PathDoc<T>) -> Result<Self> {
        Path::new(doc.origin, doc.steps)
    }
}

impl<T: Scalar> Path<T> {
    pub fn new(origin: Vec<T>, steps: Vec<Vec<T>>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidParameter("a path needs at least one step".into()));
        }
        if let Some(bad) = steps.iter().find(|s| s.len() != origin.len()) {
            return Err(Error::DimensionMismatch {
                expected: origin.len(),
                actual: bad.len(),
            });
        }
        Ok(Self { origin, steps })
    }

    /// Path visiting `points` in order, starting from `origin`.
    pub fn through(origin: Vec<T>, points: &[Vec<T>]) -> Result<Self> {
        let mut prev = origin.as_slice();
        let mut steps = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != origin.len() {
                return Err(Error::DimensionMismatch {
                    expected: origin.len(),
                    actual: p.len(),
                });
            }
            steps.push(sub(p, prev));
            prev = p;
        }
        Self::new(origin, steps)
    }

    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    pub fn steps(&self) -> &[Vec<T>] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    /// Sum of all steps.
    pub fn displacement(&self) -> Vec<T> {
        let mut total = vec![T::zero(); self.dim()];
        for s in &self.steps {
            for (t, &v) in total.iter_mut().zip(s) {
                *t = *t + v;
            }
        }
        total
    }

    pub fn endpoint(&self) -> Vec<T> {
        add(&self.origin, &self.displacement())
    }

    /// Absolute positions visited after each step.
    pub fn vertices(&self) -> Vec<Vec<T>> {
        let mut at = self.origin.clone();
        self.steps
            .iter()
            .map(|s| {
                at = add(&at, s);
                at.clone()
            })
            .collect()
    }
}

/// Total Euclidean length of all steps.
pub fn path_length<T: Scalar>(p: &Path<T>) -> T {
    p.steps.iter().map(|s| norm(s)).sum()
}

/// `o` cumulative displacements from the origin at equal arc-length spacing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormalizedDoc<T>", into = "NormalizedDoc<T>", bound = "T: Scalar")]
pub struct NormalizedPath<T> {
    origin: Vec<T>,
    points: Vec<Vec<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct NormalizedDoc<T> {
    origin: Vec<T>,
    o: usize,
    points: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<NormalizedDoc<T>> for NormalizedPath<T> {
    type Error = Error;

    fn try_from(doc: NormalizedDoc<T>) -> Result<Self> {
        if doc.o != doc.points.len() || doc.o == 0 {
            return Err(Error::InvalidParameter(format!(
                "o = {} but {} points",
                doc.o,
                doc.points.len()
            )));
        }
        if let Some(bad) = doc.points.iter().find(|p| p.len() != doc.origin.len()) {
            return Err(Error::DimensionMismatch {
                expected: doc.origin.len(),
                actual: bad.len(),
            });
        }
        Ok(Self {
            origin: doc.origin,
            points: doc.points,
        })
    }
}

impl<T: Scalar> From<NormalizedPath<T>> for NormalizedDoc<T> {
    fn from(p: NormalizedPath<T>) -> Self {
        Self {
            o: p.points.len(),
            origin: p.origin,
            points: p.points,
        }
    }
}

impl<T: Scalar> NormalizedPath<T> {
    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    /// Displacements `z̄_1 … z̄_o` relative to the origin.
    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn o(&self) -> usize {
        self.points.len()
    }

    pub fn absolute(&self, j: usize) -> Vec<T> {
        add(&self.origin, &self.points[j])
    }
}

/// Resamples `p` into `o` points; point `j` lies at arc length `(j/o)·c_L(p)`.
pub fn normalize_path<T: Scalar>(p: &Path<T>, o: usize) -> Result<NormalizedPath<T>> {
    if o == 0 {
        return Err(Error::InvalidParameter("o must be at least 1".into()));
    }
    let lengths: Vec<T> = p.steps.iter().map(|s| norm(s)).collect();
    let total: T = lengths.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::ZeroLengthPath);
    }
    let m = p.dim();
    let of = T::lit(o as f64);
    let mut points = Vec::with_capacity(o);
    for j in 1..o {
        let mut beta = T::lit(j as f64) / of * total;
        let mut acc = vec![T::zero(); m];
        for (z, &len) in p.steps.iter().zip(&lengths) {
            if beta <= T::zero() {
                break;
            }
            if len > T::zero() {
                let frac = if beta <= len { beta / len } else { T::one() };
                for (a, &v) in acc.iter_mut().zip(z) {
                    *a = *a + frac * v;
                }
            }
            beta = beta - len;
        }
        points.push(acc);
    }
    // The last point is the full displacement, so the endpoint is recovered exactly.
    points.push(p.displacement());
    Ok(NormalizedPath {
        origin: p.origin.clone(),
        points,
    })
}

/// Distance from an absolute point to the nearest of `q`'s points.
pub fn point_to_path_distance<T: Scalar>(point: &[T], q: &NormalizedPath<T>) -> Result<T> {
    if point.len() != q.origin.len() {
        return Err(Error::DimensionMismatch {
            expected: q.origin.len(),
            actual: point.len(),
        });
    }
    Ok((0..q.o())
        .map(|j| l2_distance(point, &q.absolute(j)))
        .fold(T::infinity(), T::min))
}

/// First 1-based index `i` at which point `i` of `a` is farther than `epsilon`
/// from every point of `b`; `None` when the paths never separate.
pub fn find_branching_point<T: Scalar>(
    a: &NormalizedPath<T>,
    b: &NormalizedPath<T>,
    epsilon: T,
) -> Result<Option<usize>> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    check_same_shape(a, b)?;
    for i in 0..a.o() {
        if point_to_path_distance(&a.absolute(i), b)? > epsilon {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}

fn check_same_shape<T: Scalar>(a: &NormalizedPath<T>, b: &NormalizedPath<T>) -> Result<()> {
    if a.o() != b.o() {
        return Err(Error::DimensionMismatch {
            expected: a.o(),
            actual: b.o(),
        });
    }
    if a.origin.len() != b.origin.len() {
        return Err(Error::DimensionMismatch {
            expected: a.origin.len(),
            actual: b.origin.len(),
        });
    }
    Ok(())
}

/// Unit-norm, non-increasing weights over the `o` comparison points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>", bound = "T: Scalar")]
pub struct WeightVector<T> {
    weights: Vec<T>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("weight vector is empty".into()));
        }
        let tol = T::lit(1e-9).max(T::epsilon() * T::lit(16.0 * weights.len() as f64));
        let n = norm(&weights);
        if (n - T::one()).abs() > tol {
            return Err(Error::InvalidParameter(format!("weights must have unit norm, got {n}")));
        }
        if weights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter("weights must be non-increasing".into()));
        }
        Ok(Self { weights })
    }

    /// `w_j = 1/√o`.
    pub fn uniform(o: usize) -> Result<Self> {
        if o == 0 {
            return Err(Error::InvalidParameter("o must be at least 1".into()));
        }
        let w = T::one() / T::lit(o as f64).sqrt();
        Self::new(vec![w; o])
    }

    /// Rescales arbitrary non-increasing, non-negative weights to unit norm.
    pub fn normalized(weights: Vec<T>) -> Result<Self> {
        let n = norm(&weights);
        if !(n > T::zero()) {
            return Err(Error::InvalidParameter("weights are all zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / n).collect())
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for WeightVector<T> {
    type Error = Error;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Scalar> From<WeightVector<T>> for Vec<T> {
    fn from(w: WeightVector<T>) -> Self {
        w.weights
    }
}

/// `Σ_j w_j ‖z̄_j^a − z̄_j^b‖`, comparing displacement columns directly.
pub fn direction_difference<T: Scalar>(
    a: &NormalizedPath<T>,
    b: &NormalizedPath<T>,
    w: &WeightVector<T>,
) -> Result<T> {
    check_same_shape(a, b)?;
    if w.len() != a.o() {
        return Err(Error::DimensionMismatch {
            expected: a.o(),
            actual: w.len(),
        });
    }
    Ok(a.points
        .iter()
        .zip(&b.points)
        .zip(&w.weights)
        .map(|((pa, pb), &wj)| wj * l2_distance(pa, pb))
        .sum())
}

/// Fraction of the direct vector `factual → ref_cf` that can be travelled
/// while still getting closer to `cmp_cf`, i.e. the clamped projection
/// parameter of `cmp_cf` onto that segment.
pub fn vector_opportunity_potential<T: Scalar>(factual: &[T], ref_cf: &[T], cmp_cf: &[T]) -> Result<T> {
    for v in [ref_cf, cmp_cf] {
        if v.len() != factual.len() {
            return Err(Error::DimensionMismatch {
                expected: factual.len(),
                actual: v.len(),
            });
        }
    }
    let za = sub(ref_cf, factual);
    let zb = sub(cmp_cf, factual);
    let denom = dot(&za, &za);
    if !(denom > T::zero()) {
        return Err(Error::ZeroLengthPath);
    }
    let l = dot(&za, &zb) / denom;
    Ok(l.max(T::zero()).min(T::one()))
}

/// Pairwise opportunity potentials between direct counterfactual vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OpportunityMatrix<T> {
    /// `values[a][b]`: opportunity of reference `a` towards comparison `b`.
    pub values: Vec<Vec<T>>,
    /// Mean over comparisons (self included) per reference.
    pub means: Vec<T>,
}

impl<T: Scalar> OpportunityMatrix<T> {
    /// Index of the reference with the largest mean; ties go to the lower index.
    pub fn best(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &m) in self.means.iter().enumerate() {
            if best.map_or(true, |b| m > self.means[b]) {
                best = Some(i);
            }
        }
        best
    }
}

pub fn opportunity_matrix<T: Scalar>(factual: &[T], cfs: &[Vec<T>]) -> Result<OpportunityMatrix<T>> {
    if cfs.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 counterfactuals, got {}",
            cfs.len()
        )));
    }
    let values = cfs
        .iter()
        .map(|a| {
            cfs.iter()
                .map(|b| vector_opportunity_potential(factual, a, b))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n = T::lit(cfs.len() as f64);
    let means = values.iter().map(|row| row.iter().copied().sum::<T>() / n).collect();
    Ok(OpportunityMatrix { values, means })
}

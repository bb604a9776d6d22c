//! Predictive model boundary: a built-in k-NN classifier and a lookup table
//! backed by externally produced class probabilities.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path as FsPath;

use crate::dataio::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::scalar::{l2_distance, Scalar};

const LOADED_SUM_TOLERANCE: f64 = 1e-6;

pub trait Classifier<T: Scalar>: Send + Sync {
    /// Known classes, ascending.
    fn classes(&self) -> &[ClassId];

    /// Probability per class, aligned with [`Classifier::classes`].
    fn distribution(&self, x: &[T]) -> Result<Vec<T>>;

    fn predict_proba(&self, x: &[T], class: ClassId) -> Result<T> {
        let dist = self.distribution(x)?;
        Ok(self
            .classes()
            .iter()
            .position(|&c| c == class)
            .map_or(T::zero(), |i| dist[i]))
    }

    /// Most probable class; ties go to the smallest class identifier.
    fn predict(&self, x: &[T]) -> Result<ClassId> {
        let dist = self.distribution(x)?;
        let mut best = 0;
        for (i, &p) in dist.iter().enumerate() {
            if p > dist[best] {
                best = i;
            }
        }
        self.classes()
            .get(best)
            .copied()
            .ok_or_else(|| Error::Data("classifier has no classes".into()))
    }
}

/// Class frequencies among the `k` nearest training rows (L², ties by row index).
#[derive(Clone, Debug)]
pub struct KnnClassifier<T> {
    train: Vec<Vec<T>>,
    labels: Vec<ClassId>,
    classes: Vec<ClassId>,
    k: usize,
}

impl<T: Scalar> KnnClassifier<T> {
    pub fn new(train: &Dataset<T>, k: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Data("training set is empty".into()));
        }
        if k == 0 || k > train.len() {
            return Err(Error::InvalidParameter(format!(
                "k_model must be in 1..={}, got {k}",
                train.len()
            )));
        }
        let mut classes = train.labels().to_vec();
        classes.sort_unstable();
        classes.dedup();
        Ok(Self {
            train: train.instances().to_vec(),
            labels: train.labels().to_vec(),
            classes,
            k,
        })
    }

    pub fn neighbors(&self, x: &[T]) -> Vec<usize> {
        let mut order: Vec<(T, usize)> = self
            .train
            .iter()
            .enumerate()
            .map(|(i, r)| (l2_distance(r, x), i))
            .collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        order.into_iter().take(self.k).map(|(_, i)| i).collect()
    }
}

impl<T: Scalar> Classifier<T> for KnnClassifier<T> {
    fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    fn distribution(&self, x: &[T]) -> Result<Vec<T>> {
        let m = self.train[0].len();
        if x.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: x.len(),
            });
        }
        let mut counts = vec![0usize; self.classes.len()];
        for i in self.neighbors(x) {
            let c = self.classes.binary_search(&self.labels[i]).expect("label is a known class");
            counts[c] += 1;
        }
        let k = T::lit(self.k as f64);
        Ok(counts.into_iter().map(|c| T::lit(c as f64) / k).collect())
    }
}

/// Answers only for instances that are rows of the dataset it was loaded against.
#[derive(Clone, Debug)]
pub struct LookupClassifier<T> {
    index: HashMap<Vec<u64>, usize>,
    probabilities: Vec<Vec<T>>,
    classes: Vec<ClassId>,
}

fn row_key<T: Scalar>(x: &[T]) -> Vec<u64> {
    // +0.0 and -0.0 compare equal, so they must hash equal too.
    x.iter()
        .map(|v| {
            let f = v.as_f64();
            if f == 0.0 { 0 } else { f.to_bits() }
        })
        .collect()
}

impl<T: Scalar> LookupClassifier<T> {
    pub fn new(data: &Dataset<T>, classes: Vec<ClassId>, probabilities: Vec<Vec<T>>) -> Result<Self> {
        if probabilities.len() != data.len() {
            return Err(Error::Data(format!(
                "predictions have {} rows, dataset has {}",
                probabilities.len(),
                data.len()
            )));
        }
        for (i, row) in probabilities.iter().enumerate() {
            if row.len() != classes.len() {
                return Err(Error::Data(format!(
                    "prediction row {i} has {} values for {} classes",
                    row.len(),
                    classes.len()
                )));
            }
            if let Some(p) = row.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
                return Err(Error::Data(format!("prediction row {i}: probability {p} outside [0, 1]")));
            }
            let sum: f64 = row.iter().map(|p| p.as_f64()).sum();
            if (sum - 1.0).abs() > LOADED_SUM_TOLERANCE {
                return Err(Error::Data(format!("prediction row {i} sums to {sum}, not 1")));
            }
        }
        // Sort classes ascending, permuting the probability columns with them.
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by_key(|&j| classes[j]);
        let sorted: Vec<ClassId> = order.iter().map(|&j| classes[j]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Data("duplicate class identifier in predictions header".into()));
        }
        let probabilities = probabilities
            .into_iter()
            .map(|row| order.iter().map(|&j| row[j]).collect())
            .collect();
        let mut index = HashMap::with_capacity(data.len());
        for (i, row) in data.instances().iter().enumerate() {
            index.entry(row_key(row)).or_insert(i);
        }
        Ok(Self {
            index,
            probabilities,
            classes: sorted,
        })
    }
}

impl<T: Scalar> Classifier<T> for LookupClassifier<T> {
    fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    fn distribution(&self, x: &[T]) -> Result<Vec<T>> {
        self.index
            .get(&row_key(x))
            .map(|&i| self.probabilities[i].clone())
            .ok_or(Error::UnknownInstance)
    }
}

/// Reads a predictions CSV: header of class identifiers, one probability row per dataset row.
pub fn read_predictions<T: Scalar, R: Read>(reader: R, data: &Dataset<T>) -> Result<LookupClassifier<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let classes = rdr
        .headers()?
        .iter()
        .map(|h| {
            h.trim().parse::<ClassId>().map_err(|_| Error::Parse {
                row: 0,
                column: h.to_string(),
                message: "header must be a class identifier".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, s)| {
                s.trim().parse::<f64>().map(T::lit).map_err(|_| Error::Parse {
                    row: i,
                    column: classes.get(j).map_or_else(|| j.to_string(), |c| c.to_string()),
                    message: format!("'{s}' is not a probability"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    LookupClassifier::new(data, classes, rows)
}

pub fn load_predictions<T: Scalar>(path: impl AsRef<FsPath>, data: &Dataset<T>) -> Result<LookupClassifier<T>> {
    read_predictions(std::fs::File::open(path)?, data)
}

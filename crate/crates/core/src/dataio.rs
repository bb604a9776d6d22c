//! Tabular input: feature schema, CSV loading, one-hot encoding and min-max scaling.
//!
//! Every downstream module consumes [`Dataset`], whose rows live in `[0, 1]^m`
//! with categorical features expanded into one-hot groups.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type ClassId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

/// Direction in which a feature is allowed to change cheaply.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    #[default]
    Free,
    NonDecreasing,
    NonIncreasing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default)]
    pub monotonicity: Monotonicity,
    #[serde(default = "default_mutable")]
    pub mutable: bool,
}

fn default_mutable() -> bool {
    true
}

impl FeatureSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Numeric,
            monotonicity: Monotonicity::Free,
            mutable: true,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        Self {
            kind: FeatureKind::Categorical,
            ..Self::numeric(name)
        }
    }

    pub fn with_monotonicity(mut self, monotonicity: Monotonicity) -> Self {
        self.monotonicity = monotonicity;
        self
    }

    pub fn immutable(mut self) -> Self {
        self.mutable = false;
        self
    }
}

/// Ordered list of features with unique names.
///
/// On disk this is a TOML document with one `[[features]]` table per feature:
///
/// ```toml
/// [[features]]
/// name = "age"
/// kind = "numeric"
/// monotonicity = "non-decreasing"
/// mutable = true
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &features {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name '{}'", f.name)));
            }
        }
        Ok(Self { features })
    }

    /// Schema of `m` free numeric features named `x0 … x{m-1}`.
    pub fn all_numeric(m: usize) -> Self {
        Self {
            features: (0..m).map(|i| FeatureSpec::numeric(format!("x{i}"))).collect(),
        }
    }

    /// Every header column except `label_column`, as a free numeric feature.
    pub fn numeric_from_header<R: Read>(reader: R, label_column: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?;
        if !headers.iter().any(|h| h.trim() == label_column) {
            return Err(Error::Schema(label_column.to_string()));
        }
        Self::new(
            headers
                .iter()
                .map(str::trim)
                .filter(|h| *h != label_column)
                .map(FeatureSpec::numeric)
                .collect(),
        )
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let parsed: FeatureSchema = toml::from_str(s)?;
        Self::new(parsed.features)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("schema serializes to TOML")
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Numeric(f64),
    Category(String),
}

/// Parsed but unencoded table.
#[derive(Clone, Debug, PartialEq)]
pub struct RawDataset {
    pub schema: FeatureSchema,
    pub rows: Vec<Vec<RawValue>>,
    pub labels: Vec<ClassId>,
}

pub fn load_csv(
    path: impl AsRef<FsPath>,
    schema: &FeatureSchema,
    label_column: &str,
) -> Result<RawDataset> {
    read_csv(std::fs::File::open(path)?, schema, label_column)
}

pub fn read_csv<R: Read>(
    reader: R,
    schema: &FeatureSchema,
    label_column: &str,
) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let position = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema(name.to_string()))
    };
    let feature_cols = schema
        .features()
        .iter()
        .map(|f| position(&f.name))
        .collect::<Result<Vec<_>>>()?;
    let label_col = position(label_column)?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (row_idx, record) in rdr.records().enumerate() {
        let record = record?;
        let cell = |col: usize, name: &str| -> Result<&str> {
            let s = record.get(col).map(str::trim).unwrap_or("");
            if s.is_empty() {
                return Err(Error::Parse {
                    row: row_idx,
                    column: name.to_string(),
                    message: "missing value".into(),
                });
            }
            Ok(s)
        };
        let mut row = Vec::with_capacity(feature_cols.len());
        for (spec, &col) in schema.features().iter().zip(&feature_cols) {
            let s = cell(col, &spec.name)?;
            row.push(match spec.kind {
                FeatureKind::Numeric => RawValue::Numeric(s.parse().map_err(|_| Error::Parse {
                    row: row_idx,
                    column: spec.name.clone(),
                    message: format!("'{s}' is not a number"),
                })?),
                FeatureKind::Categorical => RawValue::Category(s.to_string()),
            });
        }
        let s = cell(label_col, label_column)?;
        labels.push(s.parse().map_err(|_| Error::Parse {
            row: row_idx,
            column: label_column.to_string(),
            message: format!("'{s}' is not a class identifier"),
        })?);
        rows.push(row);
    }
    Ok(RawDataset {
        schema: schema.clone(),
        rows,
        labels,
    })
}

/// Where an encoded column comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedColumn {
    pub feature: String,
    pub category: Option<String>,
}

impl EncodedColumn {
    pub fn name(&self) -> String {
        match &self.category {
            Some(c) => format!("{}={}", self.feature, c),
            None => self.feature.clone(),
        }
    }
}

/// Per-column constraint inherited from the owning feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnConstraint {
    pub monotonicity: Monotonicity,
    pub mutable: bool,
}

impl ColumnConstraint {
    pub const FREE: Self = Self {
        monotonicity: Monotonicity::Free,
        mutable: true,
    };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum FeatureEncoding {
    Scaled { min: f64, max: f64 },
    OneHot { vocabulary: Vec<String> },
}

/// Fitted encoding: numeric ranges and categorical vocabularies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    schema: FeatureSchema,
    encodings: Vec<FeatureEncoding>,
    columns: Vec<EncodedColumn>,
}

impl Encoder {
    pub fn fit(raw: &RawDataset) -> Result<Self> {
        if raw.rows.is_empty() {
            return Err(Error::Data("dataset is empty".into()));
        }
        let mut encodings = Vec::with_capacity(raw.schema.len());
        let mut columns = Vec::new();
        for (j, spec) in raw.schema.features().iter().enumerate() {
            match spec.kind {
                FeatureKind::Numeric => {
                    let mut min = f64::INFINITY;
                    let mut max = f64::NEG_INFINITY;
                    for (i, row) in raw.rows.iter().enumerate() {
                        let v = numeric_cell(row, j, i, spec)?;
                        min = min.min(v);
                        max = max.max(v);
                    }
                    encodings.push(FeatureEncoding::Scaled { min, max });
                    columns.push(EncodedColumn {
                        feature: spec.name.clone(),
                        category: None,
                    });
                }
                FeatureKind::Categorical => {
                    let mut vocabulary: Vec<String> = Vec::new();
                    for (i, row) in raw.rows.iter().enumerate() {
                        let c = category_cell(row, j, i, spec)?;
                        if !vocabulary.iter().any(|v| v == c) {
                            vocabulary.push(c.to_string());
                        }
                    }
                    columns.extend(vocabulary.iter().map(|c| EncodedColumn {
                        feature: spec.name.clone(),
                        category: Some(c.clone()),
                    }));
                    encodings.push(FeatureEncoding::OneHot { vocabulary });
                }
            }
        }
        Ok(Self {
            schema: raw.schema.clone(),
            encodings,
            columns,
        })
    }

    /// Encodes one raw row. Categories outside the fitted vocabulary are rejected.
    pub fn transform_row<T: Scalar>(&self, row: &[RawValue]) -> Result<Vec<T>> {
        self.transform_row_at(row, 0)
    }

    fn transform_row_at<T: Scalar>(&self, row: &[RawValue], row_idx: usize) -> Result<Vec<T>> {
        if row.len() != self.schema.len() {
            return Err(Error::DimensionMismatch {
                expected: self.schema.len(),
                actual: row.len(),
            });
        }
        let mut out = Vec::with_capacity(self.columns.len());
        for (j, (spec, enc)) in self.schema.features().iter().zip(&self.encodings).enumerate() {
            match enc {
                FeatureEncoding::Scaled { min, max } => {
                    let v = numeric_cell(row, j, row_idx, spec)?;
                    let range = max - min;
                    let scaled = if range > 0.0 { (v - min) / range } else { 0.0 };
                    out.push(T::lit(scaled));
                }
                FeatureEncoding::OneHot { vocabulary } => {
                    let c = category_cell(row, j, row_idx, spec)?;
                    let hit = vocabulary.iter().position(|v| v == c).ok_or_else(|| Error::Parse {
                        row: row_idx,
                        column: spec.name.clone(),
                        message: format!("unknown category '{c}'"),
                    })?;
                    out.extend((0..vocabulary.len()).map(|k| if k == hit { T::one() } else { T::zero() }));
                }
            }
        }
        Ok(out)
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn columns(&self) -> &[EncodedColumn] {
        &self.columns
    }

    /// Fitted vocabulary of a categorical feature, in first-appearance order.
    pub fn vocabulary(&self, feature: &str) -> Option<&[String]> {
        let j = self.schema.features().iter().position(|f| f.name == feature)?;
        match &self.encodings[j] {
            FeatureEncoding::OneHot { vocabulary } => Some(vocabulary),
            FeatureEncoding::Scaled { .. } => None,
        }
    }

    pub fn column_constraints(&self) -> Vec<ColumnConstraint> {
        self.columns
            .iter()
            .map(|c| {
                let spec = self
                    .schema
                    .features()
                    .iter()
                    .find(|f| f.name == c.feature)
                    .expect("column maps to a schema feature");
                ColumnConstraint {
                    monotonicity: spec.monotonicity,
                    mutable: spec.mutable,
                }
            })
            .collect()
    }
}

fn numeric_cell(row: &[RawValue], j: usize, i: usize, spec: &FeatureSpec) -> Result<f64> {
    match &row[j] {
        RawValue::Numeric(v) if v.is_finite() => Ok(*v),
        RawValue::Numeric(v) => Err(Error::Parse {
            row: i,
            column: spec.name.clone(),
            message: format!("non-finite value {v}"),
        }),
        RawValue::Category(c) => Err(Error::Parse {
            row: i,
            column: spec.name.clone(),
            message: format!("expected a number, found '{c}'"),
        }),
    }
}

fn category_cell<'a>(row: &'a [RawValue], j: usize, i: usize, spec: &FeatureSpec) -> Result<&'a str> {
    match &row[j] {
        RawValue::Category(c) => Ok(c),
        RawValue::Numeric(v) => Err(Error::Parse {
            row: i,
            column: spec.name.clone(),
            message: format!("expected a category, found number {v}"),
        }),
    }
}

impl RawDataset {
    /// Fits an [`Encoder`] on this table and applies it to every row.
    pub fn encode_and_scale<T: Scalar>(&self) -> Result<Dataset<T>> {
        let encoder = Encoder::fit(self)?;
        let instances = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| encoder.transform_row_at(row, i))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(instances, self.labels.clone(), encoder)
    }
}

/// Encoded instance matrix in `[0, 1]^m` with per-row labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    instances: Vec<Vec<T>>,
    labels: Vec<ClassId>,
    encoder: Encoder,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(instances: Vec<Vec<T>>, labels: Vec<ClassId>, encoder: Encoder) -> Result<Self> {
        if instances.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} instances but {} labels",
                instances.len(),
                labels.len()
            )));
        }
        let m = encoder.columns.len();
        if let Some(bad) = instances.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: bad.len(),
            });
        }
        Ok(Self {
            instances,
            labels,
            encoder,
        })
    }

    /// Wraps an already-scaled numeric matrix, with free numeric features `x0 …`.
    pub fn from_matrix(instances: Vec<Vec<T>>, labels: Vec<ClassId>) -> Result<Self> {
        let m = instances.first().map_or(0, Vec::len);
        let schema = FeatureSchema::all_numeric(m);
        let encoder = Encoder {
            encodings: vec![FeatureEncoding::Scaled { min: 0.0, max: 1.0 }; m],
            columns: schema
                .features()
                .iter()
                .map(|f| EncodedColumn {
                    feature: f.name.clone(),
                    category: None,
                })
                .collect(),
            schema,
        };
        Self::new(instances, labels, encoder)
    }

    pub fn instances(&self) -> &[Vec<T>] {
        &self.instances
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.instances[i]
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn n_columns(&self) -> usize {
        self.encoder.columns.len()
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn column_constraints(&self) -> Vec<ColumnConstraint> {
        self.encoder.column_constraints()
    }

    /// Re-expresses the encoded matrix as a raw table of numeric features, one
    /// per encoded column, so it can be passed through encoding again.
    pub fn to_raw(&self) -> RawDataset {
        let schema = FeatureSchema {
            features: self
                .encoder
                .columns
                .iter()
                .map(|c| FeatureSpec::numeric(c.name()))
                .collect(),
        };
        RawDataset {
            schema,
            rows: self
                .instances
                .iter()
                .map(|r| r.iter().map(|v| RawValue::Numeric(v.as_f64())).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn to_csv_string(&self, label_column: &str) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = self.encoder.columns.iter().map(EncodedColumn::name).collect();
        header.push(label_column.to_string());
        w.write_record(&header).expect("in-memory write");
        for (row, label) in self.instances.iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(label.to_string());
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

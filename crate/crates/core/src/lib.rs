//! Explanatory multiverse: counterfactual paths as geometric objects.
//!
//! Two views of the same idea live here. The vector view ([`vector`]) treats a
//! counterfactual journey as a polyline of step vectors and compares journeys
//! by normalized comparison points, branching points, direction difference and
//! opportunity potential. The graph view ([`graph`]) builds a directed k-NN
//! graph over a dataset, finds shortest paths to counterfactual candidates and
//! scores them by branching factor and shared path prefix.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

pub mod bsp;
pub mod dataio;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod model;
pub mod moons;
pub mod scalar;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::{l2_distance, Scalar};

pub type Dataset = dataio::Dataset<f64>;
pub type Path = vector::Path<f64>;
pub type NormalizedPath = vector::NormalizedPath<f64>;
pub type WeightVector = vector::WeightVector<f64>;
pub type OpportunityMatrix = vector::OpportunityMatrix<f64>;
pub type MultiverseGraph = graph::MultiverseGraph<f64>;
pub type GraphPath = graph::GraphPath<f64>;
pub type GraphConfig = graph::GraphConfig<f64>;
pub type BuildConfig = graph::BuildConfig<f64>;
pub type CounterfactualReport = graph::CounterfactualReport<f64>;
pub type Explanation = graph::Explanation<f64>;
pub type BspConfig = bsp::BspConfig<f64>;
pub type EvalConfig = evaluation::EvalConfig<f64>;
pub type KnnClassifier = model::KnnClassifier<f64>;
pub type LookupClassifier = model::LookupClassifier<f64>;

pub mod f32 {
    //! The same aliases in single precision.
    pub type Dataset = crate::dataio::Dataset<f32>;
    pub type Path = crate::vector::Path<f32>;
    pub type NormalizedPath = crate::vector::NormalizedPath<f32>;
    pub type MultiverseGraph = crate::graph::MultiverseGraph<f32>;
    pub type GraphPath = crate::graph::GraphPath<f32>;
    pub type CounterfactualReport = crate::graph::CounterfactualReport<f32>;
}

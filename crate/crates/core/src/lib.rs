//! Fully dynamic approximate densest subgraph via locally optimal orientations.
//!
//! The maintainers keep an orientation of a multigraph (or hypergraph) in
//! which no edge points at a head much heavier than its tail. The maximum
//! in-degree of such an orientation, after duplicating every edge `k` times,
//! is within `1 + ε` of the optimal density, and the vertices of highest
//! in-degree contain an approximately densest subgraph.
//!
//! Threshold comparisons are generic over [`Scalar`]; the aliases below fix
//! the two common choices.

pub mod amortized;
pub mod bounds;
pub mod config;
pub mod degree;
pub mod density;
pub mod error;
mod flow;
pub mod hypergraph;
pub mod index;
pub mod invariants;
pub mod maintainer;
pub mod oracle;
pub mod orientation;
pub mod scalar;
pub mod threshold;
pub mod worstcase;

pub type Vertex = u32;
pub type Rational = num_rational::Ratio<i64>;

pub use amortized::AmortizedMaintainer;
pub use config::Config;
pub use density::{DensityEstimator, Mode};
pub use error::{Error, Result};
pub use hypergraph::{HyperId, HypergraphMaintainer};
pub use invariants::{Rule, Violation};
pub use maintainer::Maintainer;
pub use orientation::{Arc, ArcView, Counters, OpStats, Structure};
pub use scalar::{Scalar, Slack};
pub use threshold::ThresholdMaintainer;
pub use worstcase::WorstCaseMaintainer;

pub type ExactAmortized = AmortizedMaintainer<Rational>;
pub type ExactWorstCase = WorstCaseMaintainer<Rational>;
pub type ExactThreshold = ThresholdMaintainer<Rational>;
pub type ExactEstimator = DensityEstimator<Rational>;
pub type ExactHypergraph = HypergraphMaintainer<Rational>;

pub type FloatAmortized = AmortizedMaintainer<f64>;
pub type FloatWorstCase = WorstCaseMaintainer<f64>;
pub type FloatThreshold = ThresholdMaintainer<f64>;
pub type FloatEstimator = DensityEstimator<f64>;
pub type FloatHypergraph = HypergraphMaintainer<f64>;

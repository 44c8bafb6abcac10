//! Loss-aware aggregation for ensembles of multilabel classifiers.
//!
//! Members of an ensemble each produce a vector of marginal label
//! probabilities. [`aggregate`] turns those into a single prediction, either
//! by loss-oblivious voting (GMV, BMV) or by pipelines that target a specific
//! loss: combine-then-predict (CTP) and predict-then-combine (PTC, label-wise
//! or by mode). [`riskmin`] holds the per-loss prediction rules, [`learners`]
//! the EBR, ECC and EMODT ensembles, and [`experiments`] the cross-validation
//! harness with rank statistics.

pub mod aggregate;
pub mod cli;
pub mod dataio;
pub mod error;
pub mod experiments;
pub mod labels;
pub mod learners;
pub mod loss;
pub mod riskmin;
pub mod seeding;

pub use aggregate::{ensemble_predict, Strategy, StrategyKind};
pub use dataio::Dataset;
pub use error::{Error, Result};
pub use labels::{JointDistribution, LabelVector, MarginalVector};
pub use learners::{train_ensemble, EnsembleKind, EnsembleModel, LearnerConfig};
pub use loss::LossKind;
pub use riskmin::PredictorSpec;

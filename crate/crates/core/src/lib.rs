//! Hyperdimensional-computing surrogate for ranking vision-transformer
//! architectures.
//!
//! Architectures (10–12 encoder blocks, each with a label-encoded head count
//! and MLP ratio) are encoded into hypervectors with either the Gram or the
//! Record scheme. A small rank-labelled training set is bundled into one task
//! vector per task, weighted by rank, and optionally refined by
//! weight-difference retraining. Unlabelled architectures are then ranked by
//! cosine similarity to each task vector and scored with Kendall tau.
//!
//! ```no_run
//! use hdrank::dataset::{gen_synthetic, BenchmarkSpec, ScoringFamily};
//! use hdrank::eval::score;
//! use hdrank::pipeline::{fit, PipelineConfig};
//!
//! let bench = gen_synthetic(&BenchmarkSpec {
//!     n_train: 500,
//!     n_test: 5_000,
//!     tasks: BenchmarkSpec::task_names(8),
//!     seed: 7,
//!     noise_sigma: 0.0,
//!     scoring_family: ScoringFamily::AdditiveLinear,
//! })?;
//! let fitted = fit(&bench.train, &PipelineConfig::default())?;
//! let predicted = fitted.model.predictor()?.rank(&bench.test.archs.archs)?;
//! println!("average tau {:.4}", score(&predicted, &bench.test.ranks)?.average);
//! # Ok::<(), hdrank::Error>(())
//! ```
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod dataset;
pub mod encode;
mod error;
pub mod eval;
pub mod hv;
pub mod model;
pub mod pipeline;
pub mod rank;

pub use encode::{ArchDescriptor, Encoder, ItemMemorySet, LayerParams, Scheme, UnifiedRecordMemory};
pub use error::{Error, Result};
pub use hv::{Cosine, HvSeed, Hypervector};
pub use pipeline::{fit, PipelineConfig, TrainedModel};
pub use rank::{AssociativeMemory, RankTable, SimilarityTable, TrainConfig, WeightMode, WeightTable};

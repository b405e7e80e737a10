//! End-to-end fitting and prediction on top of the encoders and the ranker.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledSet;
use crate::encode::{ArchDescriptor, Encoder, ItemMemorySet, Scheme};
use crate::error::{Error, Result};
use crate::hv::Hypervector;
use crate::rank::{
    predict_similarities, ranks_to_weights, retrain, similarities_to_ranks, train, AssociativeMemory, RankTable,
    RetrainEpoch, SimilarityTable, TrainConfig,
};

/// Upper bound on `f64` elements materialized at once while predicting.
const PREDICT_CHUNK_ELEMENTS: usize = 1 << 24;

pub const DEFAULT_DIM: usize = 100_000;
pub const DEFAULT_SEED: u64 = 2023;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub dim: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub train: TrainConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            dim: DEFAULT_DIM,
            seed: DEFAULT_SEED,
            scheme: Scheme::Record,
            train: TrainConfig::default(),
        }
    }
}

/// A trained associative memory plus everything needed to rebuild its encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub config: PipelineConfig,
    pub memory: AssociativeMemory,
    pub retrain_trace: Vec<RetrainEpoch>,
}

#[derive(Debug, Clone)]
pub struct Fit {
    pub model: TrainedModel,
    /// Memory after the single training pass, before any retraining.
    pub initial_memory: AssociativeMemory,
    pub encoded: Vec<Hypervector>,
}

pub fn build_encoder(cfg: &PipelineConfig) -> Result<Encoder> {
    Ok(Encoder::new(cfg.scheme, ItemMemorySet::new(cfg.seed, cfg.dim)?))
}

/// Encodes the training set, trains one pass and retrains for up to
/// `cfg.train.retrain_max_epochs` epochs.
pub fn fit(data: &LabeledSet, cfg: &PipelineConfig) -> Result<Fit> {
    cfg.train.validate()?;
    if data.archs.len() != data.ranks.n_archs() {
        return Err(Error::RowCountMismatch {
            expected: data.archs.len(),
            got: data.ranks.n_archs(),
        });
    }
    let encoder = build_encoder(cfg)?;
    let encoded = encoder.encode_batch(&data.archs.archs);
    let weights = ranks_to_weights(&data.ranks, cfg.train.mu, cfg.train.weight_mode)?;
    let initial = train(&encoded, data.ranks.task_names().to_vec(), &weights, &cfg.train)?;
    let outcome = retrain(&initial, &encoded, &weights, &cfg.train)?;
    for e in &outcome.trace {
        log::info!(
            "retrain epoch {} (lr {:.4}): mean |dw| {:?}",
            e.epoch,
            e.learning_rate,
            e.mean_abs_dw
        );
    }
    Ok(Fit {
        model: TrainedModel {
            config: *cfg,
            memory: outcome.model,
            retrain_trace: outcome.trace,
        },
        initial_memory: initial,
        encoded,
    })
}

/// Encoder and memory ready to score new architectures.
pub struct Predictor<'a> {
    encoder: Encoder,
    memory: &'a AssociativeMemory,
}

impl TrainedModel {
    pub fn predictor(&self) -> Result<Predictor<'_>> {
        let encoder = build_encoder(&self.config)?;
        if encoder.dim() != self.memory.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.memory.dim(),
                got: encoder.dim(),
            });
        }
        Ok(Predictor {
            encoder,
            memory: &self.memory,
        })
    }
}

impl Predictor<'_> {
    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    /// Similarities for `archs`, encoding in bounded chunks so memory use does
    /// not grow with the number of architectures.
    pub fn similarities(&self, archs: &[ArchDescriptor]) -> Result<SimilarityTable> {
        similarities_with(self.memory, &self.encoder, archs)
    }

    pub fn rank(&self, archs: &[ArchDescriptor]) -> Result<RankTable> {
        Ok(similarities_to_ranks(&self.similarities(archs)?))
    }
}

pub fn similarities_with(
    memory: &AssociativeMemory,
    encoder: &Encoder,
    archs: &[ArchDescriptor],
) -> Result<SimilarityTable> {
    let chunk = (PREDICT_CHUNK_ELEMENTS / encoder.dim()).max(1);
    let mut table = predict_similarities(memory, &[])?;
    for part in archs.chunks(chunk) {
        let encoded = encoder.encode_batch(part);
        table.extend(predict_similarities(memory, &encoded)?)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_synthetic, BenchmarkSpec, ScoringFamily};

    #[test]
    fn chunked_prediction_matches_direct() {
        let bench = gen_synthetic(&BenchmarkSpec {
            n_train: 40,
            n_test: 300,
            tasks: BenchmarkSpec::task_names(2),
            seed: 3,
            noise_sigma: 0.0,
            scoring_family: ScoringFamily::AdditiveLinear,
        })
        .unwrap();
        let cfg = PipelineConfig {
            dim: 70_000,
            ..PipelineConfig::default()
        };
        let fit = fit(&bench.train, &cfg).unwrap();
        let predictor = fit.model.predictor().unwrap();
        let chunked = predictor.similarities(&bench.test.archs.archs).unwrap();
        let direct = predict_similarities(
            &fit.model.memory,
            &predictor.encoder().encode_batch(&bench.test.archs.archs),
        )
        .unwrap();
        assert_eq!(chunked, direct);
    }
}

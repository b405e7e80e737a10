//! Watches retraining converge on a small synthetic training set.
//!
//! Prints the per-epoch weight difference and the training-set tau after each
//! epoch budget, for both weight modes. The literal mode gives the best
//! architecture the lowest weight, so its similarity order comes out inverted.

use hdrank::dataset::{gen_synthetic, BenchmarkSpec, ScoringFamily};
use hdrank::encode::{Encoder, ItemMemorySet};
use hdrank::eval::score;
use hdrank::rank::{predict_similarities, ranks_to_weights, retrain, similarities_to_ranks, train};
use hdrank::{Scheme, TrainConfig, WeightMode};

fn main() -> hdrank::Result<()> {
    let bench = gen_synthetic(&BenchmarkSpec {
        n_train: 300,
        n_test: 0,
        tasks: BenchmarkSpec::task_names(4),
        seed: 3,
        noise_sigma: 0.2,
        scoring_family: ScoringFamily::QuadraticInteraction,
    })?;
    let encoder = Encoder::new(Scheme::Record, ItemMemorySet::new(2023, 20_000)?);
    let encoded = encoder.encode_batch(&bench.train.archs.archs);
    let names = bench.train.ranks.task_names().to_vec();

    for mode in [WeightMode::Semantic, WeightMode::PaperLiteral] {
        println!("weight mode {mode:?}");
        for epochs in [0, 1, 3, 10] {
            let cfg = TrainConfig {
                weight_mode: mode,
                retrain_max_epochs: epochs,
                ..TrainConfig::default()
            };
            let weights = ranks_to_weights(&bench.train.ranks, cfg.mu, mode)?;
            let initial = train(&encoded, names.clone(), &weights, &cfg)?;
            let out = retrain(&initial, &encoded, &weights, &cfg)?;
            let ranks = similarities_to_ranks(&predict_similarities(&out.model, &encoded)?);
            let last = out.trace.last().and_then(|e| e.overall());
            println!(
                "  max epochs {epochs:>2}: {} epochs run, {} updates, last mean|dw| {}, train tau {:.4}",
                out.trace.len(),
                out.updates_applied,
                last.map_or("-".into(), |v| format!("{v:.4}")),
                score(&ranks, &bench.train.ranks)?.average
            );
        }
    }
    Ok(())
}

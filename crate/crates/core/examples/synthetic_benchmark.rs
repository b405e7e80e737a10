//! Train on a synthetic 500-architecture benchmark and rank a held-out set.
//!
//! ```bash
//! cargo run --release --example synthetic_benchmark -- [dim] [scheme] [n_test]
//! ```

use std::time::Instant;

use hdrank::dataset::{gen_synthetic, BenchmarkSpec, ScoringFamily};
use hdrank::eval::{random_baseline, score};
use hdrank::pipeline::{fit, PipelineConfig};
use hdrank::rank::{predict_similarities, similarities_to_ranks};
use hdrank::Scheme;

fn main() -> hdrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let dim = args.next().map_or(100_000, |s| s.parse().expect("dim"));
    let scheme = args.next().map_or(Scheme::Record, |s| s.parse().expect("scheme"));
    let n_test = args.next().map_or(5_000, |s| s.parse().expect("n_test"));

    let bench = gen_synthetic(&BenchmarkSpec {
        n_train: 500,
        n_test,
        tasks: BenchmarkSpec::task_names(8),
        seed: 7,
        noise_sigma: 0.0,
        scoring_family: ScoringFamily::AdditiveLinear,
    })?;

    let cfg = PipelineConfig {
        dim,
        scheme,
        ..PipelineConfig::default()
    };
    let start = Instant::now();
    let fitted = fit(&bench.train, &cfg)?;
    println!("fit: {:.2}s", start.elapsed().as_secs_f64());
    for e in &fitted.model.retrain_trace {
        println!(
            "  epoch {:>2}  lr {:.3}  mean|dw| {:.5}",
            e.epoch,
            e.learning_rate,
            e.overall().unwrap_or(0.0)
        );
    }

    let train_before = similarities_to_ranks(&predict_similarities(&fitted.initial_memory, &fitted.encoded)?);
    let train_after = similarities_to_ranks(&predict_similarities(&fitted.model.memory, &fitted.encoded)?);
    println!(
        "train tau: before retraining {:.4}, after {:.4}",
        score(&train_before, &bench.train.ranks)?.average,
        score(&train_after, &bench.train.ranks)?.average
    );

    let start = Instant::now();
    let predicted = fitted.model.predictor()?.rank(&bench.test.archs.archs)?;
    println!("predict {} archs: {:.2}s", n_test, start.elapsed().as_secs_f64());
    let report = score(&predicted, &bench.test.ranks)?;
    print!("{}", report.to_table());

    let baseline = random_baseline(&bench.test.ranks, 100, 1)?;
    println!(
        "random ranker: mean {:.4}, 3-sigma band ±{:.4}",
        baseline.mean,
        baseline.band_3sigma.unwrap_or(f64::NAN)
    );
    Ok(())
}

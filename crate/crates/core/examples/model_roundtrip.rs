//! Trains on CSV files, saves the model, reloads it and predicts.

use hdrank::dataset::{
    gen_synthetic, load_arch_csv, load_labeled, write_benchmark, write_pred_csv, BenchmarkFiles, BenchmarkSpec,
    ScoringFamily,
};
use hdrank::model::{load_model, save_model};
use hdrank::{fit, PipelineConfig};

fn main() -> hdrank::Result<()> {
    let dir = std::env::temp_dir().join("hdrank-model-roundtrip");
    std::fs::create_dir_all(&dir).map_err(|e| hdrank::Error::Io {
        path: dir.clone(),
        source: e,
    })?;

    let spec = BenchmarkSpec {
        n_train: 200,
        n_test: 100,
        tasks: BenchmarkSpec::task_names(2),
        seed: 1,
        noise_sigma: 0.0,
        scoring_family: ScoringFamily::AdditiveLinear,
    };
    let files = BenchmarkFiles::in_dir(&dir);
    write_benchmark(&gen_synthetic(&spec)?, &files, &spec)?;

    let train = load_labeled(&files.train_archs, &files.train_ranks)?;
    let cfg = PipelineConfig {
        dim: 8_192,
        ..PipelineConfig::default()
    };
    let model_path = dir.join("model.bin");
    save_model(&model_path, &fit(&train, &cfg)?.model)?;

    let model = load_model(&model_path)?;
    println!(
        "loaded {} model: dim {}, tasks {:?}, {} retrain epochs",
        model.config.scheme,
        model.memory.dim(),
        model.memory.task_names(),
        model.retrain_trace.len()
    );
    let test = load_arch_csv(&files.test_archs)?;
    let ranks = model.predictor()?.rank(&test.archs)?;
    let out = dir.join("pred.csv");
    write_pred_csv(&out, &test.ids, &ranks)?;
    println!("wrote {}", out.display());
    Ok(())
}

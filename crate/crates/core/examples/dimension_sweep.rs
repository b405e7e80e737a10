//! Test tau as a function of hypervector dimension.
//!
//! ```bash
//! cargo run --release --example dimension_sweep -- 500,2000,10000,50000
//! ```

use hdrank::dataset::{gen_synthetic, BenchmarkSpec, ScoringFamily};
use hdrank::eval::dim_sweep;
use hdrank::PipelineConfig;

fn main() -> hdrank::Result<()> {
    let dims: Vec<usize> = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "500,2000,10000".into())
        .split(',')
        .map(|d| d.trim().parse().expect("dimension"))
        .collect();
    let bench = gen_synthetic(&BenchmarkSpec {
        n_train: 500,
        n_test: 2_000,
        tasks: BenchmarkSpec::task_names(4),
        seed: 7,
        noise_sigma: 0.0,
        scoring_family: ScoringFamily::AdditiveLinear,
    })?;
    print!(
        "{}",
        dim_sweep(&dims, &bench, &PipelineConfig::default(), 1)?.to_table()
    );
    Ok(())
}

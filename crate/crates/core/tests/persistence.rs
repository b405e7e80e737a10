use hdrank::dataset::{
    gen_synthetic, load_arch_csv, load_rank_csv, write_arch_csv, write_pred_csv, ArchSet, BenchmarkSpec, ScoringFamily,
};
use hdrank::model::{load_model, save_model};
use hdrank::pipeline::{fit, PipelineConfig};
use hdrank::{ArchDescriptor, LayerParams, RankTable, Scheme, TrainConfig, WeightMode};
use proptest::prelude::*;
use tempfile::TempDir;

fn arch_strategy() -> impl Strategy<Value = ArchDescriptor> {
    (10usize..=12)
        .prop_flat_map(|d| prop::collection::vec((1u8..=3, 1u8..=3), d))
        .prop_map(|codes| {
            ArchDescriptor::new(
                codes
                    .into_iter()
                    .map(|(h, m)| LayerParams::new(h, m).unwrap())
                    .collect(),
            )
            .unwrap()
        })
}

fn rank_table_strategy() -> impl Strategy<Value = RankTable> {
    (0usize..30, 1usize..5).prop_flat_map(|(n, t)| {
        let col = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
        prop::collection::vec(col, t).prop_map(move |cols| {
            let names = (1..=t).map(|i| format!("t{i}")).collect();
            RankTable::new(names, cols).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_csv_round_trips(table in rank_table_strategy()) {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("r.csv");
        let ids: Vec<String> = (0..table.n_archs()).map(|i| format!("a{i}")).collect();
        write_pred_csv(&path, &ids, &table).unwrap();
        let (back_ids, back) = load_rank_csv(&path, Some(&ids)).unwrap();
        prop_assert_eq!(back_ids, ids);
        prop_assert_eq!(back, table);
    }

    #[test]
    fn arch_csv_round_trips(archs in prop::collection::vec(arch_strategy(), 0..20)) {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("a.csv");
        let set = ArchSet { ids: (0..archs.len()).map(|i| format!("x{i}")).collect(), archs };
        write_arch_csv(&path, &set).unwrap();
        prop_assert_eq!(load_arch_csv(&path).unwrap(), set);
    }
}

#[test]
fn saved_model_predicts_identically() {
    let bench = gen_synthetic(&BenchmarkSpec {
        n_train: 80,
        n_test: 50,
        tasks: BenchmarkSpec::task_names(3),
        seed: 5,
        noise_sigma: 0.1,
        scoring_family: ScoringFamily::QuadraticInteraction,
    })
    .unwrap();
    let dir = TempDir::new().unwrap();
    for (scheme, weight_mode, stop) in [
        (Scheme::Record, WeightMode::Semantic, 0.01),
        (Scheme::Gram, WeightMode::PaperLiteral, f64::INFINITY),
    ] {
        let cfg = PipelineConfig {
            dim: 3000,
            seed: 99,
            scheme,
            train: TrainConfig {
                weight_mode,
                stop_threshold: stop,
                ..TrainConfig::default()
            },
        };
        let fitted = fit(&bench.train, &cfg).unwrap();
        let path = dir.path().join(format!("{scheme}.bin"));
        save_model(&path, &fitted.model).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded, fitted.model);
        let a = fitted
            .model
            .predictor()
            .unwrap()
            .similarities(&bench.test.archs.archs)
            .unwrap();
        let b = loaded
            .predictor()
            .unwrap()
            .similarities(&bench.test.archs.archs)
            .unwrap();
        assert_eq!(a, b);
    }
}

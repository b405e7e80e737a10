//! Command-line front end: `gen-synth`, `train`, `predict`, `eval`, `sweep`.
//!
//! Every command is deterministic given its flags. Outputs that are not
//! self-describing get a `<file>.meta.json` sidecar holding the resolved
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dataset::{
    gen_synthetic, load_arch_csv, load_labeled, load_rank_csv, write_benchmark, write_json, write_pred_csv, Benchmark,
    BenchmarkFiles, BenchmarkSpec, ScoringFamily,
};
use crate::encode::Scheme;
use crate::error::{Error, Result};
use crate::eval::{dim_sweep, random_baseline, score};
use crate::model::{load_model, save_model};
use crate::pipeline::{fit, PipelineConfig, DEFAULT_DIM, DEFAULT_SEED};
use crate::rank::{similarities_to_ranks, TrainConfig, WeightMode};

#[derive(Debug, Parser)]
#[command(
    name = "hdrank",
    version,
    about = "Rank neural architectures with a hyperdimensional surrogate"
)]
pub struct Cli {
    /// Worker threads for data-parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic benchmark (train/test architectures and ranks).
    GenSynth(GenSynthArgs),
    /// Encode, train and retrain on a labelled architecture set.
    Train(TrainArgs),
    /// Rank architectures with a trained model.
    Predict(PredictArgs),
    /// Score predicted ranks against ground truth with Kendall tau.
    Eval(EvalArgs),
    /// Run the full pipeline at several hypervector dimensions.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub n_train: usize,
    #[arg(long, default_value_t = 5_000)]
    pub n_test: usize,
    /// Number of tasks, named task_1..task_N.
    #[arg(long, default_value_t = 8)]
    pub tasks: usize,
    #[arg(long = "seed", default_value_t = 7)]
    pub bench_seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, value_enum, default_value_t = ScoringFamily::AdditiveLinear)]
    pub scoring: ScoringFamily,
}

impl SynthArgs {
    pub fn spec(&self) -> BenchmarkSpec {
        BenchmarkSpec {
            n_train: self.n_train,
            n_test: self.n_test,
            tasks: BenchmarkSpec::task_names(self.tasks),
            seed: self.bench_seed,
            noise_sigma: self.noise_sigma,
            scoring_family: self.scoring,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenSynthArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    #[arg(long, default_value_t = DEFAULT_DIM)]
    pub dim: usize,
    /// Item-memory seed.
    #[arg(long = "hv-seed", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Scheme::Record)]
    pub scheme: Scheme,
    #[arg(long, value_enum, default_value_t = WeightMode::Semantic)]
    pub weight_mode: WeightMode,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.8)]
    pub decay: f64,
    #[arg(long, default_value_t = 10)]
    pub retrain_epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    pub stop_threshold: f64,
    /// Skip retraining (same as --retrain-epochs 0).
    #[arg(long)]
    pub no_retrain: bool,
}

impl PipelineArgs {
    pub fn config(&self) -> Result<PipelineConfig> {
        let cfg = PipelineConfig {
            dim: self.dim,
            seed: self.seed,
            scheme: self.scheme,
            train: TrainConfig {
                gamma0: self.gamma,
                mu: self.mu,
                weight_mode: self.weight_mode,
                retrain_max_epochs: if self.no_retrain { 0 } else { self.retrain_epochs },
                decay: self.decay,
                stop_threshold: self.stop_threshold,
            },
        };
        if cfg.dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        cfg.train.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub archs: PathBuf,
    #[arg(long)]
    pub ranks: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub archs: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the raw similarity table to this path.
    #[arg(long)]
    pub emit_sims: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// `task,tau` report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Full JSON report including the random baseline.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub baseline_trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Comma-separated hypervector dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Directory written by `gen-synth`; when absent a benchmark is generated
    /// from the synthetic flags.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[command(flatten)]
    pub synth: SynthArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
}

fn ensure_writable(path: &Path, force: bool) -> Result<()> {
    if !force && path.exists() {
        return Err(Error::OutputExists(path.to_path_buf()));
    }
    Ok(())
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct Provenance<'a, A: Serialize> {
    command: &'static str,
    args: &'a A,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a PipelineConfig>,
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidConfig("--threads must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already initialized: {e}");
        }
    }
    match cli.command {
        Command::GenSynth(a) => cmd_gen_synth(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    }
}

pub fn cmd_gen_synth(args: &GenSynthArgs) -> Result<()> {
    let spec = args.synth.spec();
    spec.validate()?;
    let files = BenchmarkFiles::in_dir(&args.out_dir);
    for p in files.all() {
        ensure_writable(p, args.force)?;
    }
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let bench = gen_synthetic(&spec)?;
    write_benchmark(&bench, &files, args)?;
    println!(
        "wrote {} train / {} test architectures over {} tasks to {}",
        spec.n_train,
        spec.n_test,
        spec.tasks.len(),
        args.out_dir.display()
    );
    Ok(())
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = args.pipeline.config()?;
    ensure_writable(&args.out, args.force)?;
    let data = load_labeled(&args.archs, &args.ranks)?;
    let fitted = fit(&data, &cfg)?;
    for e in &fitted.model.retrain_trace {
        let per_task: Vec<String> = e
            .mean_abs_dw
            .iter()
            .map(|m| m.map_or_else(|| "-".to_string(), |v| format!("{v:.5}")))
            .collect();
        println!(
            "epoch {:>2}  lr {:.4}  mean|dw| {}  [{}]",
            e.epoch,
            e.learning_rate,
            e.overall().map_or_else(|| "-".to_string(), |v| format!("{v:.5}")),
            per_task.join(" ")
        );
    }
    save_model(&args.out, &fitted.model)?;
    println!(
        "trained {} scheme, dim {}, {} tasks on {} architectures -> {}",
        cfg.scheme,
        cfg.dim,
        data.ranks.n_tasks(),
        data.archs.len(),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let meta = meta_path(&args.out);
    for p in [Some(&args.out), Some(&meta), args.emit_sims.as_ref()]
        .into_iter()
        .flatten()
    {
        ensure_writable(p, args.force)?;
    }
    let model = load_model(&args.model)?;
    let archs = load_arch_csv(&args.archs)?;
    let sims = model.predictor()?.similarities(&archs.archs)?;
    let ranks = similarities_to_ranks(&sims);
    write_pred_csv(&args.out, &archs.ids, &ranks)?;
    if let Some(path) = &args.emit_sims {
        let mut text = String::from("arch_id");
        for t in sims.task_names() {
            text.push(',');
            text.push_str(t);
        }
        text.push('\n');
        for (n, id) in archs.ids.iter().enumerate() {
            text.push_str(id);
            for col in sims.columns() {
                text.push_str(&format!(",{}", col[n]));
            }
            text.push('\n');
        }
        write_text(path, &text)?;
    }
    write_json(
        &meta,
        &Provenance {
            command: "predict",
            args,
            config: Some(&model.config),
        },
    )?;
    println!("ranked {} architectures -> {}", archs.len(), args.out.display());
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let meta = args.out.as_deref().map(meta_path);
    for p in [args.out.as_ref(), meta.as_ref(), args.json.as_ref()]
        .into_iter()
        .flatten()
    {
        ensure_writable(p, args.force)?;
    }
    let (pred_ids, pred) = load_rank_csv(&args.pred, None)?;
    let (truth_ids, truth) = load_rank_csv(&args.truth, None)?;
    if pred_ids != truth_ids {
        return Err(Error::Format {
            path: args.pred.clone(),
            message: "architecture ids differ from the ground-truth file".into(),
        });
    }
    let report = score(&pred, &truth)?;
    print!("{}", report.to_table());
    let baseline = if args.baseline_trials > 0 {
        let b = random_baseline(&truth, args.baseline_trials, args.seed)?;
        match b.band_3sigma {
            Some(band) => println!(
                "random baseline over {} trials: mean {:.4}, 3-sigma band ±{:.4} (theory ±{:.4})",
                b.trials,
                b.mean,
                band,
                3.0 * b.theoretical_std
            ),
            None => println!(
                "random baseline over 1 trial: tau {:.4}, spread undefined (theory ±{:.4})",
                b.mean,
                3.0 * b.theoretical_std
            ),
        }
        Some(b)
    } else {
        None
    };
    if let (Some(path), Some(meta)) = (&args.out, &meta) {
        write_text(path, &report.to_csv())?;
        write_json(
            meta,
            &Provenance {
                command: "eval",
                args,
                config: None,
            },
        )?;
    }
    if let Some(path) = &args.json {
        #[derive(Serialize)]
        struct Full<'a> {
            args: &'a EvalArgs,
            report: &'a crate::eval::TauReport,
            baseline: Option<crate::eval::BaselineSummary>,
        }
        write_json(
            path,
            &Full {
                args,
                report: &report,
                baseline,
            },
        )?;
    }
    Ok(())
}

fn sweep_benchmark(args: &SweepArgs) -> Result<Benchmark> {
    match &args.data_dir {
        Some(dir) => {
            let files = BenchmarkFiles::in_dir(dir);
            let train = load_labeled(&files.train_archs, &files.train_ranks)?;
            let test = load_labeled(&files.test_archs, &files.test_ranks)?;
            // The scorer is not needed for sweeping; keep the spec consistent
            // with what was loaded.
            let spec = BenchmarkSpec {
                n_train: train.archs.len(),
                n_test: test.archs.len(),
                tasks: train.ranks.task_names().to_vec(),
                ..args.synth.spec()
            };
            let scorer = crate::dataset::HiddenScorer {
                family: spec.scoring_family,
                noise_sigma: spec.noise_sigma,
                tasks: Vec::new(),
            };
            Ok(Benchmark {
                spec,
                train,
                test,
                scorer,
            })
        }
        None => gen_synthetic(&args.synth.spec()),
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let meta = args.out.as_deref().map(meta_path);
    for p in [args.out.as_ref(), meta.as_ref()].into_iter().flatten() {
        ensure_writable(p, args.force)?;
    }
    let cfg = args.pipeline.config()?;
    let bench = sweep_benchmark(args)?;
    let result = dim_sweep(&args.dims, &bench, &cfg, args.repeats)?;
    print!("{}", result.to_table());
    if let (Some(p), Some(meta)) = (&args.out, &meta) {
        write_text(p, &result.to_csv())?;
        write_json(
            meta,
            &Provenance {
                command: "sweep",
                args,
                config: Some(&cfg),
            },
        )?;
    }
    Ok(())
}

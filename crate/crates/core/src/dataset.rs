//! CSV ingestion and the synthetic benchmark generator.
//!
//! Architecture files use a fixed 12-layer layout, zero-padded past `depth`:
//!
//! ```text
//! arch_id,depth,head_1,...,head_12,mlp_1,...,mlp_12
//! a0,10,2,1,3,1,1,2,3,3,1,2,0,0,1,1,2,3,3,2,1,1,2,3,0,0
//! ```
//!
//! Rank files carry one column per task, rank 0 being best:
//!
//! ```text
//! arch_id,task_1,task_2
//! a0,4,0
//! ```

use std::collections::HashSet;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::encode::{ArchDescriptor, LayerParams, MAX_DEPTH, MIN_DEPTH, NUM_CODES};
use crate::error::{Error, Result};
use crate::hv::keyed_rng;
use crate::rank::{check_permutation, check_unique_names, similarity_column_ranks, RankTable};

pub const ARCH_ID_COLUMN: &str = "arch_id";

/// Architectures with their identifiers, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArchSet {
    pub ids: Vec<String>,
    pub archs: Vec<ArchDescriptor>,
}

impl ArchSet {
    pub fn len(&self) -> usize {
        self.archs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.archs.is_empty()
    }
}

/// Architectures together with their ground-truth ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub archs: ArchSet,
    pub ranks: RankTable,
}

pub fn arch_header() -> Vec<String> {
    let mut h = vec![ARCH_ID_COLUMN.to_string(), "depth".to_string()];
    h.extend((1..=MAX_DEPTH).map(|i| format!("head_{i}")));
    h.extend((1..=MAX_DEPTH).map(|i| format!("mlp_{i}")));
    h
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path, err: csv::Error) -> Error {
    let row = err.position().map_or(0, |p| p.line() as usize);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::Parse {
            path: path.to_path_buf(),
            row,
            message: format!("{other:?}"),
        },
    }
}

fn parse_err(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

fn headers(path: &Path, reader: &mut csv::Reader<File>) -> Result<Vec<String>> {
    Ok(reader
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect())
}

pub fn load_arch_csv(path: impl AsRef<Path>) -> Result<ArchSet> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let header = headers(path, &mut reader)?;
    if header != arch_header() {
        return Err(parse_err(
            path,
            1,
            format!("expected header `{}`", arch_header().join(",")),
        ));
    }
    let mut set = ArchSet::default();
    let mut ids = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<u8> {
            let raw = &record[i];
            raw.parse::<u8>()
                .map_err(|_| parse_err(path, line, format!("{}: cannot parse {raw:?} as a code", header[i])))
        };
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(parse_err(path, line, "empty arch_id"));
        }
        if !ids.insert(id.clone()) {
            return Err(parse_err(path, line, format!("duplicate arch_id {id:?}")));
        }
        let depth = field(1)? as usize;
        if !(MIN_DEPTH..=MAX_DEPTH).contains(&depth) {
            return Err(parse_err(
                path,
                line,
                format!("depth: {depth} outside {MIN_DEPTH}..={MAX_DEPTH}"),
            ));
        }
        let mut layers = Vec::with_capacity(depth);
        for i in 0..MAX_DEPTH {
            let (hcol, mcol) = (2 + i, 2 + MAX_DEPTH + i);
            let (h, m) = (field(hcol)?, field(mcol)?);
            if i < depth {
                for (col, code) in [(hcol, h), (mcol, m)] {
                    if !(1..=NUM_CODES).contains(&code) {
                        return Err(parse_err(
                            path,
                            line,
                            format!("{}: code {code} outside 1..={NUM_CODES}", header[col]),
                        ));
                    }
                }
                layers.push(LayerParams::new(h, m)?);
            } else if h != 0 || m != 0 {
                return Err(parse_err(
                    path,
                    line,
                    format!("layer {} is beyond depth {depth} and must be zero-padded", i + 1),
                ));
            }
        }
        set.ids.push(id);
        set.archs.push(ArchDescriptor::new(layers)?);
    }
    Ok(set)
}

pub fn write_arch_csv(path: impl AsRef<Path>, set: &ArchSet) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(arch_header()).map_err(|e| csv_err(path, e))?;
    for (id, arch) in set.ids.iter().zip(&set.archs) {
        let mut row = vec![id.clone(), arch.depth().to_string()];
        let code = |i: usize, f: fn(&LayerParams) -> u8| arch.layers().get(i).map_or(0, f).to_string();
        row.extend((0..MAX_DEPTH).map(|i| code(i, LayerParams::head)));
        row.extend((0..MAX_DEPTH).map(|i| code(i, LayerParams::mlp)));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a rank file. When `expected_ids` is given, the file's ids must match
/// it exactly and in order.
pub fn load_rank_csv(path: impl AsRef<Path>, expected_ids: Option<&[String]>) -> Result<(Vec<String>, RankTable)> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let header = headers(path, &mut reader)?;
    if header.first().map(String::as_str) != Some(ARCH_ID_COLUMN) || header.len() < 2 {
        return Err(parse_err(path, 1, "expected header `arch_id,<task_1>,...`"));
    }
    let task_names = header[1..].to_vec();
    check_unique_names(&task_names).map_err(|e| parse_err(path, 1, e.to_string()))?;
    let mut ids = Vec::new();
    let mut columns = vec![Vec::new(); task_names.len()];
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        ids.push(record[0].to_string());
        for (t, col) in columns.iter_mut().enumerate() {
            let raw = &record[t + 1];
            let rank = raw
                .parse::<usize>()
                .map_err(|_| parse_err(path, line, format!("{}: cannot parse {raw:?} as a rank", task_names[t])))?;
            col.push(rank);
        }
    }
    if let Some(expected) = expected_ids {
        if expected.len() != ids.len() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("{} rows but the architecture file has {}", ids.len(), expected.len()),
            });
        }
        if let Some((i, (got, want))) = ids.iter().zip(expected).enumerate().find(|(_, (a, b))| a != b) {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!(
                    "row {}: arch_id {got:?} does not match architecture file id {want:?}",
                    i + 1
                ),
            });
        }
    }
    for (name, col) in task_names.iter().zip(&columns) {
        check_permutation(col).map_err(|msg| Error::Format {
            path: path.to_path_buf(),
            message: format!("task {name:?}: {msg}"),
        })?;
    }
    let table = RankTable::new(task_names, columns)?;
    Ok((ids, table))
}

/// Writes a rank table in the same layout [`load_rank_csv`] reads.
pub fn write_pred_csv(path: impl AsRef<Path>, ids: &[String], ranks: &RankTable) -> Result<()> {
    let path = path.as_ref();
    if ids.len() != ranks.n_archs() {
        return Err(Error::RowCountMismatch {
            expected: ranks.n_archs(),
            got: ids.len(),
        });
    }
    let mut w = csv_writer(path)?;
    let mut header = vec![ARCH_ID_COLUMN.to_string()];
    header.extend(ranks.task_names().iter().cloned());
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (n, id) in ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend((0..ranks.n_tasks()).map(|t| ranks.rank(n, t).to_string()));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_labeled(arch_path: impl AsRef<Path>, rank_path: impl AsRef<Path>) -> Result<LabeledSet> {
    let archs = load_arch_csv(arch_path)?;
    let (_, ranks) = load_rank_csv(rank_path, Some(&archs.ids))?;
    Ok(LabeledSet { archs, ranks })
}

pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    file.write_all(b"\n").map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScoringFamily {
    /// Sum of per-position head and mlp effects.
    AdditiveLinear,
    /// Additive effects plus pairwise terms between adjacent layers.
    QuadraticInteraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub tasks: Vec<String>,
    pub seed: u64,
    pub noise_sigma: f64,
    pub scoring_family: ScoringFamily,
}

impl BenchmarkSpec {
    /// Tasks named `task_1..task_{count}`.
    pub fn task_names(count: usize) -> Vec<String> {
        (1..=count).map(|i| format!("task_{i}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_train must be at least 2, got {}",
                self.n_train
            )));
        }
        if self.tasks.is_empty() {
            return Err(Error::InvalidConfig("at least one task is required".into()));
        }
        check_unique_names(&self.tasks).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Number of distinct architectures in the search space.
pub fn search_space_size() -> u128 {
    let per_layer = (NUM_CODES as u128) * (NUM_CODES as u128);
    (MIN_DEPTH..=MAX_DEPTH).map(|d| per_layer.pow(d as u32)).sum()
}

const PAIRS: usize = (NUM_CODES as usize) * (NUM_CODES as usize);
const INTERACTION_SCALE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScorer {
    pub name: String,
    /// `[layer][0 = head, 1 = mlp][code - 1]`.
    pub layer_terms: Vec<[[f64; 3]; 2]>,
    /// `[layer][pair_i * 9 + pair_{i+1}]` for adjacent layers; empty for the
    /// additive family.
    pub pair_terms: Vec<Vec<f64>>,
}

/// Hidden ground-truth scoring function of a synthetic benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenScorer {
    pub family: ScoringFamily,
    pub noise_sigma: f64,
    pub tasks: Vec<TaskScorer>,
}

impl HiddenScorer {
    pub fn generate(seed: u64, tasks: &[String], family: ScoringFamily, noise_sigma: f64) -> Self {
        let std_normal = Normal::new(0.0, 1.0).expect("valid normal");
        let tasks = tasks
            .iter()
            .map(|name| {
                let mut rng = keyed_rng(seed, &format!("bench/scorer/{name}"));
                let layer_terms = (0..MAX_DEPTH)
                    .map(|_| {
                        let mut t = [[0.0; 3]; 2];
                        for v in t.iter_mut().flatten() {
                            *v = std_normal.sample(&mut rng);
                        }
                        t
                    })
                    .collect();
                let pair_terms = match family {
                    ScoringFamily::AdditiveLinear => Vec::new(),
                    ScoringFamily::QuadraticInteraction => (0..MAX_DEPTH - 1)
                        .map(|_| {
                            (0..PAIRS * PAIRS)
                                .map(|_| INTERACTION_SCALE * std_normal.sample(&mut rng))
                                .collect()
                        })
                        .collect(),
                };
                TaskScorer {
                    name: name.clone(),
                    layer_terms,
                    pair_terms,
                }
            })
            .collect();
        Self {
            family,
            noise_sigma,
            tasks,
        }
    }

    /// Noise-free score of `arch` on task index `task`; higher is better.
    pub fn score(&self, task: usize, arch: &ArchDescriptor) -> f64 {
        let ts = &self.tasks[task];
        let layers = arch.layers();
        let mut s = 0.0;
        for (i, l) in layers.iter().enumerate() {
            s += ts.layer_terms[i][0][l.head() as usize - 1] + ts.layer_terms[i][1][l.mlp() as usize - 1];
        }
        if !ts.pair_terms.is_empty() {
            for (i, w) in layers.windows(2).enumerate() {
                s += ts.pair_terms[i][w[0].pair_index() * PAIRS + w[1].pair_index()];
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub spec: BenchmarkSpec,
    pub train: LabeledSet,
    pub test: LabeledSet,
    pub scorer: HiddenScorer,
}

fn sample_arch(rng: &mut impl Rng) -> ArchDescriptor {
    let depth = rng.random_range(MIN_DEPTH..=MAX_DEPTH);
    let layers = (0..depth)
        .map(|_| {
            LayerParams::new(rng.random_range(1..=NUM_CODES), rng.random_range(1..=NUM_CODES))
                .expect("sampled codes are in range")
        })
        .collect();
    ArchDescriptor::new(layers).expect("sampled depth is in range")
}

/// Generates a reproducible benchmark: unique uniformly sampled architectures,
/// hidden per-task scores plus Gaussian noise, and ranks by descending score
/// within each split (ties to the lower index).
pub fn gen_synthetic(spec: &BenchmarkSpec) -> Result<Benchmark> {
    spec.validate()?;
    let total = spec.n_train + spec.n_test;
    if total as u128 > search_space_size() {
        return Err(Error::Capacity(format!(
            "{total} architectures requested but the search space holds {}",
            search_space_size()
        )));
    }

    let mut rng = keyed_rng(spec.seed, "bench/archs");
    let mut seen = HashSet::with_capacity(total);
    let mut archs = Vec::with_capacity(total);
    while archs.len() < total {
        let a = sample_arch(&mut rng);
        if seen.insert(a.clone()) {
            archs.push(a);
        }
    }
    let test_archs = archs.split_off(spec.n_train);
    let train_archs = archs;

    let scorer = HiddenScorer::generate(spec.seed, &spec.tasks, spec.scoring_family, spec.noise_sigma);
    let noise = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");
    let mut noise_rngs: Vec<_> = spec
        .tasks
        .iter()
        .map(|t| keyed_rng(spec.seed, &format!("bench/noise/{t}")))
        .collect();

    let mut label = |archs: Vec<ArchDescriptor>, prefix: &str| -> Result<LabeledSet> {
        let columns = (0..spec.tasks.len())
            .map(|t| {
                let scores: Vec<f64> = archs
                    .iter()
                    .map(|a| {
                        let eps = if spec.noise_sigma > 0.0 {
                            noise.sample(&mut noise_rngs[t])
                        } else {
                            0.0
                        };
                        scorer.score(t, a) + eps
                    })
                    .collect();
                similarity_column_ranks(&scores)
            })
            .collect();
        let ids = (0..archs.len()).map(|i| format!("{prefix}{i}")).collect();
        Ok(LabeledSet {
            archs: ArchSet { ids, archs },
            ranks: RankTable::new(spec.tasks.clone(), columns)?,
        })
    };
    let train = label(train_archs, "train_")?;
    let test = label(test_archs, "test_")?;
    Ok(Benchmark {
        spec: spec.clone(),
        train,
        test,
        scorer,
    })
}

/// Paths of the files written by [`write_benchmark`].
#[derive(Debug, Clone)]
pub struct BenchmarkFiles {
    pub train_archs: PathBuf,
    pub train_ranks: PathBuf,
    pub test_archs: PathBuf,
    pub test_ranks: PathBuf,
    pub manifest: PathBuf,
}

impl BenchmarkFiles {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            train_archs: dir.join("train_archs.csv"),
            train_ranks: dir.join("train_ranks.csv"),
            test_archs: dir.join("test_archs.csv"),
            test_ranks: dir.join("test_ranks.csv"),
            manifest: dir.join("manifest.json"),
        }
    }

    pub fn all(&self) -> [&Path; 5] {
        [
            &self.train_archs,
            &self.train_ranks,
            &self.test_archs,
            &self.test_ranks,
            &self.manifest,
        ]
    }
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    format: &'static str,
    config: &'a C,
    spec: &'a BenchmarkSpec,
    scorer: &'a HiddenScorer,
}

/// Writes the four CSVs and a JSON manifest holding `config`, the spec and
/// the hidden scorer.
pub fn write_benchmark(bench: &Benchmark, files: &BenchmarkFiles, config: &impl Serialize) -> Result<()> {
    write_arch_csv(&files.train_archs, &bench.train.archs)?;
    write_pred_csv(&files.train_ranks, &bench.train.archs.ids, &bench.train.ranks)?;
    write_arch_csv(&files.test_archs, &bench.test.archs)?;
    write_pred_csv(&files.test_ranks, &bench.test.archs.ids, &bench.test.ranks)?;
    write_json(
        &files.manifest,
        &Manifest {
            format: "hdrank-benchmark/1",
            config,
            spec: &bench.spec,
            scorer: &bench.scorer,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn spec(n_train: usize, n_test: usize, sigma: f64) -> BenchmarkSpec {
        BenchmarkSpec {
            n_train,
            n_test,
            tasks: BenchmarkSpec::task_names(3),
            seed: 17,
            noise_sigma: sigma,
            scoring_family: ScoringFamily::AdditiveLinear,
        }
    }

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn arch_row(id: &str, depth: usize, heads: &[u8], mlps: &[u8]) -> String {
        let pad = |v: &[u8]| {
            (0..MAX_DEPTH)
                .map(|i| v.get(i).copied().unwrap_or(0).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{id},{depth},{},{}\n", pad(heads), pad(mlps))
    }

    #[test]
    fn loads_depth_twelve_row() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!(
            "{}\n{}",
            arch_header().join(","),
            arch_row("a0", 12, &[2, 1, 3, 1, 1, 2, 3, 3, 1, 2, 2, 1], &[1; 12])
        );
        let set = load_arch_csv(write(dir.path(), "a.csv", &body)).unwrap();
        assert_eq!(set.ids, vec!["a0"]);
        assert_eq!(set.archs[0].depth(), 12);
        assert_eq!(set.archs[0].layers()[2].head(), 3);
    }

    #[test]
    fn header_only_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let set = load_arch_csv(write(dir.path(), "a.csv", &format!("{}\n", arch_header().join(",")))).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn nonzero_padding_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!(
            "{}\n{}",
            arch_header().join(","),
            arch_row("a0", 10, &[1; 11], &[1; 10])
        );
        let err = load_arch_csv(write(dir.path(), "a.csv", &body)).unwrap_err();
        assert!(err.to_string().contains("zero-padded"), "{err}");
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn out_of_domain_code_names_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let mut mlps = [1u8; 12];
        mlps[3] = 4;
        let body = format!("{}\n{}", arch_header().join(","), arch_row("a0", 12, &[1; 12], &mlps));
        let err = load_arch_csv(write(dir.path(), "a.csv", &body)).unwrap_err();
        assert!(err.to_string().contains("mlp_4"), "{err}");
    }

    #[test]
    fn malformed_row_reports_row() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!(
            "{}\n{}a1,12,x\n",
            arch_header().join(","),
            arch_row("a0", 12, &[1; 12], &[1; 12])
        );
        let err = load_arch_csv(write(dir.path(), "a.csv", &body)).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 3, .. }), "{err}");
    }

    #[test]
    fn rank_file_validation() {
        let dir = tempfile::tempdir().unwrap();
        let ok = write(dir.path(), "ok.csv", "arch_id,t\na,2\nb,0\nc,1\n");
        let (ids, table) = load_rank_csv(&ok, None).unwrap();
        assert_eq!(ids, vec!["a", "b", "c"]);
        assert_eq!(table.column(0), &[2, 0, 1]);

        let dup = write(dir.path(), "dup.csv", "arch_id,t\na,0\nb,0\nc,1\n");
        let err = load_rank_csv(&dup, None).unwrap_err().to_string();
        assert!(err.contains("duplicate rank") && err.contains("\"t\""), "{err}");

        let oob = write(dir.path(), "oob.csv", "arch_id,t\na,0\nb,1\nc,3\n");
        assert!(load_rank_csv(&oob, None)
            .unwrap_err()
            .to_string()
            .contains("out of range"));

        let expected = vec!["a".to_string(), "x".to_string(), "c".to_string()];
        assert!(load_rank_csv(&ok, Some(&expected))
            .unwrap_err()
            .to_string()
            .contains("does not match"));
    }

    #[test]
    fn empty_prediction_file_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.csv");
        let table = RankTable::new(vec!["x".into(), "y".into()], vec![vec![], vec![]]).unwrap();
        write_pred_csv(&p, &[], &table).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "arch_id,x,y\n");
        let (_, back) = load_rank_csv(&p, None).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn generator_is_deterministic_and_unique() {
        let a = gen_synthetic(&spec(50, 200, 0.3)).unwrap();
        let b = gen_synthetic(&spec(50, 200, 0.3)).unwrap();
        assert_eq!(a, b);
        let all: HashSet<_> = a.train.archs.archs.iter().chain(&a.test.archs.archs).collect();
        assert_eq!(all.len(), 250);
    }

    #[test]
    fn noiseless_ranks_match_brute_force_scoring() {
        let bench = gen_synthetic(&spec(30, 120, 0.0)).unwrap();
        for set in [&bench.train, &bench.test] {
            for t in 0..3 {
                let scores: Vec<f64> = set.archs.archs.iter().map(|a| bench.scorer.score(t, a)).collect();
                for (i, &s) in scores.iter().enumerate() {
                    let better = scores
                        .iter()
                        .enumerate()
                        .filter(|&(j, &o)| o > s || (o == s && j < i))
                        .count();
                    assert_eq!(set.ranks.rank(i, t), better);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(gen_synthetic(&spec(1, 10, 0.0)).is_err());
        let mut s = spec(10, 10, 0.0);
        s.tasks = vec!["a".into(), "a".into()];
        assert!(gen_synthetic(&s).is_err());
        assert_eq!(search_space_size(), 317_297_380_491);
    }

    #[test]
    fn benchmark_files_reload() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec(20, 30, 0.1);
        s.scoring_family = ScoringFamily::QuadraticInteraction;
        let bench = gen_synthetic(&s).unwrap();
        let files = BenchmarkFiles::in_dir(dir.path());
        write_benchmark(&bench, &files, &s).unwrap();
        assert_eq!(
            load_labeled(&files.train_archs, &files.train_ranks).unwrap(),
            bench.train
        );
        assert_eq!(load_labeled(&files.test_archs, &files.test_ranks).unwrap(), bench.test);
    }
}

//! Kendall tau scoring, a random-ranker baseline and the dimension sweep.
//!
//! All rankings reaching this module are strict permutations (ground truth is
//! validated on load and predicted ranks break ties by index), so the plain
//! `(n_c − n_d) / (n(n−1)/2)` coefficient is used without tie correction.

use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::Benchmark;
use crate::error::{Error, Result};
use crate::hv::keyed_rng;
use crate::pipeline::{fit, PipelineConfig};
use crate::rank::{check_permutation, RankTable};

fn check_pair(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::RowCountMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidRanks(format!(
            "kendall tau needs n >= 2, got {}",
            a.len()
        )));
    }
    for side in [a, b] {
        check_permutation(side).map_err(Error::InvalidRanks)?;
    }
    Ok(())
}

fn pair_count(n: usize) -> u64 {
    (n as u64) * (n as u64 - 1) / 2
}

/// Kendall tau between two rank permutations in `O(n log n)`.
///
/// Orders `b` by `a` and counts inversions with a bottom-up merge sort; each
/// inversion is a discordant pair.
pub fn kendall_tau(a: &[usize], b: &[usize]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len();
    let mut seq = vec![0usize; n];
    for (&ra, &rb) in a.iter().zip(b) {
        seq[ra] = rb;
    }
    let discordant = count_inversions(&mut seq);
    let total = pair_count(n);
    Ok((total as f64 - 2.0 * discordant as f64) / total as f64)
}

fn count_inversions(seq: &mut [usize]) -> u64 {
    let n = seq.len();
    let mut buf = vec![0usize; n];
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        for start in (0..n).step_by(2 * width) {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if seq[i] <= seq[j] {
                    buf[k] = seq[i];
                    i += 1;
                } else {
                    buf[k] = seq[j];
                    inversions += (mid - i) as u64;
                    j += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&seq[i..mid]);
            k += mid - i;
            buf[k..k + (end - j)].copy_from_slice(&seq[j..end]);
        }
        seq.copy_from_slice(&buf);
        width *= 2;
    }
    inversions
}

/// Reference `O(n²)` Kendall tau by direct pair counting.
pub fn kendall_tau_pairwise(a: &[usize], b: &[usize]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let s = (a[i] as i64 - a[j] as i64).signum() * (b[i] as i64 - b[j] as i64).signum();
            if s > 0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    Ok((concordant - discordant) as f64 / pair_count(n) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauReport {
    pub tasks: Vec<String>,
    pub per_task: Vec<f64>,
    pub average: f64,
}

impl TauReport {
    /// `Average` followed by one column per task.
    pub fn to_table(&self) -> String {
        let mut names = vec!["Average".to_string()];
        names.extend(self.tasks.iter().cloned());
        let mut values = vec![self.average];
        values.extend(&self.per_task);
        let widths: Vec<usize> = names.iter().map(|n| n.len().max(7)).collect();
        let head: Vec<String> = names.iter().zip(&widths).map(|(n, w)| format!("{n:>w$}")).collect();
        let row: Vec<String> = values.iter().zip(&widths).map(|(v, w)| format!("{v:>w$.4}")).collect();
        format!("{}\n{}\n", head.join("  "), row.join("  "))
    }

    /// Machine-readable `task,tau` rows followed by an `average` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("task,tau\n");
        for (t, v) in self.tasks.iter().zip(&self.per_task) {
            out.push_str(&format!("{t},{v}\n"));
        }
        out.push_str(&format!("average,{}\n", self.average));
        out
    }
}

/// Per-task Kendall tau between predicted and true ranks, matching tasks by
/// name and reporting them in `pred`'s order.
pub fn score(pred: &RankTable, truth: &RankTable) -> Result<TauReport> {
    if pred.n_archs() != truth.n_archs() {
        return Err(Error::RowCountMismatch {
            expected: truth.n_archs(),
            got: pred.n_archs(),
        });
    }
    if pred.n_tasks() != truth.n_tasks() || pred.n_tasks() == 0 {
        return Err(Error::InvalidRanks(format!(
            "prediction has {} tasks, truth has {}",
            pred.n_tasks(),
            truth.n_tasks()
        )));
    }
    let mut per_task = Vec::with_capacity(pred.n_tasks());
    for (t, name) in pred.task_names().iter().enumerate() {
        let u = truth
            .task_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidRanks(format!("task {name:?} missing from ground truth")))?;
        per_task.push(kendall_tau(pred.column(t), truth.column(u))?);
    }
    let average = per_task.iter().sum::<f64>() / per_task.len() as f64;
    Ok(TauReport {
        tasks: pred.task_names().to_vec(),
        per_task,
        average,
    })
}

/// Distribution of tau for uniformly random rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub trials: usize,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` with a single trial.
    pub std: Option<f64>,
    /// Three sample standard deviations; `None` with a single trial.
    pub band_3sigma: Option<f64>,
    /// `sqrt(2(2n+5) / (9n(n−1)))`, the null-hypothesis standard deviation.
    pub theoretical_std: f64,
}

/// Theoretical standard deviation of Kendall tau between independent random
/// permutations of length `n`.
pub fn null_tau_std(n: usize) -> f64 {
    let n = n as f64;
    (2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0))).sqrt()
}

/// Scores `trials` uniformly random permutations against the truth; trial `k`
/// is compared with task column `k mod T`.
pub fn random_baseline(truth: &RankTable, trials: usize, seed: u64) -> Result<BaselineSummary> {
    if trials == 0 {
        return Err(Error::InvalidConfig("baseline needs at least one trial".into()));
    }
    if truth.n_tasks() == 0 {
        return Err(Error::InvalidRanks("baseline needs at least one task".into()));
    }
    let n = truth.n_archs();
    let mut rng = keyed_rng(seed, "eval/random-baseline");
    let mut perm: Vec<usize> = (0..n).collect();
    let samples = (0..trials)
        .map(|k| {
            perm.shuffle(&mut rng);
            kendall_tau(&perm, truth.column(k % truth.n_tasks()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = samples.iter().sum::<f64>() / trials as f64;
    let std = (trials > 1).then(|| {
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        var.sqrt()
    });
    Ok(BaselineSummary {
        trials,
        n,
        mean,
        std,
        band_3sigma: std.map(|s| 3.0 * s),
        theoretical_std: null_tau_std(n),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dim: usize,
    pub average_tau: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_table(&self) -> String {
        let mut out = format!("{:>10}  {:>11}  {:>10}\n", "dim", "average_tau", "wall_s");
        for r in &self.rows {
            out.push_str(&format!(
                "{:>10}  {:>11.4}  {:>10.3}\n",
                r.dim, r.average_tau, r.wall_seconds
            ));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,average_tau,wall_seconds\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.dim, r.average_tau, r.wall_seconds));
        }
        out
    }
}

/// Runs fit → predict → score on `bench` once per dimension.
///
/// `dims` is sorted and deduplicated. With `repeats > 1` each row averages the
/// runs seeded `base.seed, base.seed + 1, ...`.
pub fn dim_sweep(dims: &[usize], bench: &Benchmark, base: &PipelineConfig, repeats: usize) -> Result<SweepResult> {
    if dims.is_empty() {
        return Err(Error::InvalidConfig(
            "dimension sweep needs at least one dimension".into(),
        ));
    }
    if let Some(&bad) = dims.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidDimension(bad));
    }
    let repeats = repeats.max(1);
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    dims.dedup();

    let mut rows = Vec::with_capacity(dims.len());
    for dim in dims {
        let start = Instant::now();
        let mut total = 0.0;
        for r in 0..repeats {
            let cfg = PipelineConfig {
                dim,
                seed: base.seed.wrapping_add(r as u64),
                ..*base
            };
            let fitted = fit(&bench.train, &cfg)?;
            let pred = fitted.model.predictor()?.rank(&bench.test.archs.archs)?;
            total += score(&pred, &bench.test.ranks)?.average;
        }
        let row = SweepRow {
            dim,
            average_tau: total / repeats as f64,
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        log::info!(
            "sweep dim {} -> tau {:.4} in {:.2}s",
            row.dim,
            row.average_tau,
            row.wall_seconds
        );
        rows.push(row);
    }
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_synthetic, BenchmarkSpec, ScoringFamily};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm_strategy() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (2usize..120).prop_flat_map(|n| {
            let base: Vec<usize> = (0..n).collect();
            (Just(base.clone()).prop_shuffle(), Just(base).prop_shuffle())
        })
    }

    #[test]
    fn tau_examples() {
        let a = [0, 1, 2, 3];
        assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        assert_eq!(kendall_tau(&a, &[3, 2, 1, 0]).unwrap(), -1.0);
        assert_eq!(kendall_tau(&a, &[0, 2, 1, 3]).unwrap(), 2.0 / 3.0);
        assert_eq!(kendall_tau_pairwise(&a, &[0, 2, 1, 3]).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn tau_errors() {
        assert!(kendall_tau(&[0, 1], &[0, 1, 2]).is_err());
        assert!(kendall_tau(&[0], &[0]).is_err());
        assert!(kendall_tau(&[0, 0], &[0, 1]).is_err());
        assert!(kendall_tau(&[0, 2], &[0, 1]).is_err());
    }

    proptest! {
        #[test]
        fn fast_matches_pairwise((a, b) in perm_strategy()) {
            prop_assert_eq!(kendall_tau(&a, &b).unwrap(), kendall_tau_pairwise(&a, &b).unwrap());
        }

        #[test]
        fn tau_is_symmetric_and_relabel_invariant((a, b) in perm_strategy(), seed in any::<u64>()) {
            let t = kendall_tau(&a, &b).unwrap();
            prop_assert_eq!(t, kendall_tau(&b, &a).unwrap());
            prop_assert!((-1.0..=1.0).contains(&t));
            let mut order: Vec<usize> = (0..a.len()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let a2: Vec<usize> = order.iter().map(|&i| a[i]).collect();
            let b2: Vec<usize> = order.iter().map(|&i| b[i]).collect();
            prop_assert_eq!(t, kendall_tau(&a2, &b2).unwrap());
        }
    }

    fn table(cols: Vec<Vec<usize>>) -> RankTable {
        let names = (0..cols.len()).map(|i| format!("t{i}")).collect();
        RankTable::new(names, cols).unwrap()
    }

    #[test]
    fn score_examples() {
        let truth = table(vec![vec![0, 1, 2, 3], vec![3, 2, 1, 0]]);
        let r = score(&truth, &truth).unwrap();
        assert_eq!(r.per_task, vec![1.0, 1.0]);
        assert_eq!(r.average, 1.0);

        let single = table(vec![vec![0, 2, 1, 3]]);
        let r = score(&single, &table(vec![vec![0, 1, 2, 3]])).unwrap();
        assert_eq!(r.average, r.per_task[0]);

        assert!(score(&table(vec![vec![0, 1]]), &truth).is_err());
    }

    #[test]
    fn score_reports_in_prediction_order() {
        let truth = RankTable::new(vec!["a".into(), "b".into()], vec![vec![0, 1, 2], vec![2, 1, 0]]).unwrap();
        let pred = RankTable::new(vec!["b".into(), "a".into()], vec![vec![2, 1, 0], vec![0, 1, 2]]).unwrap();
        let r = score(&pred, &truth).unwrap();
        assert_eq!(r.tasks, vec!["b", "a"]);
        assert_eq!(r.per_task, vec![1.0, 1.0]);
        assert!(r.to_csv().starts_with("task,tau\nb,1\na,1\naverage,1\n"));
    }

    #[test]
    fn baseline_small_cases() {
        let truth = table(vec![vec![1, 0]]);
        let one = random_baseline(&truth, 1, 3).unwrap();
        assert_eq!(one.std, None);
        assert!(one.mean == 1.0 || one.mean == -1.0);
        let many = random_baseline(&truth, 50, 3).unwrap();
        assert!(many.std.is_some());
        assert!(random_baseline(&truth, 0, 3).is_err());
    }

    #[test]
    fn baseline_matches_theory_at_5000() {
        let n = 5_000;
        let truth = table(vec![(0..n).collect()]);
        let s = random_baseline(&truth, 100, 11).unwrap();
        assert!((s.theoretical_std - 0.00943).abs() < 1e-4, "{}", s.theoretical_std);
        assert!(s.mean.abs() < 0.01, "mean {}", s.mean);
        let std = s.std.unwrap();
        assert!((std - s.theoretical_std).abs() < 0.3 * s.theoretical_std, "std {std}");
    }

    #[test]
    fn sweep_rows_sorted_with_times() {
        let bench = gen_synthetic(&BenchmarkSpec {
            n_train: 60,
            n_test: 200,
            tasks: BenchmarkSpec::task_names(2),
            seed: 1,
            noise_sigma: 0.0,
            scoring_family: ScoringFamily::AdditiveLinear,
        })
        .unwrap();
        let base = PipelineConfig::default();
        let r = dim_sweep(&[2_000, 500, 2_000], &bench, &base, 1).unwrap();
        assert_eq!(r.rows.iter().map(|r| r.dim).collect::<Vec<_>>(), vec![500, 2_000]);
        assert!(r
            .rows
            .iter()
            .all(|r| r.wall_seconds >= 0.0 && (-1.0..=1.0).contains(&r.average_tau)));
        assert!(dim_sweep(&[], &bench, &base, 1).is_err());
        assert!(dim_sweep(&[0], &bench, &base, 1).is_err());
    }
}

//! Rank tables, rank → weight conversion, associative-memory training,
//! similarity-based prediction and weight-difference retraining.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::{axpy, cosine_with_norms, dot, Hypervector};

/// Elements per work unit when accumulating along the vector dimension.
const ACCUMULATE_CHUNK: usize = 4096;

/// Per-task rank permutations over a set of architectures; rank 0 is best.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    task_names: Vec<String>,
    n_archs: usize,
    columns: Vec<Vec<usize>>,
}

impl RankTable {
    /// Validates that task names are unique and every column is a
    /// permutation of `0..n`.
    pub fn new(task_names: Vec<String>, columns: Vec<Vec<usize>>) -> Result<Self> {
        if task_names.len() != columns.len() {
            return Err(Error::InvalidRanks(format!(
                "{} task names but {} columns",
                task_names.len(),
                columns.len()
            )));
        }
        check_unique_names(&task_names)?;
        let n_archs = columns.first().map_or(0, Vec::len);
        for (name, col) in task_names.iter().zip(&columns) {
            if col.len() != n_archs {
                return Err(Error::InvalidRanks(format!(
                    "task {name:?} has {} ranks, expected {n_archs}",
                    col.len()
                )));
            }
            check_permutation(col).map_err(|msg| Error::InvalidRanks(format!("task {name:?}: {msg}")))?;
        }
        Ok(Self {
            task_names,
            n_archs,
            columns,
        })
    }

    /// Builds a table from row-major ranks (`rows[n][t]`).
    pub fn from_rows(task_names: Vec<String>, rows: &[Vec<usize>]) -> Result<Self> {
        let t = task_names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); t];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != t {
                return Err(Error::InvalidRanks(format!(
                    "row {i} has {} entries, expected {t}",
                    row.len()
                )));
            }
            for (col, &r) in columns.iter_mut().zip(row) {
                col.push(r);
            }
        }
        if t == 0 {
            // No columns to carry the row count.
            return Ok(Self {
                task_names,
                n_archs: rows.len(),
                columns,
            });
        }
        Self::new(task_names, columns)
    }

    pub fn task_names(&self) -> &[String] {
        &self.task_names
    }

    pub fn n_archs(&self) -> usize {
        self.n_archs
    }

    pub fn n_tasks(&self) -> usize {
        self.task_names.len()
    }

    pub fn column(&self, task: usize) -> &[usize] {
        &self.columns[task]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn rank(&self, arch: usize, task: usize) -> usize {
        self.columns[task][arch]
    }
}

pub(crate) fn check_unique_names(names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::InvalidRanks(format!("duplicate task name {name:?}")));
        }
    }
    Ok(())
}

/// Checks that `col` is a permutation of `0..col.len()`.
pub(crate) fn check_permutation(col: &[usize]) -> std::result::Result<(), String> {
    let n = col.len();
    let mut seen = vec![false; n];
    for &r in col {
        if r >= n {
            return Err(format!("rank {r} out of range 0..{n}"));
        }
        if std::mem::replace(&mut seen[r], true) {
            return Err(format!("duplicate rank {r}"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// `μ(2/(r̂+1) − 1)` with `r̂ = 2r/(N−1)`: best → `+μ`, median → 0,
    /// worst → `−μ/3`.
    Semantic,
    /// `μ(1 − 2/(r+1))` on the raw rank: best → `−μ`, increasing toward `+μ`.
    PaperLiteral,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Semantic => "semantic",
            WeightMode::PaperLiteral => "paper-literal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    mode: WeightMode,
    mu: f64,
    columns: Vec<Vec<f64>>,
}

impl WeightTable {
    pub fn from_columns(mode: WeightMode, mu: f64, columns: Vec<Vec<f64>>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidRanks("ragged weight columns".into()));
        }
        Ok(Self { mode, mu, columns })
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_tasks(&self) -> usize {
        self.columns.len()
    }

    pub fn n_archs(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, task: usize) -> &[f64] {
        &self.columns[task]
    }
}

/// Weight of a single rank `r` among `n` architectures.
pub fn rank_weight(rank: usize, n: usize, mu: f64, mode: WeightMode) -> f64 {
    match mode {
        WeightMode::PaperLiteral => mu * (1.0 - 2.0 / (rank as f64 + 1.0)),
        WeightMode::Semantic => {
            let scaled = 2.0 * rank as f64 / (n as f64 - 1.0);
            mu * (2.0 / (scaled + 1.0) - 1.0)
        }
    }
}

fn column_weights(ranks: &[usize], mu: f64, mode: WeightMode) -> Vec<f64> {
    let n = ranks.len();
    ranks.iter().map(|&r| rank_weight(r, n, mu, mode)).collect()
}

pub fn ranks_to_weights(ranks: &RankTable, mu: f64, mode: WeightMode) -> Result<WeightTable> {
    if mode == WeightMode::Semantic && ranks.n_archs() < 2 {
        return Err(Error::InvalidRanks(format!(
            "semantic weights need at least 2 architectures, got {}",
            ranks.n_archs()
        )));
    }
    let columns = ranks.columns().iter().map(|c| column_weights(c, mu, mode)).collect();
    Ok(WeightTable { mode, mu, columns })
}

mod serde_threshold {
    //! JSON has no infinity; an unbounded threshold is stored as `null`.
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Learning rate for the training pass and the first retraining epoch.
    pub gamma0: f64,
    pub mu: f64,
    pub weight_mode: WeightMode,
    pub retrain_max_epochs: usize,
    /// Multiplicative learning-rate decay per retraining epoch.
    pub decay: f64,
    /// A task stops retraining once its mean `|Δw|` drops below this.
    #[serde(with = "serde_threshold")]
    pub stop_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            gamma0: 1.0,
            mu: 1.0,
            weight_mode: WeightMode::Semantic,
            retrain_max_epochs: 10,
            decay: 0.8,
            stop_threshold: 0.01,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma must be > 0, got {}", self.gamma0)));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "decay must be in (0, 1], got {}",
                self.decay
            )));
        }
        if self.stop_threshold.is_nan() || self.stop_threshold < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "stop threshold must be >= 0, got {}",
                self.stop_threshold
            )));
        }
        if !self.mu.is_finite() || self.mu <= 0.0 {
            return Err(Error::InvalidConfig(format!("mu must be > 0, got {}", self.mu)));
        }
        Ok(())
    }
}

/// One uncapped accumulator hypervector per task.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociativeMemory {
    dim: usize,
    task_names: Vec<String>,
    task_hvs: Vec<Hypervector>,
}

impl AssociativeMemory {
    /// All task vectors start at zero.
    pub fn zeroed(dim: usize, task_names: Vec<String>) -> Result<Self> {
        check_unique_names(&task_names)?;
        let task_hvs = task_names
            .iter()
            .map(|_| Hypervector::zeros(dim))
            .collect::<Result<_>>()?;
        Ok(Self {
            dim,
            task_names,
            task_hvs,
        })
    }

    pub fn from_parts(task_names: Vec<String>, task_hvs: Vec<Hypervector>) -> Result<Self> {
        check_unique_names(&task_names)?;
        if task_names.len() != task_hvs.len() {
            return Err(Error::InvalidConfig(format!(
                "{} task names but {} task vectors",
                task_names.len(),
                task_hvs.len()
            )));
        }
        let dim = task_hvs
            .first()
            .map(Hypervector::dim)
            .ok_or_else(|| Error::InvalidConfig("associative memory needs at least one task".into()))?;
        if let Some(bad) = task_hvs.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            task_names,
            task_hvs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn task_names(&self) -> &[String] {
        &self.task_names
    }

    pub fn task_hvs(&self) -> &[Hypervector] {
        &self.task_hvs
    }

    pub fn task(&self, index: usize) -> &Hypervector {
        &self.task_hvs[index]
    }

    /// `A_t += Σ_n coeffs[k][n] · V_n` for each `(t, coeffs[k])` in `updates`.
    fn accumulate(&mut self, updates: &[(usize, Vec<f64>)], encoded: &[Hypervector]) {
        let mut targets: Vec<Option<&mut Hypervector>> = self.task_hvs.iter_mut().map(Some).collect();
        let hvs: Vec<&mut Hypervector> = updates
            .iter()
            .map(|(t, _)| targets[*t].take().expect("each task updated at most once"))
            .collect();
        let coeffs: Vec<&[f64]> = updates.iter().map(|(_, c)| c.as_slice()).collect();
        accumulate_blocked(hvs, &coeffs, encoded);
    }
}

/// `hvs[k] += Σ_n coeffs[k][n] · encoded[n]`, blocked along the dimension so
/// every block of `encoded` is read once for all targets. For each element the
/// sum over `n` runs in index order, so the result does not depend on the
/// thread count or on which other targets are updated alongside.
fn accumulate_blocked(hvs: Vec<&mut Hypervector>, coeffs: &[&[f64]], encoded: &[Hypervector]) {
    let Some(dim) = hvs.first().map(|h| h.dim()) else {
        return;
    };
    let n_blocks = dim.div_ceil(ACCUMULATE_CHUNK);
    let mut blocks: Vec<Vec<&mut [f64]>> = (0..n_blocks).map(|_| Vec::with_capacity(hvs.len())).collect();
    for hv in hvs {
        for (b, slice) in hv.as_mut_slice().chunks_mut(ACCUMULATE_CHUNK).enumerate() {
            blocks[b].push(slice);
        }
    }
    blocks.into_par_iter().enumerate().for_each(|(b, mut outs)| {
        let start = b * ACCUMULATE_CHUNK;
        for (n, v) in encoded.iter().enumerate() {
            let src = &v.as_slice()[start..start + outs[0].len()];
            for (out, c) in outs.iter_mut().zip(coeffs) {
                if c[n] != 0.0 {
                    axpy(out, src, c[n]);
                }
            }
        }
    });
}

/// `dots[k][n] = <hvs[k], encoded[n]>`, summed block by block in a fixed order.
fn dots_blocked(hvs: &[&Hypervector], encoded: &[Hypervector]) -> Vec<Vec<f64>> {
    let Some(dim) = hvs.first().map(|h| h.dim()) else {
        return Vec::new();
    };
    let n = encoded.len();
    let partials: Vec<Vec<f64>> = (0..dim.div_ceil(ACCUMULATE_CHUNK))
        .into_par_iter()
        .map(|b| {
            let start = b * ACCUMULATE_CHUNK;
            let end = (start + ACCUMULATE_CHUNK).min(dim);
            let mut out = vec![0.0; hvs.len() * n];
            for (i, v) in encoded.iter().enumerate() {
                let src = &v.as_slice()[start..end];
                for (k, h) in hvs.iter().enumerate() {
                    out[k * n + i] = dot(&h.as_slice()[start..end], src);
                }
            }
            out
        })
        .collect();
    let mut total = vec![0.0; hvs.len() * n];
    for p in partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    total.chunks(n.max(1)).take(hvs.len()).map(<[f64]>::to_vec).collect()
}

fn check_encoded(encoded: &[Hypervector], dim: usize) -> Result<()> {
    if let Some(bad) = encoded.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.dim(),
        });
    }
    Ok(())
}

/// Single pass of `A_t = Σ_n γ · w_n^(t) · V_n` starting from zero task vectors.
pub fn train(
    encoded: &[Hypervector],
    task_names: Vec<String>,
    weights: &WeightTable,
    cfg: &TrainConfig,
) -> Result<AssociativeMemory> {
    cfg.validate()?;
    let dim = encoded
        .first()
        .map(Hypervector::dim)
        .ok_or_else(|| Error::InvalidRanks("cannot train on an empty architecture set".into()))?;
    check_encoded(encoded, dim)?;
    if weights.n_archs() != encoded.len() {
        return Err(Error::RowCountMismatch {
            expected: encoded.len(),
            got: weights.n_archs(),
        });
    }
    if weights.n_tasks() != task_names.len() {
        return Err(Error::InvalidRanks(format!(
            "{} task names but {} weight columns",
            task_names.len(),
            weights.n_tasks()
        )));
    }
    let mut mem = AssociativeMemory::zeroed(dim, task_names)?;
    let updates: Vec<(usize, Vec<f64>)> = (0..weights.n_tasks())
        .map(|t| (t, weights.column(t).iter().map(|w| cfg.gamma0 * w).collect()))
        .collect();
    mem.accumulate(&updates, encoded);
    Ok(mem)
}

/// Cosine similarities between encoded architectures and each task vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityTable {
    task_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    /// Tasks whose vector had zero norm; their column is all zeros.
    zero_norm_tasks: Vec<String>,
}

impl SimilarityTable {
    pub fn new(task_names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if task_names.len() != columns.len() {
            return Err(Error::InvalidConfig("task/column count mismatch".into()));
        }
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidConfig("ragged similarity columns".into()));
        }
        Ok(Self {
            task_names,
            columns,
            zero_norm_tasks: Vec::new(),
        })
    }

    pub fn task_names(&self) -> &[String] {
        &self.task_names
    }

    pub fn n_archs(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, task: usize) -> &[f64] {
        &self.columns[task]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn zero_norm_tasks(&self) -> &[String] {
        &self.zero_norm_tasks
    }

    /// Appends the rows of `other`, which must cover the same tasks.
    pub fn extend(&mut self, other: SimilarityTable) -> Result<()> {
        if other.task_names != self.task_names {
            return Err(Error::InvalidConfig(
                "cannot merge similarity tables over different tasks".into(),
            ));
        }
        for (dst, src) in self.columns.iter_mut().zip(other.columns) {
            dst.extend(src);
        }
        for name in other.zero_norm_tasks {
            if !self.zero_norm_tasks.contains(&name) {
                self.zero_norm_tasks.push(name);
            }
        }
        Ok(())
    }
}

pub fn predict_similarities(model: &AssociativeMemory, encoded: &[Hypervector]) -> Result<SimilarityTable> {
    check_encoded(encoded, model.dim())?;
    let task_norms: Vec<f64> = model.task_hvs.iter().map(Hypervector::norm).collect();
    let zero_norm_tasks: Vec<String> = model
        .task_names
        .iter()
        .zip(&task_norms)
        .filter(|(_, &n)| n == 0.0)
        .map(|(name, _)| name.clone())
        .collect();
    for name in &zero_norm_tasks {
        log::warn!("task {name:?} has a zero vector; its similarities are all 0");
    }
    let rows: Vec<Vec<f64>> = encoded
        .par_iter()
        .map(|v| {
            let vn = v.norm();
            model
                .task_hvs
                .iter()
                .zip(&task_norms)
                .map(|(a, &an)| cosine_with_norms(v.as_slice(), vn, a.as_slice(), an).value)
                .collect()
        })
        .collect();
    let mut columns = vec![Vec::with_capacity(rows.len()); model.task_names.len()];
    for row in rows {
        for (col, s) in columns.iter_mut().zip(row) {
            col.push(s);
        }
    }
    Ok(SimilarityTable {
        task_names: model.task_names.clone(),
        columns,
        zero_norm_tasks,
    })
}

/// Ranks one column: the highest similarity gets rank 0, ties go to the lower index.
pub fn similarity_column_ranks(sims: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sims.len()).collect();
    order.sort_by(|&a, &b| sims[b].total_cmp(&sims[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; sims.len()];
    for (rank, idx) in order.into_iter().enumerate() {
        ranks[idx] = rank;
    }
    ranks
}

pub fn similarities_to_ranks(sims: &SimilarityTable) -> RankTable {
    let columns: Vec<Vec<usize>> = sims.columns.iter().map(|c| similarity_column_ranks(c)).collect();
    RankTable {
        task_names: sims.task_names.clone(),
        n_archs: sims.n_archs(),
        columns,
    }
}

fn cosine_from_dot(dot: f64, norm_a: f64, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        0.0
    } else {
        (dot / (norm_a * norm_b)).clamp(-1.0, 1.0)
    }
}

/// Per-epoch record of the weight differences seen during retraining.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrainEpoch {
    pub epoch: usize,
    pub learning_rate: f64,
    /// Mean `|Δw|` per task; `None` once a task has converged.
    pub mean_abs_dw: Vec<Option<f64>>,
}

impl RetrainEpoch {
    /// Mean `|Δw|` across the tasks still active in this epoch.
    pub fn overall(&self) -> Option<f64> {
        let active: Vec<f64> = self.mean_abs_dw.iter().flatten().copied().collect();
        (!active.is_empty()).then(|| active.iter().sum::<f64>() / active.len() as f64)
    }
}

#[derive(Debug, Clone)]
pub struct RetrainOutcome {
    pub model: AssociativeMemory,
    pub trace: Vec<RetrainEpoch>,
    /// Number of (epoch, task) updates actually applied to the memory.
    pub updates_applied: usize,
}

/// Retraining by weight difference.
///
/// Each epoch ranks the training set by similarity, converts the predicted
/// ranks to weights `ŵ` with the same `μ` and mode as the truth, and applies
/// `A_t += γ_e Σ_n (w_n − ŵ_n) V_n` with `γ_e = γ0 · decay^(e−1)`. A task
/// stops once its mean `|w − ŵ|` falls below `stop_threshold`; the loop ends
/// when every task has stopped or `retrain_max_epochs` is reached.
pub fn retrain(
    model: &AssociativeMemory,
    encoded: &[Hypervector],
    truth_weights: &WeightTable,
    cfg: &TrainConfig,
) -> Result<RetrainOutcome> {
    cfg.validate()?;
    check_encoded(encoded, model.dim())?;
    if truth_weights.n_archs() != encoded.len() {
        return Err(Error::RowCountMismatch {
            expected: encoded.len(),
            got: truth_weights.n_archs(),
        });
    }
    if truth_weights.n_tasks() != model.task_names.len() {
        return Err(Error::InvalidRanks(format!(
            "model has {} tasks but weights have {}",
            model.task_names.len(),
            truth_weights.n_tasks()
        )));
    }
    let mode = truth_weights.mode();
    let mu = truth_weights.mu();
    let n = encoded.len();
    if mode == WeightMode::Semantic && n < 2 && cfg.retrain_max_epochs > 0 {
        return Err(Error::InvalidRanks(
            "semantic retraining needs at least 2 architectures".into(),
        ));
    }

    let mut model = model.clone();
    let norms: Vec<f64> = encoded.iter().map(Hypervector::norm).collect();
    let mut active = vec![true; model.task_names.len()];
    let mut trace = Vec::new();
    let mut updates_applied = 0;

    for epoch in 1..=cfg.retrain_max_epochs {
        if !active.iter().any(|&a| a) {
            break;
        }
        let learning_rate = cfg.gamma0 * cfg.decay.powi(epoch as i32 - 1);
        let mut mean_abs_dw = vec![None; active.len()];
        let current: Vec<usize> = (0..active.len()).filter(|&t| active[t]).collect();
        let task_refs: Vec<&Hypervector> = current.iter().map(|&t| model.task(t)).collect();
        let dots = dots_blocked(&task_refs, encoded);
        let mut updates = Vec::new();
        for (&t, task_dots) in current.iter().zip(dots) {
            let task_norm = model.task(t).norm();
            let sims: Vec<f64> = task_dots
                .iter()
                .zip(&norms)
                .map(|(&d, &vn)| cosine_from_dot(d, vn, task_norm))
                .collect();
            let predicted = column_weights(&similarity_column_ranks(&sims), mu, mode);
            let dw: Vec<f64> = truth_weights
                .column(t)
                .iter()
                .zip(&predicted)
                .map(|(w, w_hat)| w - w_hat)
                .collect();
            let mean = dw.iter().map(|d| d.abs()).sum::<f64>() / n.max(1) as f64;
            mean_abs_dw[t] = Some(mean);
            if mean < cfg.stop_threshold {
                active[t] = false;
                continue;
            }
            updates.push((t, dw.iter().map(|d| learning_rate * d).collect()));
        }
        updates_applied += updates.len();
        model.accumulate(&updates, encoded);
        trace.push(RetrainEpoch {
            epoch,
            learning_rate,
            mean_abs_dw,
        });
    }
    Ok(RetrainOutcome {
        model,
        trace,
        updates_applied,
    })
}

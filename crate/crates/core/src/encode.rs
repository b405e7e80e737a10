//! Architecture descriptors, item memories and the two encoding schemes.
//!
//! An architecture is a stack of 10 to 12 encoder blocks; each block carries a
//! label-encoded `(head, mlp)` pair with codes in `1..=3`.
//!
//! * **Gram**: each block's `head ⊙ mlp` product is rotated by its 0-based
//!   block index and the rotated grams are summed.
//! * **Record**: each block's `head ⊙ mlp` product is further bound to the
//!   position vector from the depth memory; no rotation is involved. The
//!   three-way products can be precomputed once into a
//!   [`UnifiedRecordMemory`] of 12 × 3 × 3 entries.
//!
//! Both schemes start from the zero vector, accumulate integer-valued sums and
//! cap-bipolarize once at the end, so every output element is in `{-1, 0, 1}`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::{rotation, HvSeed, Hypervector};

pub const MAX_DEPTH: usize = 12;
pub const MIN_DEPTH: usize = 10;
pub const NUM_CODES: u8 = 3;
/// Entries in the precomputed record table: positions × head codes × mlp codes.
pub const UNIFIED_ENTRIES: usize = MAX_DEPTH * (NUM_CODES as usize) * (NUM_CODES as usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LayerParams {
    head: u8,
    mlp: u8,
}

impl LayerParams {
    pub fn new(head: u8, mlp: u8) -> Result<Self> {
        check_code("head", head)?;
        check_code("mlp", mlp)?;
        Ok(Self { head, mlp })
    }

    pub fn head(&self) -> u8 {
        self.head
    }

    pub fn mlp(&self) -> u8 {
        self.mlp
    }

    /// Index of the `(head, mlp)` pair in `0..9`.
    pub(crate) fn pair_index(&self) -> usize {
        (self.head as usize - 1) * NUM_CODES as usize + (self.mlp as usize - 1)
    }
}

fn check_code(field: &str, code: u8) -> Result<()> {
    if !(1..=NUM_CODES).contains(&code) {
        return Err(Error::InvalidArch(format!(
            "{field} code {code} outside 1..={NUM_CODES}"
        )));
    }
    Ok(())
}

/// One vision-transformer architecture. Layer 0 is closest to the input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArchDescriptor {
    layers: Vec<LayerParams>,
}

impl ArchDescriptor {
    /// Builds a descriptor whose depth must be in `10..=12`.
    pub fn new(layers: Vec<LayerParams>) -> Result<Self> {
        if !(MIN_DEPTH..=MAX_DEPTH).contains(&layers.len()) {
            return Err(Error::InvalidArch(format!(
                "depth {} outside {MIN_DEPTH}..={MAX_DEPTH}",
                layers.len()
            )));
        }
        Ok(Self { layers })
    }

    /// Convenience constructor from parallel code slices.
    pub fn from_codes(heads: &[u8], mlps: &[u8]) -> Result<Self> {
        Self::new(layers_from_codes(heads, mlps)?)
    }

    /// Validates a batch of `(heads, mlps)` rows, reporting the index of the
    /// first invalid one.
    pub fn batch_from_codes<H, M>(rows: &[(H, M)]) -> Result<Vec<Self>>
    where
        H: AsRef<[u8]>,
        M: AsRef<[u8]>,
    {
        rows.iter()
            .enumerate()
            .map(|(index, (h, m))| {
                Self::from_codes(h.as_ref(), m.as_ref()).map_err(|e| Error::BatchItem {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }

    /// Accepts any depth in `1..=12`. Small depths are only meaningful for
    /// unit-scale experiments; file ingestion always goes through [`Self::new`].
    #[doc(hidden)]
    pub fn toy(layers: Vec<LayerParams>) -> Result<Self> {
        if layers.is_empty() || layers.len() > MAX_DEPTH {
            return Err(Error::InvalidArch(format!(
                "toy depth {} outside 1..={MAX_DEPTH}",
                layers.len()
            )));
        }
        Ok(Self { layers })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }
}

fn layers_from_codes(heads: &[u8], mlps: &[u8]) -> Result<Vec<LayerParams>> {
    if heads.len() != mlps.len() {
        return Err(Error::InvalidArch(format!(
            "{} head codes but {} mlp codes",
            heads.len(),
            mlps.len()
        )));
    }
    heads.iter().zip(mlps).map(|(&h, &m)| LayerParams::new(h, m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Gram,
    Record,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Gram => "gram",
            Scheme::Record => "record",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gram" => Ok(Scheme::Gram),
            "record" => Ok(Scheme::Record),
            other => Err(Error::InvalidConfig(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Item memories for the head codes, mlp codes and layer positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemMemorySet {
    master_seed: u64,
    dim: usize,
    head: Vec<Hypervector>,
    mlp: Vec<Hypervector>,
    depth: Vec<Hypervector>,
}

impl ItemMemorySet {
    /// Generates the 3 + 3 + 12 bipolar item vectors, each from its own
    /// labelled stream (`head/1`, `mlp/3`, `depth/12`, ...).
    pub fn new(master_seed: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let gen = |prefix: &str, count: usize| -> Result<Vec<Hypervector>> {
            (1..=count)
                .map(|k| Hypervector::random_bipolar(&HvSeed::new(master_seed, format!("{prefix}/{k}")), dim))
                .collect()
        };
        Ok(Self {
            master_seed,
            dim,
            head: gen("head", NUM_CODES as usize)?,
            mlp: gen("mlp", NUM_CODES as usize)?,
            depth: gen("depth", MAX_DEPTH)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Item vector for a head code in `1..=3`.
    pub fn head(&self, code: u8) -> &Hypervector {
        &self.head[code as usize - 1]
    }

    pub fn mlp(&self, code: u8) -> &Hypervector {
        &self.mlp[code as usize - 1]
    }

    /// Position vector for a 0-based layer index.
    pub fn depth(&self, layer: usize) -> &Hypervector {
        &self.depth[layer]
    }

    /// All 18 item vectors, heads first, then mlps, then positions.
    pub fn iter(&self) -> impl Iterator<Item = &Hypervector> {
        self.head.iter().chain(&self.mlp).chain(&self.depth)
    }
}

/// Precomputed `depth[i] ⊙ head[h] ⊙ mlp[m]` for every position and code pair.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedRecordMemory {
    table: Vec<Hypervector>,
}

impl UnifiedRecordMemory {
    pub fn new(mems: &ItemMemorySet) -> Self {
        let mut table = Vec::with_capacity(UNIFIED_ENTRIES);
        for layer in 0..MAX_DEPTH {
            for h in 1..=NUM_CODES {
                for m in 1..=NUM_CODES {
                    let v = bind3(mems.depth(layer), mems.head(h), mems.mlp(m));
                    table.push(v);
                }
            }
        }
        Self { table }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, layer: usize, head: u8, mlp: u8) -> &Hypervector {
        &self.table[layer * 9 + (head as usize - 1) * 3 + (mlp as usize - 1)]
    }
}

fn bind3(a: &Hypervector, b: &Hypervector, c: &Hypervector) -> Hypervector {
    let elements = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .zip(c.as_slice())
        .map(|((x, y), z)| x * y * z)
        .collect();
    Hypervector::from_vec(elements).expect("item vectors are non-empty")
}

/// `dst += rotate_right(src, shift)` without materializing the rotation.
fn add_rotated(dst: &mut [f64], src: &[f64], shift: usize) {
    let d = dst.len();
    let (head, tail) = src.split_at(d - shift);
    for (o, s) in dst[shift..].iter_mut().zip(head) {
        *o += s;
    }
    for (o, s) in dst[..shift].iter_mut().zip(tail) {
        *o += s;
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (o, s) in dst.iter_mut().zip(src) {
        *o += s;
    }
}

/// Uncapped Gram sum `Σ_i permute(head[h_i] ⊙ mlp[m_i], i)`.
pub fn gram_sum(arch: &ArchDescriptor, mems: &ItemMemorySet) -> Hypervector {
    let mut acc = Hypervector::zeros(mems.dim()).expect("memory dim is positive");
    for (i, layer) in arch.layers().iter().enumerate() {
        let gram = mems
            .head(layer.head())
            .bind(mems.mlp(layer.mlp()))
            .expect("item vectors share a dimension");
        add_rotated(acc.as_mut_slice(), gram.as_slice(), rotation(i as i64, mems.dim()));
    }
    acc
}

pub fn encode_gram(arch: &ArchDescriptor, mems: &ItemMemorySet) -> Hypervector {
    let mut v = gram_sum(arch, mems);
    v.cap_bipolarize_in_place();
    v
}

/// Uncapped Record sum `Σ_i head[h_i] ⊙ mlp[m_i] ⊙ depth[i]`.
pub fn record_sum(arch: &ArchDescriptor, mems: &ItemMemorySet) -> Hypervector {
    let mut acc = Hypervector::zeros(mems.dim()).expect("memory dim is positive");
    for (i, layer) in arch.layers().iter().enumerate() {
        let term = bind3(mems.head(layer.head()), mems.mlp(layer.mlp()), mems.depth(i));
        add_into(acc.as_mut_slice(), term.as_slice());
    }
    acc
}

pub fn encode_record(arch: &ArchDescriptor, mems: &ItemMemorySet) -> Hypervector {
    let mut v = record_sum(arch, mems);
    v.cap_bipolarize_in_place();
    v
}

/// Record encoding through table lookups; bit-identical to [`encode_record`].
pub fn encode_record_unified(arch: &ArchDescriptor, unified: &UnifiedRecordMemory) -> Hypervector {
    let dim = unified.table[0].dim();
    let mut acc = Hypervector::zeros(dim).expect("table dim is positive");
    for (i, layer) in arch.layers().iter().enumerate() {
        add_into(acc.as_mut_slice(), unified.get(i, layer.head(), layer.mlp()).as_slice());
    }
    acc.cap_bipolarize_in_place();
    acc
}

/// Reusable encoder holding the memories plus scheme-specific lookup tables.
#[derive(Debug, Clone)]
pub struct Encoder {
    scheme: Scheme,
    mems: ItemMemorySet,
    /// Gram: the 9 `head ⊙ mlp` products. Record: the 108-entry unified table.
    table: Vec<Hypervector>,
}

impl Encoder {
    pub fn new(scheme: Scheme, mems: ItemMemorySet) -> Self {
        let table = match scheme {
            Scheme::Record => UnifiedRecordMemory::new(&mems).table,
            Scheme::Gram => {
                let mut grams = Vec::with_capacity(9);
                for h in 1..=NUM_CODES {
                    for m in 1..=NUM_CODES {
                        grams.push(mems.head(h).bind(mems.mlp(m)).expect("same dim"));
                    }
                }
                grams
            }
        };
        Self { scheme, mems, table }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        self.mems.dim()
    }

    pub fn memories(&self) -> &ItemMemorySet {
        &self.mems
    }

    /// Encodes into a caller-provided buffer of length `dim`.
    pub fn encode_into(&self, arch: &ArchDescriptor, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        out.fill(0.0);
        for (i, layer) in arch.layers().iter().enumerate() {
            match self.scheme {
                Scheme::Record => add_into(out, self.table[i * 9 + layer.pair_index()].as_slice()),
                Scheme::Gram => add_rotated(
                    out,
                    self.table[layer.pair_index()].as_slice(),
                    rotation(i as i64, out.len()),
                ),
            }
        }
        for x in out.iter_mut() {
            *x = x.clamp(-1.0, 1.0);
        }
    }

    pub fn encode(&self, arch: &ArchDescriptor) -> Hypervector {
        let mut buf = vec![0.0; self.dim()];
        self.encode_into(arch, &mut buf);
        Hypervector::from_vec(buf).expect("encoder dim is positive")
    }

    /// Order-preserving parallel encoding; output is independent of the
    /// number of worker threads.
    pub fn encode_batch(&self, archs: &[ArchDescriptor]) -> Vec<Hypervector> {
        archs.par_iter().map(|a| self.encode(a)).collect()
    }
}

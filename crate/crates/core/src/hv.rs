//! Hypervectors and their algebra.
//!
//! A [`Hypervector`] is a dense, real-valued vector of fixed dimension `D`.
//! Item vectors are bipolar (every element is `-1.0` or `+1.0`), while
//! accumulators such as encoded architectures or task vectors hold arbitrary
//! reals. Both share the same type so that weighted sums never need a lossy
//! conversion.
//!
//! Supported operations:
//! - **add**: element-wise sum (bundling)
//! - **bind**: element-wise product, self-inverse for bipolar inputs
//! - **permute**: cyclic rotation; positive shifts move elements toward higher
//!   indices, so `permute([1, 2, 3, 4], 1) == [4, 1, 2, 3]`
//! - **cap_bipolarize**: clamp every element into `[-1, 1]`
//! - **cosine**: cosine similarity, defined as `0` when either side has zero norm

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Domain separator mixed into every derived generator key.
const KEY_DOMAIN: &[u8] = b"hdrank/keyed-rng/v1";

/// Deterministic generator for the stream named `label` under `master_seed`.
///
/// The ChaCha key is the SHA-256 of `(domain, master_seed, label)`, so distinct
/// labels give independent streams and the result does not depend on the order
/// in which streams are requested.
pub fn keyed_rng(master_seed: u64, label: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(KEY_DOMAIN);
    hasher.update(master_seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Identifies one randomly generated hypervector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HvSeed {
    pub master_seed: u64,
    pub stream_label: String,
}

impl HvSeed {
    pub fn new(master_seed: u64, stream_label: impl Into<String>) -> Self {
        Self {
            master_seed,
            stream_label: stream_label.into(),
        }
    }
}

/// Result of a cosine similarity query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub value: f64,
    /// Set when either operand had zero norm; `value` is then `0.0`.
    pub zero_norm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypervector {
    elements: Vec<f64>,
}

impl Hypervector {
    pub fn from_vec(elements: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { elements })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::filled(dim, 0.0)
    }

    pub fn ones(dim: usize) -> Result<Self> {
        Self::filled(dim, 1.0)
    }

    fn filled(dim: usize, value: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            elements: vec![value; dim],
        })
    }

    /// Draws `dim` i.i.d. elements uniformly from `{-1, +1}`.
    ///
    /// Each 64-bit word of the keyed ChaCha8 stream supplies 64 elements,
    /// least-significant bit first; a set bit maps to `+1`.
    pub fn random_bipolar(seed: &HvSeed, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut rng = keyed_rng(seed.master_seed, &seed.stream_label);
        let mut elements = Vec::with_capacity(dim);
        while elements.len() < dim {
            let word = rng.next_u64();
            let take = (dim - elements.len()).min(64);
            elements.extend((0..take).map(|bit| if (word >> bit) & 1 == 1 { 1.0 } else { -1.0 }));
        }
        Ok(Self { elements })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.elements
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.elements
    }

    pub fn is_bipolar(&self) -> bool {
        self.elements.iter().all(|&x| x == 1.0 || x == -1.0)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Element-wise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    /// Element-wise (Hadamard) product.
    pub fn bind(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a * b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let elements = self
            .elements
            .iter()
            .zip(&other.elements)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self { elements }
    }

    /// Cyclic rotation by `shift mod D` positions toward higher indices.
    pub fn permute(&self, shift: i64) -> Self {
        let mut elements = self.elements.clone();
        elements.rotate_right(rotation(shift, self.dim()));
        Self { elements }
    }

    /// Clamps every element into `[-1, 1]`, leaving interior values untouched.
    pub fn cap_bipolarize(&self) -> Self {
        let mut out = self.clone();
        out.cap_bipolarize_in_place();
        out
    }

    pub fn cap_bipolarize_in_place(&mut self) {
        for x in &mut self.elements {
            *x = x.clamp(-1.0, 1.0);
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            elements: self.elements.iter().map(|&x| x * factor).collect(),
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled_assign(&mut self, other: &Self, factor: f64) -> Result<()> {
        self.check_dim(other)?;
        axpy(&mut self.elements, &other.elements, factor);
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(dot(&self.elements, &other.elements))
    }

    pub fn norm(&self) -> f64 {
        dot(&self.elements, &self.elements).sqrt()
    }

    pub fn cosine(&self, other: &Self) -> Result<Cosine> {
        self.check_dim(other)?;
        Ok(cosine_with_norms(
            &self.elements,
            self.norm(),
            &other.elements,
            other.norm(),
        ))
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.elements
    }
}

/// Normalizes a signed shift into a right-rotation amount in `0..dim`.
pub(crate) fn rotation(shift: i64, dim: usize) -> usize {
    shift.rem_euclid(dim as i64) as usize
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four independent partial sums let the compiler vectorize the loop while
    // keeping the summation order fixed.
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for k in 0..4 {
            acc[k] += ca[k] * cb[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub(crate) fn axpy(dst: &mut [f64], src: &[f64], factor: f64) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += factor * s;
    }
}

pub(crate) fn cosine_with_norms(a: &[f64], norm_a: f64, b: &[f64], norm_b: f64) -> Cosine {
    if norm_a == 0.0 || norm_b == 0.0 {
        return Cosine {
            value: 0.0,
            zero_norm: true,
        };
    }
    let value = (dot(a, b) / (norm_a * norm_b)).clamp(-1.0, 1.0);
    Cosine {
        value,
        zero_norm: false,
    }
}

//! On-disk model container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        8 bytes   "HDRANKMD"
//! version      u32       currently 1
//! header_len   u64       length of the JSON header in bytes
//! header       JSON      dim, scheme, master seed, train config (incl. weight
//!                        mode), task names, retraining trace
//! task vectors f64 × dim × tasks, task-major
//! ```
//!
//! Item memories are not stored; they are regenerated from the seed.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encode::Scheme;
use crate::error::{Error, Result};
use crate::hv::Hypervector;
use crate::pipeline::{PipelineConfig, TrainedModel};
use crate::rank::{AssociativeMemory, RetrainEpoch, TrainConfig, WeightMode};

pub const MAGIC: &[u8; 8] = b"HDRANKMD";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    dim: usize,
    scheme: Scheme,
    master_seed: u64,
    weight_mode: WeightMode,
    train_config: TrainConfig,
    task_names: Vec<String>,
    retrain_trace: Vec<RetrainEpoch>,
}

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn save_model(path: impl AsRef<Path>, model: &TrainedModel) -> Result<()> {
    let path = path.as_ref();
    let header = Header {
        format: "hdrank-model".into(),
        dim: model.memory.dim(),
        scheme: model.config.scheme,
        master_seed: model.config.seed,
        weight_mode: model.config.train.weight_mode,
        train_config: model.config.train,
        task_names: model.memory.task_names().to_vec(),
        retrain_trace: model.retrain_trace.clone(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| format_err(path, e.to_string()))?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(json.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&json).map_err(io)?;
    for hv in model.memory.task_hvs() {
        for x in hv.as_slice() {
            w.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut read = |buf: &mut [u8], what: &str| {
        r.read_exact(buf)
            .map_err(|e| format_err(path, format!("truncated model file while reading {what}: {e}")))
    };

    let mut magic = [0u8; 8];
    read(&mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(format_err(path, "not a model file (bad magic)"));
    }
    let mut word = [0u8; 4];
    read(&mut word, "version")?;
    let version = u32::from_le_bytes(word);
    if version != FORMAT_VERSION {
        return Err(format_err(path, format!("unsupported model format version {version}")));
    }
    let mut len = [0u8; 8];
    read(&mut len, "header length")?;
    let len = u64::from_le_bytes(len) as usize;
    let mut json = vec![0u8; len];
    read(&mut json, "header")?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| format_err(path, format!("bad header: {e}")))?;
    if header.dim == 0 {
        return Err(format_err(path, "dimension must be positive"));
    }
    if header.weight_mode != header.train_config.weight_mode {
        return Err(format_err(path, "weight mode disagrees with the stored train config"));
    }

    let mut task_hvs = Vec::with_capacity(header.task_names.len());
    let mut bytes = vec![0u8; header.dim * 8];
    for name in &header.task_names {
        read(&mut bytes, &format!("task vector {name:?}"))?;
        let elements = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        task_hvs.push(Hypervector::from_vec(elements)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(|e| Error::io(path, e))? != 0 {
        return Err(format_err(path, "trailing bytes after task vectors"));
    }
    let memory = AssociativeMemory::from_parts(header.task_names, task_hvs)?;
    let config = PipelineConfig {
        dim: header.dim,
        seed: header.master_seed,
        scheme: header.scheme,
        train: header.train_config,
    };
    config.train.validate()?;
    Ok(TrainedModel {
        config,
        memory,
        retrain_trace: header.retrain_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::HvSeed;

    fn model() -> TrainedModel {
        let hvs = (0..3)
            .map(|i| {
                Hypervector::random_bipolar(&HvSeed::new(4, format!("t{i}")), 33)
                    .unwrap()
                    .scale(0.37)
            })
            .collect();
        TrainedModel {
            config: PipelineConfig {
                dim: 33,
                seed: 99,
                scheme: Scheme::Gram,
                train: TrainConfig {
                    stop_threshold: f64::INFINITY,
                    ..TrainConfig::default()
                },
            },
            memory: AssociativeMemory::from_parts(vec!["a".into(), "b".into(), "c".into()], hvs).unwrap(),
            retrain_trace: vec![RetrainEpoch {
                epoch: 1,
                learning_rate: 1.0,
                mean_abs_dw: vec![Some(0.5), None, Some(0.1)],
            }],
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        let m = model();
        save_model(&p, &m).unwrap();
        assert_eq!(load_model(&p).unwrap(), m);
    }

    #[test]
    fn rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        save_model(&p, &model()).unwrap();
        let bytes = std::fs::read(&p).unwrap();

        std::fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
        assert!(load_model(&p).unwrap_err().to_string().contains("truncated"));

        let mut bad = bytes.clone();
        bad[0] = b'X';
        std::fs::write(&p, &bad).unwrap();
        assert!(load_model(&p).unwrap_err().to_string().contains("magic"));

        let mut extra = bytes;
        extra.push(0);
        std::fs::write(&p, &extra).unwrap();
        assert!(load_model(&p).unwrap_err().to_string().contains("trailing"));
    }
}

//! Parameter checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! b"RDSACKPT"            8-byte magic
//! u32 version            currently 1
//! u64 header_len
//! header_len bytes       UTF-8 JSON: {"version", "encoder", "tensors": [{"name", "shape"}]}
//! f64 * total            tensor values, row-major, in header order
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::{EncoderConfig, Params, TensorInfo};
use crate::error::EmbedError;

const MAGIC: &[u8; 8] = b"RDSACKPT";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckpointHeader {
    pub version: u32,
    pub encoder: EncoderConfig,
    pub tensors: Vec<TensorInfo>,
}

pub fn encode(params: &Params, cfg: &EncoderConfig) -> Result<Vec<u8>, EmbedError> {
    let header = CheckpointHeader { version: VERSION, encoder: cfg.clone(), tensors: params.tensor_infos() };
    let json = serde_json::to_vec(&header)?;
    let mut out = Vec::with_capacity(20 + json.len() + 8 * params.num_params());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for t in params.tensors() {
        for v in t {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<(Params, EncoderConfig), EmbedError> {
    let bad = |msg: &str| EmbedError::Checkpoint(msg.to_string());
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(bad("missing magic"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let header_len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
    let body_start =
        20usize.checked_add(header_len).filter(|&e| e <= bytes.len()).ok_or_else(|| bad("truncated header"))?;
    let header: CheckpointHeader = serde_json::from_slice(&bytes[20..body_start])?;

    let in_dim =
        header.tensors.first().and_then(|t| t.shape.first().copied()).ok_or_else(|| bad("empty tensor list"))?;
    let mut params = Params::init(in_dim, &header.encoder, 0)?;
    if params.tensor_infos() != header.tensors {
        return Err(bad("tensor layout does not match encoder config"));
    }
    let mut cursor = body_start;
    for t in params.tensors_mut() {
        for v in t.iter_mut() {
            let chunk = bytes.get(cursor..cursor + 8).ok_or_else(|| bad("truncated tensor data"))?;
            *v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
            cursor += 8;
        }
    }
    if cursor != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    Ok((params, header.encoder))
}

pub fn save(path: impl AsRef<Path>, params: &Params, cfg: &EncoderConfig) -> Result<(), EmbedError> {
    fs::write(path, encode(params, cfg)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<(Params, EncoderConfig), EmbedError> {
    decode(&fs::read(path)?)
}

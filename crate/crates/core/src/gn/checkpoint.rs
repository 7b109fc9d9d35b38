//! JSON checkpoints with a shape manifest.
//!
//! Floats are written in shortest round-trip form and parsed with exact
//! rounding, so save/load reproduces every weight bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dense::Dense;
use super::network::{GnParameters, GnShape};
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "arbiter-gn";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    /// `[rows, cols]` for weights, `[len]` for biases.
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    model: GnShape,
    seed: u64,
    tensors: Vec<TensorEntry>,
}

pub fn checkpoint_to_string(params: &GnParameters) -> String {
    let tensors = params
        .layers()
        .into_iter()
        .flat_map(|(name, l)| {
            [
                TensorEntry {
                    name: format!("{name}.weight"),
                    shape: vec![l.output, l.input],
                    data: l.weights.clone(),
                },
                TensorEntry {
                    name: format!("{name}.bias"),
                    shape: vec![l.output],
                    data: l.bias.clone(),
                },
            ]
        })
        .collect();
    let ckpt = Checkpoint {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        model: params.shape,
        seed: params.seed,
        tensors,
    };
    serde_json::to_string_pretty(&ckpt).expect("checkpoint serialization is infallible")
}

pub fn checkpoint_from_str(text: &str) -> Result<GnParameters> {
    let ckpt: Checkpoint = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if ckpt.format != CHECKPOINT_FORMAT || ckpt.version != CHECKPOINT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported checkpoint {} v{}",
            ckpt.format, ckpt.version
        )));
    }
    // Build a template of the right shape, then fill it tensor by tensor.
    let mut params = GnParameters::init(ckpt.model, ckpt.seed);
    let names: Vec<String> = params.layers().into_iter().map(|(n, _)| n).collect();
    if ckpt.tensors.len() != 2 * names.len() {
        return Err(Error::Parse(format!(
            "expected {} tensors, found {}",
            2 * names.len(),
            ckpt.tensors.len()
        )));
    }
    let mut entries = ckpt.tensors.into_iter();
    for (layer, name) in params.layers_mut().into_iter().zip(names) {
        let w = entries.next().expect("length checked");
        let b = entries.next().expect("length checked");
        fill(layer, &name, w, b)?;
    }
    if !params.all_finite() {
        return Err(Error::NonFinite(
            "checkpoint contains non-finite weights".into(),
        ));
    }
    Ok(params)
}

fn fill(layer: &mut Dense, name: &str, w: TensorEntry, b: TensorEntry) -> Result<()> {
    let expect = |entry: &TensorEntry, want_name: String, want_shape: Vec<usize>| {
        if entry.name != want_name || entry.shape != want_shape {
            return Err(Error::Parse(format!(
                "tensor {} {:?} does not match expected {want_name} {want_shape:?}",
                entry.name, entry.shape
            )));
        }
        let n: usize = want_shape.iter().product();
        if entry.data.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entry.data.len(),
                context: format!("tensor {want_name}"),
            });
        }
        Ok(())
    };
    expect(
        &w,
        format!("{name}.weight"),
        vec![layer.output, layer.input],
    )?;
    expect(&b, format!("{name}.bias"), vec![layer.output])?;
    layer.weights = w.data;
    layer.bias = b.data;
    Ok(())
}

pub fn save_checkpoint(params: &GnParameters, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, checkpoint_to_string(params)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<GnParameters> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    checkpoint_from_str(&text)
}

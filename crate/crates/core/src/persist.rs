//! Versioned JSON envelopes for trained models and checkpoints.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    kind: String,
    model: T,
}

/// Writes `model` tagged with `kind` and the format version.
pub fn save<T: Serialize>(path: impl AsRef<Path>, kind: &str, model: &T) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let env = Envelope { format: "statecast-model".into(), version: FORMAT_VERSION, kind: kind.into(), model };
    serde_json::to_writer(&mut w, &env)?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a model saved by [`save`], checking kind and version.
pub fn load<T: DeserializeOwned>(path: impl AsRef<Path>, kind: &str) -> Result<T> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let env: Envelope<T> = serde_json::from_reader(BufReader::new(file))?;
    let bad = |reason: String| Error::Format { path: path.to_path_buf(), reason };
    if env.format != "statecast-model" {
        return Err(bad(format!("unknown format `{}`", env.format)));
    }
    if env.version != FORMAT_VERSION {
        return Err(bad(format!("version {} (expected {FORMAT_VERSION})", env.version)));
    }
    if env.kind != kind {
        return Err(bad(format!("holds a `{}`, expected `{kind}`", env.kind)));
    }
    Ok(env.model)
}

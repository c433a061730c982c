//! `SSF1` checkpoint files.
//!
//! Little-endian layout:
//!
//! | field            | type |
//! |------------------|------|
//! | magic `SSF1`     | 4 bytes |
//! | clip_len         | u32 |
//! | input_channels   | u32 |
//! | block count n    | u32 |
//! | encoder widths   | n x u32 |
//! | bridge           | u8 (0 mean, 1 max) |
//! | separable        | u8 |
//! | seed             | u64 |
//! | learning_rate    | f64 |
//!
//! followed by every tensor of [`SsfcnParams::tensors`] in order, as f64.

use std::io::{Read, Write};
use std::path::Path;

use super::{Bridge, SsfcnConfig, SsfcnParams};
use crate::io::bin::{ByteReader, ByteWriter};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"SSF1";

pub fn write_checkpoint<W: Write>(params: &SsfcnParams, out: W) -> std::io::Result<()> {
    let c = &params.config;
    let mut w = ByteWriter::new(out);
    w.bytes(MAGIC)?;
    w.u32(c.clip_len as u32)?;
    w.u32(c.input_channels as u32)?;
    w.u32(c.encoder_channels.len() as u32)?;
    for &e in &c.encoder_channels {
        w.u32(e as u32)?;
    }
    w.u8(match c.bridge {
        Bridge::Mean => 0,
        Bridge::Max => 1,
    })?;
    w.u8(u8::from(c.separable))?;
    w.u64(c.seed)?;
    w.f64(c.learning_rate)?;
    for t in params.tensors() {
        for &v in t {
            w.f64(v)?;
        }
    }
    w.finish()
}

pub fn read_checkpoint<R: Read>(input: R) -> Result<SsfcnParams> {
    let mut r = ByteReader::new(input);
    let bad = |e: std::io::Error| Error::Checkpoint(format!("truncated SS-FCN checkpoint: {e}"));
    if &r.array::<4>().map_err(bad)? != MAGIC {
        return Err(Error::Checkpoint("missing SSF1 magic".into()));
    }
    let clip_len = r.u32().map_err(bad)? as usize;
    let input_channels = r.u32().map_err(bad)? as usize;
    let n = r.u32().map_err(bad)? as usize;
    if n > 8 {
        return Err(Error::Checkpoint(format!("implausible block count {n}")));
    }
    let encoder_channels = (0..n)
        .map(|_| r.u32().map(|v| v as usize))
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(bad)?;
    let bridge = match r.u8().map_err(bad)? {
        0 => Bridge::Mean,
        1 => Bridge::Max,
        other => return Err(Error::Checkpoint(format!("unknown bridge tag {other}"))),
    };
    let config = SsfcnConfig {
        clip_len,
        encoder_channels,
        input_channels,
        bridge,
        separable: r.u8().map_err(bad)? != 0,
        seed: r.u64().map_err(bad)?,
        learning_rate: r.f64().map_err(bad)?,
    };
    let mut params = SsfcnParams::zeros(&config)
        .map_err(|e| Error::Checkpoint(format!("invalid config block: {e}")))?;
    for t in params.tensors_mut() {
        for v in t.iter_mut() {
            *v = r.f64().map_err(bad)?;
        }
    }
    if !r.at_end().map_err(bad)? {
        return Err(Error::Checkpoint(
            "trailing bytes after the last tensor".into(),
        ));
    }
    Ok(params)
}

pub fn save_checkpoint(params: &SsfcnParams, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(params, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<SsfcnParams> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(std::io::BufReader::new(file))
}

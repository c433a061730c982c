//! `TCN1` checkpoint files.
//!
//! Little-endian layout:
//!
//! | field            | type |
//! |------------------|------|
//! | magic `TCN1`     | 4 bytes |
//! | num_blocks       | u32 |
//! | kernel_size      | u32 |
//! | dilation schedule| u8 (0 increment, 1 doubling) |
//! | channels_per_block | u32 |
//! | dropout_rate     | f64 |
//! | num_classes      | u32 |
//! | input_channels   | u32 |
//! | seed             | u64 |
//! | strict_causal    | u8 |
//!
//! followed by every tensor of [`TcnParams::tensors`] in order, as f64.
//! Tensor shapes follow from the config block.

use std::io::{Read, Write};
use std::path::Path;

use super::{DilationSchedule, TcnConfig, TcnParams};
use crate::io::bin::{ByteReader, ByteWriter};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"TCN1";

pub fn write_checkpoint<W: Write>(params: &TcnParams, out: W) -> std::io::Result<()> {
    let c = &params.config;
    let mut w = ByteWriter::new(out);
    w.bytes(MAGIC)?;
    w.u32(c.num_blocks as u32)?;
    w.u32(c.kernel_size as u32)?;
    w.u8(match c.dilation_schedule {
        DilationSchedule::Increment => 0,
        DilationSchedule::Doubling => 1,
    })?;
    w.u32(c.channels_per_block as u32)?;
    w.f64(c.dropout_rate)?;
    w.u32(c.num_classes as u32)?;
    w.u32(c.input_channels as u32)?;
    w.u64(c.seed)?;
    w.u8(u8::from(c.strict_causal))?;
    for t in params.tensors() {
        for &v in t {
            w.f64(v)?;
        }
    }
    w.finish()
}

pub fn read_checkpoint<R: Read>(input: R) -> Result<TcnParams> {
    let mut r = ByteReader::new(input);
    let bad = |e: std::io::Error| Error::Checkpoint(format!("truncated TCN checkpoint: {e}"));
    if &r.array::<4>().map_err(bad)? != MAGIC {
        return Err(Error::Checkpoint("missing TCN1 magic".into()));
    }
    let num_blocks = r.u32().map_err(bad)? as usize;
    let kernel_size = r.u32().map_err(bad)? as usize;
    let dilation_schedule = match r.u8().map_err(bad)? {
        0 => DilationSchedule::Increment,
        1 => DilationSchedule::Doubling,
        other => {
            return Err(Error::Checkpoint(format!(
                "unknown dilation schedule tag {other}"
            )))
        }
    };
    let config = TcnConfig {
        num_blocks,
        kernel_size,
        dilation_schedule,
        channels_per_block: r.u32().map_err(bad)? as usize,
        dropout_rate: r.f64().map_err(bad)?,
        num_classes: r.u32().map_err(bad)? as usize,
        input_channels: r.u32().map_err(bad)? as usize,
        seed: r.u64().map_err(bad)?,
        strict_causal: r.u8().map_err(bad)? != 0,
    };
    config
        .validate()
        .map_err(|e| Error::Checkpoint(format!("invalid config block: {e}")))?;
    let mut params = TcnParams::zeros(&config)?;
    for t in params.tensors_mut() {
        for v in t.iter_mut() {
            *v = r.f64().map_err(bad)?;
        }
    }
    if !r.at_end().map_err(bad)? {
        return Err(Error::Checkpoint("trailing bytes after TCN tensors".into()));
    }
    Ok(params)
}

pub fn save_checkpoint(params: &TcnParams, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(params, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<TcnParams> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(std::io::BufReader::new(file))
}

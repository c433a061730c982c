use std::path::Path;

use crate::{Error, Result};

/// Raw little-endian f64 values, row-major.
pub fn write_f64_map(path: &Path, values: &[f64]) -> Result<()> {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_f64_map(path: &Path, expected_len: usize) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != expected_len * 8 {
        return Err(Error::ingest(
            path,
            1,
            format!(
                "sidecar holds {} bytes, expected {}",
                bytes.len(),
                expected_len * 8
            ),
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

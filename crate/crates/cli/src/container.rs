//! Binary matrix container for likelihoods, posteriors and gradients.
//!
//! Layout, all little-endian regardless of host:
//!
//! ```text
//! magic   4 bytes  "SFBL"
//! version u32      currently 1
//! scalar  u32      0 = 32-bit float, 1 = 64-bit float
//! K       u32      rows (states)
//! N       u32      cols (frames)
//! payload K·N scalars, row-major (state-major)
//! ```
//!
//! −∞ encodes the semiring zero; NaN is rejected on both read and write.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const MAGIC: [u8; 4] = *b"SFBL";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarCode {
    F32,
    F64,
}

impl ScalarCode {
    fn from_u32(code: u32) -> Result<Self> {
        match code {
            0 => Ok(ScalarCode::F32),
            1 => Ok(ScalarCode::F64),
            other => bail!("unknown scalar code {other} (expected 0 = f32 or 1 = f64)"),
        }
    }

    fn to_u32(self) -> u32 {
        match self {
            ScalarCode::F32 => 0,
            ScalarCode::F64 => 1,
        }
    }

    fn width(self) -> usize {
        match self {
            ScalarCode::F32 => 4,
            ScalarCode::F64 => 8,
        }
    }
}

/// A matrix read from or destined for a container file; values are widened
/// to f64 in memory.
#[derive(Debug, Clone)]
pub struct MatrixFile {
    pub scalar: ScalarCode,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

pub fn read_matrix(path: &Path) -> Result<MatrixFile> {
    let bytes = fs::read(path).with_context(|| format!("reading container {}", path.display()))?;
    let parse = |bytes: &[u8]| -> Result<MatrixFile> {
        if bytes.len() < HEADER_LEN {
            bail!("file is shorter than the {HEADER_LEN}-byte header");
        }
        if bytes[0..4] != MAGIC {
            bail!("bad magic (not an SFBL container)");
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let version = word(4);
        if version != FORMAT_VERSION {
            bail!("unsupported format version {version} (expected {FORMAT_VERSION})");
        }
        let scalar = ScalarCode::from_u32(word(8))?;
        let rows = word(12) as usize;
        let cols = word(16) as usize;
        if rows == 0 || cols == 0 {
            bail!("container dimensions must be positive (got {rows}x{cols})");
        }
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(scalar.width()))
            .context("container dimensions overflow")?;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected {
            bail!(
                "payload length {} does not match header ({rows}x{cols} {}-byte scalars = {expected})",
                payload.len(),
                scalar.width()
            );
        }
        let values: Vec<f64> = match scalar {
            ScalarCode::F32 => payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                .collect(),
            ScalarCode::F64 => payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        };
        if values.iter().any(|v| v.is_nan()) {
            bail!("container holds NaN scalars");
        }
        Ok(MatrixFile {
            scalar,
            rows,
            cols,
            values,
        })
    };
    parse(&bytes).with_context(|| format!("invalid container {}", path.display()))
}

pub fn write_matrix(
    path: &Path,
    scalar: ScalarCode,
    rows: usize,
    cols: usize,
    values: &[f64],
) -> Result<()> {
    if values.len() != rows * cols {
        bail!(
            "matrix payload has {} values, expected {rows}x{cols} = {}",
            values.len(),
            rows * cols
        );
    }
    if values.iter().any(|v| v.is_nan()) {
        bail!("refusing to write NaN scalars");
    }
    let rows32 = u32::try_from(rows).context("row count exceeds u32")?;
    let cols32 = u32::try_from(cols).context("column count exceeds u32")?;
    let mut bytes = Vec::with_capacity(HEADER_LEN + values.len() * scalar.width());
    bytes.extend_from_slice(&MAGIC);
    bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    bytes.extend_from_slice(&scalar.to_u32().to_le_bytes());
    bytes.extend_from_slice(&rows32.to_le_bytes());
    bytes.extend_from_slice(&cols32.to_le_bytes());
    match scalar {
        ScalarCode::F32 => {
            for &v in values {
                bytes.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        ScalarCode::F64 => {
            for &v in values {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    fs::write(path, bytes).with_context(|| format!("writing container {}", path.display()))
}

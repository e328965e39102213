//! Byte-exact codecs.
//!
//! PGM is the strict binary (`P5`) subset: header `P5\n<w> <h>\n<maxval>\n`
//! with single separators and no comments, followed by row-major samples
//! (1 byte when `maxval <= 255`, else 2 bytes big-endian).
//!
//! sf32 is `SFLD`, then width and height as `u32` little-endian, then
//! `width * height` little-endian IEEE binary32 values, row-major.

use super::{BinaryGrid, Grid, LabelMap, ScalarField};
use crate::error::{Error, Result};

const SF32_MAGIC: &[u8; 4] = b"SFLD";
const SF32_HEADER_LEN: usize = 12;

/// Which grid type to decode a byte stream as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    PgmBinary,
    PgmLabel,
    Sf32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decoded {
    Binary(BinaryGrid),
    Labels(LabelMap),
    Scalar(ScalarField),
}

pub fn decode(bytes: &[u8], kind: GridKind) -> Result<Decoded> {
    Ok(match kind {
        GridKind::PgmBinary => Decoded::Binary(decode_binary(bytes)?),
        GridKind::PgmLabel => Decoded::Labels(decode_labels(bytes)?),
        GridKind::Sf32 => Decoded::Scalar(decode_scalar(bytes)?),
    })
}

pub fn encode(grid: &Decoded) -> Result<Vec<u8>> {
    match grid {
        Decoded::Binary(g) => Ok(encode_binary(g)),
        Decoded::Labels(g) => encode_labels(g),
        Decoded::Scalar(g) => encode_scalar(g),
    }
}

/// Zero is background, any other sample is foreground.
pub fn decode_binary(bytes: &[u8]) -> Result<BinaryGrid> {
    let pgm = parse_pgm(bytes)?;
    BinaryGrid::new(pgm.width, pgm.height, pgm.samples.iter().map(|&s| s != 0).collect())
        .map_err(|e| Error::format(0, e.to_string()))
}

pub fn decode_labels(bytes: &[u8]) -> Result<LabelMap> {
    let pgm = parse_pgm(bytes)?;
    LabelMap::new(pgm.width, pgm.height, pgm.samples.iter().map(|&s| s as u32).collect())
        .map_err(|e| Error::format(0, e.to_string()))
}

pub fn decode_scalar(bytes: &[u8]) -> Result<ScalarField> {
    if bytes.len() < SF32_HEADER_LEN {
        return Err(Error::format(
            bytes.len(),
            format!("sf32 header needs {SF32_HEADER_LEN} bytes, found {}", bytes.len()),
        ));
    }
    if &bytes[..4] != SF32_MAGIC {
        return Err(Error::format(0, "missing SFLD magic"));
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if width == 0 {
        return Err(Error::format(4, "width must be positive"));
    }
    if height == 0 {
        return Err(Error::format(8, "height must be positive"));
    }
    let payload = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::format(4, format!("dimensions {width}x{height} overflow")))?;
    expect_payload(bytes, SF32_HEADER_LEN, payload)?;

    let mut cells = Vec::with_capacity(width * height);
    for (i, chunk) in bytes[SF32_HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::format(SF32_HEADER_LEN + 4 * i, "non-finite sample"));
        }
        cells.push(v as f64);
    }
    Ok(Grid {
        width,
        height,
        cells,
    })
}

pub fn encode_binary(grid: &BinaryGrid) -> Vec<u8> {
    let mut out = pgm_header(grid.width(), grid.height(), 255);
    out.extend(grid.cells().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

/// Always written as 16-bit samples (`maxval` 65535).
pub fn encode_labels(grid: &LabelMap) -> Result<Vec<u8>> {
    let max = grid.max_label();
    if max > u16::MAX as u32 {
        return Err(Error::validation(format!(
            "label {max} does not fit a 16-bit PGM (max 65535)"
        )));
    }
    let mut out = pgm_header(grid.width(), grid.height(), u16::MAX as u32);
    for &l in grid.cells() {
        out.extend_from_slice(&(l as u16).to_be_bytes());
    }
    Ok(out)
}

/// 8-bit PGM (`maxval` 255), used for grayscale overlays.
pub fn encode_labels_8bit(grid: &LabelMap) -> Result<Vec<u8>> {
    let max = grid.max_label();
    if max > 255 {
        return Err(Error::validation(format!(
            "value {max} does not fit an 8-bit PGM (max 255)"
        )));
    }
    let mut out = pgm_header(grid.width(), grid.height(), 255);
    out.extend(grid.cells().iter().map(|&l| l as u8));
    Ok(out)
}

/// Values are narrowed to binary32; fields read from sf32 round-trip exactly.
pub fn encode_scalar(grid: &ScalarField) -> Result<Vec<u8>> {
    if grid.width() > u32::MAX as usize || grid.height() > u32::MAX as usize {
        return Err(Error::validation("sf32 dimensions exceed u32"));
    }
    let mut out = Vec::with_capacity(SF32_HEADER_LEN + 4 * grid.len());
    out.extend_from_slice(SF32_MAGIC);
    out.extend_from_slice(&(grid.width() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.height() as u32).to_le_bytes());
    for (i, &v) in grid.cells().iter().enumerate() {
        let narrowed = v as f32;
        if !narrowed.is_finite() {
            return Err(Error::validation(format!(
                "value {v} at index {i} overflows binary32"
            )));
        }
        out.extend_from_slice(&narrowed.to_le_bytes());
    }
    Ok(out)
}

fn pgm_header(width: usize, height: usize, maxval: u32) -> Vec<u8> {
    format!("P5\n{width} {height}\n{maxval}\n").into_bytes()
}

struct Pgm {
    width: usize,
    height: usize,
    samples: Vec<u16>,
}

fn parse_pgm(bytes: &[u8]) -> Result<Pgm> {
    if bytes.len() < 3 || &bytes[..3] != b"P5\n" {
        return Err(Error::format(0, "expected \"P5\\n\" magic"));
    }
    let mut pos = 3;
    let width = parse_decimal(bytes, &mut pos, b' ', "width")?;
    let height_at = pos;
    let height = parse_decimal(bytes, &mut pos, b'\n', "height")?;
    let maxval_at = pos;
    let maxval = parse_decimal(bytes, &mut pos, b'\n', "maxval")?;
    if width == 0 {
        return Err(Error::format(3, "width must be positive"));
    }
    if height == 0 {
        return Err(Error::format(height_at, "height must be positive"));
    }
    if maxval == 0 || maxval > u16::MAX as usize {
        return Err(Error::format(maxval_at, format!("maxval {maxval} outside 1..=65535")));
    }

    let bytes_per = if maxval <= 255 { 1 } else { 2 };
    let payload = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(bytes_per))
        .ok_or_else(|| Error::format(3, format!("dimensions {width}x{height} overflow")))?;
    expect_payload(bytes, pos, payload)?;

    let data = &bytes[pos..];
    let samples: Vec<u16> = if bytes_per == 1 {
        data.iter().map(|&b| b as u16).collect()
    } else {
        data.chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    if let Some(i) = samples.iter().position(|&s| s as usize > maxval) {
        return Err(Error::format(
            pos + i * bytes_per,
            format!("sample {} exceeds maxval {maxval}", samples[i]),
        ));
    }
    Ok(Pgm {
        width,
        height,
        samples,
    })
}

fn parse_decimal(bytes: &[u8], pos: &mut usize, terminator: u8, field: &str) -> Result<usize> {
    let start = *pos;
    let mut value: usize = 0;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((bytes[*pos] - b'0') as usize))
            .ok_or_else(|| Error::format(start, format!("{field} overflows")))?;
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::format(start, format!("expected decimal {field}")));
    }
    match bytes.get(*pos) {
        Some(&b) if b == terminator => {
            *pos += 1;
            Ok(value)
        }
        Some(_) => Err(Error::format(
            *pos,
            format!("expected {:?} after {field}", terminator as char),
        )),
        None => Err(Error::format(*pos, format!("header truncated after {field}"))),
    }
}

fn expect_payload(bytes: &[u8], start: usize, len: usize) -> Result<()> {
    let available = bytes.len() - start;
    if available < len {
        return Err(Error::format(
            bytes.len(),
            format!("payload truncated: expected {len} bytes, found {available}"),
        ));
    }
    if available > len {
        return Err(Error::format(
            start + len,
            format!("{} trailing bytes after payload", available - len),
        ));
    }
    Ok(())
}

//! On-disk formats: 8-bit PGM for viewing, and a lossless binary grid
//! format for exact round-tripping of intermediates.
//!
//! # PGM
//!
//! Both the ASCII (`P2`) and binary (`P5`) variants are supported with
//! `maxval ≤ 255`. Writing quantizes intensities from `[0, 1]` to `0..=255`
//! (values outside the range are clamped first); reading maps sample values
//! back to `[0, 1]` by dividing by the declared maxval. Masks are written as
//! `P5` with samples 0/255 and read back with a mid-scale threshold.
//!
//! # Grid format
//!
//! A bit-exact container for square `f64` arrays:
//!
//! ```text
//! F64GRID\n
//! <n>\n
//! <n*n little-endian IEEE-754 doubles, row-major>
//! ```
//!
//! Every finite double round-trips exactly.

use crate::{Error, Mask, RealImage, Result};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

const GRID_MAGIC: &[u8] = b"F64GRID\n";

fn format_err(path: &Path, format: &'static str, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        format,
        reason: reason.into(),
    }
}

/// Write a real image as 8-bit PGM. `binary` selects `P5` over `P2`.
///
/// Intensities are clamped to `[0, 1]` and quantized to `0..=255` by
/// round-to-nearest.
pub fn write_pgm(path: impl AsRef<Path>, img: &RealImage, binary: bool) -> Result<()> {
    let path = path.as_ref();
    let (rows, cols) = img.dim();
    let quantize = |x: f64| -> u8 { (x.clamp(0.0, 1.0) * 255.0).round() as u8 };
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    if binary {
        write!(w, "P5\n{cols} {rows}\n255\n")?;
        let bytes: Vec<u8> = img.iter().map(|&x| quantize(x)).collect();
        w.write_all(&bytes)?;
    } else {
        write!(w, "P2\n{cols} {rows}\n255\n")?;
        for row in img.rows() {
            let line: Vec<String> = row.iter().map(|&x| quantize(x).to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write a sampling mask as binary PGM with samples 0 (unsampled) / 255.
pub fn write_mask_pgm(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    let img = mask.mapv(|b| if b { 1.0 } else { 0.0 });
    write_pgm(path, &img, true)
}

/// Read a PGM file (either `P2` or `P5`, `maxval ≤ 255`) into intensities
/// in `[0, 1]`.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<RealImage> {
    let path = path.as_ref();
    let data = fs::read(path)?;

    // Header tokens are separated by whitespace; `#` starts a comment that
    // runs to end of line. Tokenize until magic, width, height, maxval are
    // consumed, then the sample data begins.
    let mut pos = 0usize;
    let mut tokens: Vec<String> = Vec::new();
    while tokens.len() < 4 {
        if pos >= data.len() {
            return Err(format_err(path, "PGM", "truncated header"));
        }
        let b = data[pos];
        if b == b'#' {
            while pos < data.len() && data[pos] != b'\n' {
                pos += 1;
            }
        } else if b.is_ascii_whitespace() {
            pos += 1;
        } else {
            let start = pos;
            while pos < data.len() && !data[pos].is_ascii_whitespace() && data[pos] != b'#' {
                pos += 1;
            }
            tokens.push(
                std::str::from_utf8(&data[start..pos])
                    .map_err(|_| format_err(path, "PGM", "non-ASCII header"))?
                    .to_string(),
            );
        }
    }

    let magic = tokens[0].as_str();
    let cols: usize = tokens[1]
        .parse()
        .map_err(|_| format_err(path, "PGM", "bad width"))?;
    let rows: usize = tokens[2]
        .parse()
        .map_err(|_| format_err(path, "PGM", "bad height"))?;
    let maxval: u32 = tokens[3]
        .parse()
        .map_err(|_| format_err(path, "PGM", "bad maxval"))?;
    if maxval == 0 || maxval > 255 {
        return Err(format_err(path, "PGM", format!("unsupported maxval {maxval}")));
    }
    let scale = 1.0 / f64::from(maxval);

    let mut img = RealImage::zeros((rows, cols));
    match magic {
        "P5" => {
            // Exactly one whitespace byte separates the header from samples.
            pos += 1;
            let need = rows * cols;
            if data.len() < pos + need {
                return Err(format_err(path, "PGM", "truncated P5 samples"));
            }
            for (k, px) in img.iter_mut().enumerate() {
                *px = f64::from(data[pos + k]) * scale;
            }
        }
        "P2" => {
            let text = std::str::from_utf8(&data[pos..])
                .map_err(|_| format_err(path, "PGM", "non-ASCII P2 samples"))?;
            let mut values = text.split_ascii_whitespace();
            for px in img.iter_mut() {
                let tok = values
                    .next()
                    .ok_or_else(|| format_err(path, "PGM", "truncated P2 samples"))?;
                let v: u32 = tok
                    .parse()
                    .map_err(|_| format_err(path, "PGM", "bad P2 sample"))?;
                *px = f64::from(v) * scale;
            }
        }
        other => {
            return Err(format_err(path, "PGM", format!("unknown magic {other:?}")));
        }
    }
    Ok(img)
}

/// Read a mask written by [`write_mask_pgm`]: samples above half scale are
/// treated as sampled.
pub fn read_mask_pgm(path: impl AsRef<Path>) -> Result<Mask> {
    let img = read_pgm(path)?;
    Ok(img.mapv(|x| x > 0.5))
}

/// Write a square array in the lossless grid format.
pub fn write_grid(path: impl AsRef<Path>, img: &RealImage) -> Result<()> {
    let path = path.as_ref();
    let n = crate::validate::require_square(img)?;
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(GRID_MAGIC)?;
    writeln!(w, "{n}")?;
    for &x in img.iter() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a square array from the lossless grid format.
pub fn read_grid(path: impl AsRef<Path>) -> Result<RealImage> {
    let path = path.as_ref();
    let data = fs::read(path)?;
    if data.len() < GRID_MAGIC.len() || &data[..GRID_MAGIC.len()] != GRID_MAGIC {
        return Err(format_err(path, "grid", "missing magic"));
    }
    let mut pos = GRID_MAGIC.len();
    let line_end = data[pos..]
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| format_err(path, "grid", "missing size line"))?;
    let n: usize = std::str::from_utf8(&data[pos..pos + line_end])
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| format_err(path, "grid", "bad size line"))?;
    pos += line_end + 1;

    let need = n * n * 8;
    if data.len() != pos + need {
        return Err(format_err(
            path,
            "grid",
            format!("expected {} payload bytes, found {}", need, data.len() - pos),
        ));
    }
    let mut img = RealImage::zeros((n, n));
    for (k, px) in img.iter_mut().enumerate() {
        let at = pos + 8 * k;
        let bytes: [u8; 8] = data[at..at + 8].try_into().expect("slice length 8");
        *px = f64::from_le_bytes(bytes);
    }
    Ok(img)
}

/// Read an image by file extension: `.pgm` as PGM, anything else as grid.
pub fn read_image_auto(path: impl AsRef<Path>) -> Result<RealImage> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => read_pgm(path),
        _ => read_grid(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn ramp(n: usize) -> RealImage {
        Array2::from_shape_fn((n, n), |(i, j)| (i * n + j) as f64 / (n * n) as f64)
    }

    #[test]
    fn grid_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.grid");
        let img = Array2::from_shape_fn((7, 7), |(i, j)| {
            ((i + 1) as f64).ln() * 1e-3 + (j as f64) * std::f64::consts::PI
        });
        write_grid(&path, &img).unwrap();
        let back = read_grid(&path).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn pgm_p2_and_p5_read_back_identically() {
        let dir = tempfile::tempdir().unwrap();
        let img = ramp(9);
        let p2 = dir.path().join("a.pgm");
        let p5 = dir.path().join("b.pgm");
        write_pgm(&p2, &img, false).unwrap();
        write_pgm(&p5, &img, true).unwrap();
        let a = read_pgm(&p2).unwrap();
        let b = read_pgm(&p5).unwrap();
        assert_eq!(a, b);
        // Quantization error is at most half a step of 1/255.
        for (x, y) in img.iter().zip(a.iter()) {
            assert!((x - y).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn pgm_header_comments_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.pgm");
        std::fs::write(&path, b"P2\n# a comment\n2 2\n255\n0 128\n255 64\n").unwrap();
        let img = read_pgm(&path).unwrap();
        assert_eq!(img[[0, 1]], 128.0 / 255.0);
        assert_eq!(img[[1, 0]], 1.0);
    }

    #[test]
    fn mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        let mask = Array2::from_shape_fn((6, 6), |(i, j)| (i + j) % 3 == 0);
        write_mask_pgm(&path, &mask).unwrap();
        assert_eq!(read_mask_pgm(&path).unwrap(), mask);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.grid");
        std::fs::write(&path, b"NOTMAGIC").unwrap();
        assert!(matches!(read_grid(&path), Err(Error::Format { .. })));
    }
}

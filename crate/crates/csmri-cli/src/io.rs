//! File formats: the lossless text grid, 8-bit PGM renderings, and the
//! gnuplot companion script.
//!
//! Grid format (self-describing, full `f64` round-trip):
//!
//! ```text
//! csmri-grid 1
//! <rows> <cols>
//! <row of cols space-separated floats>
//! ...
//! ```
//!
//! Floats are printed with Rust's shortest-round-trip formatting, so
//! write → read reproduces every bit.

use csmri_core::RealImage;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

const GRID_MAGIC: &str = "csmri-grid 1";

pub fn write_grid(path: &Path, img: &RealImage) -> io::Result<()> {
    let (rows, cols) = img.dim();
    let mut text = String::with_capacity(rows * cols * 20);
    let _ = writeln!(text, "{GRID_MAGIC}");
    let _ = writeln!(text, "{rows} {cols}");
    for i in 0..rows {
        for j in 0..cols {
            if j > 0 {
                text.push(' ');
            }
            let _ = write!(text, "{}", img[[i, j]]);
        }
        text.push('\n');
    }
    std::fs::write(path, text)
}

pub fn read_grid(path: &Path) -> io::Result<RealImage> {
    let text = std::fs::read_to_string(path)?;
    let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {msg}", path.display()));
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(GRID_MAGIC) {
        return Err(bad("missing grid header"));
    }
    let dims = lines.next().ok_or_else(|| bad("missing dimensions"))?;
    let mut it = dims.split_whitespace();
    let rows: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad row count"))?;
    let cols: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad column count"))?;
    let mut data = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        if i >= rows {
            if !line.trim().is_empty() {
                return Err(bad("trailing data"));
            }
            continue;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| bad("bad float"))?;
            data.push(v);
        }
    }
    if data.len() != rows * cols {
        return Err(bad("value count does not match dimensions"));
    }
    RealImage::from_shape_vec((rows, cols), data)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// 8-bit min–max windowing: the smallest value maps to 0, the largest to
/// 255; a constant image maps to mid-gray.
pub fn window_to_bytes(img: &RealImage) -> Vec<u8> {
    let lo = img.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = img.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    img.iter()
        .map(|&v| {
            if span > 0.0 {
                ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                128
            }
        })
        .collect()
}

/// ASCII PGM (P2) with min–max windowing.
pub fn write_pgm_p2(path: &Path, img: &RealImage) -> io::Result<()> {
    let (rows, cols) = img.dim();
    let bytes = window_to_bytes(img);
    let mut text = String::with_capacity(rows * cols * 4);
    let _ = writeln!(text, "P2");
    let _ = writeln!(text, "{cols} {rows}");
    let _ = writeln!(text, "255");
    for i in 0..rows {
        for j in 0..cols {
            if j > 0 {
                text.push(' ');
            }
            let _ = write!(text, "{}", bytes[i * cols + j]);
        }
        text.push('\n');
    }
    std::fs::write(path, text)
}

/// Binary PGM (P5) with min–max windowing.
pub fn write_pgm_p5(path: &Path, img: &RealImage) -> io::Result<()> {
    let (rows, cols) = img.dim();
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(window_to_bytes(img));
    std::fs::write(path, out)
}

/// Boolean mask as a 0/255 ASCII PGM.
pub fn write_mask_pgm(path: &Path, mask: &csmri_core::Mask) -> io::Result<()> {
    let img = RealImage::from_shape_fn(mask.dim(), |idx| if mask[idx] { 1.0 } else { 0.0 });
    write_pgm_p2(path, &img)
}

pub fn write_mask_grid(path: &Path, mask: &csmri_core::Mask) -> io::Result<()> {
    let img = RealImage::from_shape_fn(mask.dim(), |idx| if mask[idx] { 1.0 } else { 0.0 });
    write_grid(path, &img)
}

/// Absolute error map `|u - reference|`.
pub fn error_map(u: &RealImage, reference: &RealImage) -> RealImage {
    let mut e = u - reference;
    e.mapv_inplace(f64::abs);
    e
}

/// A small gnuplot script that plots the SNR and data-term columns of the
/// per-iteration log next to it.
pub fn write_gnuplot_script(path: &Path, csv_name: &str) -> io::Result<()> {
    let script = format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'iteration'\n\
         set terminal pngcairo size 900,600\n\
         set output 'snr.png'\n\
         set ylabel 'SNR (dB)'\n\
         plot '{csv_name}' using 1:9 with lines title 'SNR'\n\
         set output 'data_term.png'\n\
         set logscale y\n\
         set ylabel 'data term'\n\
         plot '{csv_name}' using 1:5 with lines title 'data term'\n"
    );
    std::fs::write(path, script)
}

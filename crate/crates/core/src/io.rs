//! Plain-text serialization: CSV for images and sinograms (one matrix row
//! per line, full-precision decimals, no header) and ASCII PGM (P2) export
//! for images.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::sinogram::Sinogram;

fn matrix_to_csv(values: &[f64], width: usize) -> String {
    let mut out = String::new();
    for row in values.chunks(width) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Parse a headerless CSV matrix; dimensions are inferred and must be
/// rectangular.
fn matrix_from_csv(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut width = 0usize;
    let mut rows = 0usize;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0usize;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|e| Error::Parse {
                line: idx + 1,
                message: format!("bad value '{field}': {e}"),
            })?;
            values.push(v);
            count += 1;
        }
        if rows == 0 {
            width = count;
        } else if count != width {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("row has {count} values, expected {width}"),
            });
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "empty matrix".into(),
        });
    }
    Ok((width, rows, values))
}

pub fn image_to_csv(image: &Image) -> String {
    matrix_to_csv(image.values(), image.width())
}

pub fn image_from_csv(text: &str) -> Result<Image> {
    let (width, height, values) = matrix_from_csv(text)?;
    Image::new(width, height, values)
}

pub fn sinogram_to_csv(sino: &Sinogram) -> String {
    matrix_to_csv(sino.values(), sino.n_detectors())
}

pub fn sinogram_from_csv(text: &str) -> Result<Sinogram> {
    let (n_detectors, n_angles, values) = matrix_from_csv(text)?;
    Sinogram::new(n_angles, n_detectors, values)
}

pub fn write_image_csv(image: &Image, path: &Path) -> Result<()> {
    fs::write(path, image_to_csv(image))?;
    Ok(())
}

pub fn read_image_csv(path: &Path) -> Result<Image> {
    image_from_csv(&fs::read_to_string(path)?)
}

pub fn write_sinogram_csv(sino: &Sinogram, path: &Path) -> Result<()> {
    fs::write(path, sinogram_to_csv(sino))?;
    Ok(())
}

pub fn read_sinogram_csv(path: &Path) -> Result<Sinogram> {
    sinogram_from_csv(&fs::read_to_string(path)?)
}

/// ASCII PGM (P2) with values linearly rescaled to 0..=65535; constant
/// images map to 0.
pub fn image_to_pgm(image: &Image) -> String {
    let (min, max) = (image.min(), image.max());
    let span = max - min;
    let mut out = format!("P2\n{} {}\n65535\n", image.width(), image.height());
    for row in image.values().chunks(image.width()) {
        let mut first = true;
        for &v in row {
            if !first {
                out.push(' ');
            }
            let level = if span > 0.0 {
                ((v - min) / span * 65535.0).round() as u32
            } else {
                0
            };
            out.push_str(&level.to_string());
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn write_image_pgm(image: &Image, path: &Path) -> Result<()> {
    fs::write(path, image_to_pgm(image))?;
    Ok(())
}

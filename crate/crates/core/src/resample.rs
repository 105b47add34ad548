//! Upsampling and smoothing for coarse-estimate post-processing: bilinear
//! resize followed by a truncated Gaussian whose kernel is renormalized over
//! the in-bounds window, so constants pass through unchanged.

use crate::error::{Error, Result};
use crate::image::Image;

/// Bilinear upsampling to `target_w x target_h`, then Gaussian smoothing
/// with standard deviation `sigma` (radius `ceil(3 sigma)`); `sigma == 0`
/// skips the smoothing stage.
pub fn upsample_and_smooth(
    image: &Image,
    target_w: usize,
    target_h: usize,
    sigma: f64,
) -> Result<Image> {
    if target_w < image.width() || target_h < image.height() {
        return Err(Error::invalid(format!(
            "target {}x{} smaller than source {}x{}",
            target_w,
            target_h,
            image.width(),
            image.height()
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma must be a finite nonnegative value"));
    }
    let up = if target_w == image.width() && target_h == image.height() {
        image.clone()
    } else {
        bilinear_upsample(image, target_w, target_h)?
    };
    if sigma == 0.0 {
        return Ok(up);
    }
    gaussian_smooth(&up, sigma)
}

fn bilinear_upsample(image: &Image, target_w: usize, target_h: usize) -> Result<Image> {
    let (sw, sh) = (image.width(), image.height());
    let sx = sw as f64 / target_w as f64;
    let sy = sh as f64 / target_h as f64;
    let mut values = Vec::with_capacity(target_w * target_h);
    for j in 0..target_h {
        // map output pixel centers onto source pixel centers
        let y = ((j as f64 + 0.5) * sy - 0.5).clamp(0.0, (sh - 1) as f64);
        let j0 = y.floor() as usize;
        let j1 = (j0 + 1).min(sh - 1);
        let fy = y - j0 as f64;
        for i in 0..target_w {
            let x = ((i as f64 + 0.5) * sx - 0.5).clamp(0.0, (sw - 1) as f64);
            let i0 = x.floor() as usize;
            let i1 = (i0 + 1).min(sw - 1);
            let fx = x - i0 as f64;
            let v = image.at(j0, i0) * (1.0 - fx) * (1.0 - fy)
                + image.at(j0, i1) * fx * (1.0 - fy)
                + image.at(j1, i0) * (1.0 - fx) * fy
                + image.at(j1, i1) * fx * fy;
            values.push(v);
        }
    }
    Image::new(target_w, target_h, values)
}

fn gaussian_smooth(image: &Image, sigma: f64) -> Result<Image> {
    let radius = (3.0 * sigma).ceil() as usize;
    let kernel: Vec<f64> = (0..=2 * radius)
        .map(|k| {
            let d = k as f64 - radius as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    // Separable passes; per-pixel renormalization over the clipped window is
    // equivalent to renormalizing the 2-D kernel over the rectangular
    // in-bounds window.
    let horizontal = convolve_rows(
        image.values(),
        image.width(),
        image.height(),
        &kernel,
        radius,
    );
    let transposed = transpose(&horizontal, image.width(), image.height());
    let vertical = convolve_rows(&transposed, image.height(), image.width(), &kernel, radius);
    let values = transpose(&vertical, image.height(), image.width());
    Image::new(image.width(), image.height(), values)
}

fn convolve_rows(
    values: &[f64],
    width: usize,
    height: usize,
    kernel: &[f64],
    radius: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for j in 0..height {
        let row = &values[j * width..(j + 1) * width];
        for i in 0..width {
            let mut acc = 0.0;
            let mut norm = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let idx = i as isize + k as isize - radius as isize;
                if idx >= 0 && (idx as usize) < width {
                    acc += kv * row[idx as usize];
                    norm += kv;
                }
            }
            out[j * width + i] = acc / norm;
        }
    }
    out
}

fn transpose(values: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for j in 0..height {
        for i in 0..width {
            out[i * height + j] = values[j * width + i];
        }
    }
    out
}

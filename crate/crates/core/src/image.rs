//! Dense 2-D attenuation images and rectangular regions of interest.
//!
//! Pixel values are attenuation per unit pixel length, so system-matrix
//! weights (intersection lengths in pixel units) and pixel values multiply
//! without unit conversion. Storage is row-major; (row, col) indexes, with
//! col along x and row along y.

use crate::error::{Error, Result};

/// Dense 2-D grid of real attenuation values.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Image {
    /// Build an image from row-major values. All values must be finite and
    /// `values.len()` must equal `width * height`.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be at least 1x1"));
        }
        if values.len() != width * height {
            return Err(Error::mismatch(format!(
                "expected {} values for {}x{} image, got {}",
                width * height,
                width,
                height,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite image value {v}")));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.values[row * self.width + col]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Copy of the `roi.w x roi.h` sub-image.
    pub fn extract_roi(&self, roi: &RoiSpec) -> Result<Image> {
        roi.check_within(self.width, self.height)?;
        let mut values = Vec::with_capacity(roi.w * roi.h);
        for r in 0..roi.h {
            let start = (roi.y0 + r) * self.width + roi.x0;
            values.extend_from_slice(&self.values[start..start + roi.w]);
        }
        Image::new(roi.w, roi.h, values)
    }

    /// Copy of the image with the ROI pixels replaced by `patch`.
    pub fn insert_roi(&self, patch: &Image, roi: &RoiSpec) -> Result<Image> {
        roi.check_within(self.width, self.height)?;
        if patch.width != roi.w || patch.height != roi.h {
            return Err(Error::mismatch(format!(
                "patch is {}x{} but ROI is {}x{}",
                patch.width, patch.height, roi.w, roi.h
            )));
        }
        let mut values = self.values.clone();
        for r in 0..roi.h {
            let dst = (roi.y0 + r) * self.width + roi.x0;
            let src = r * roi.w;
            values[dst..dst + roi.w].copy_from_slice(&patch.values[src..src + roi.w]);
        }
        Image::new(self.width, self.height, values)
    }

    /// Copy of the image with the ROI pixels set exactly to zero.
    pub fn mask_roi(&self, roi: &RoiSpec) -> Result<Image> {
        roi.check_within(self.width, self.height)?;
        let mut values = self.values.clone();
        for r in 0..roi.h {
            let start = (roi.y0 + r) * self.width + roi.x0;
            values[start..start + roi.w].fill(0.0);
        }
        Image::new(self.width, self.height, values)
    }

    /// Copy with all negative values clipped to zero.
    pub fn clipped_nonnegative(&self) -> Image {
        let values = self.values.iter().map(|v| v.max(0.0)).collect();
        Image {
            width: self.width,
            height: self.height,
            values,
        }
    }

    /// Elementwise transform; fails if the result is non-finite.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Image> {
        Image::new(
            self.width,
            self.height,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }
}

/// Rectangular region of interest: top-left pixel `(x0, y0)` (col, row) and
/// extent `w x h` in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoiSpec {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl RoiSpec {
    pub fn new(x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(Error::invalid("ROI extent must be at least 1x1"));
        }
        Ok(Self { x0, y0, w, h })
    }

    pub fn pixel_count(&self) -> usize {
        self.w * self.h
    }

    pub fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.w == 0 || self.h == 0 {
            return Err(Error::invalid("ROI extent must be at least 1x1"));
        }
        if self.x0 + self.w > width || self.y0 + self.h > height {
            return Err(Error::invalid(format!(
                "ROI {}x{} at ({}, {}) exceeds {}x{} image",
                self.w, self.h, self.x0, self.y0, width, height
            )));
        }
        Ok(())
    }

    /// True when image pixel (row, col) lies inside the ROI.
    pub fn contains(&self, row: usize, col: usize) -> bool {
        col >= self.x0 && col < self.x0 + self.w && row >= self.y0 && row < self.y0 + self.h
    }
}

//! Sinograms: (angle x detector) matrices of line integrals.

use crate::error::{Error, Result};

/// Line-integral matrix with one row per projection angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    n_angles: usize,
    n_detectors: usize,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn new(n_angles: usize, n_detectors: usize, values: Vec<f64>) -> Result<Self> {
        if n_angles == 0 || n_detectors == 0 {
            return Err(Error::invalid("sinogram dimensions must be at least 1x1"));
        }
        if values.len() != n_angles * n_detectors {
            return Err(Error::mismatch(format!(
                "expected {} values for {}x{} sinogram, got {}",
                n_angles * n_detectors,
                n_angles,
                n_detectors,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sinogram value {v}")));
        }
        Ok(Self {
            n_angles,
            n_detectors,
            values,
        })
    }

    pub fn zeros(n_angles: usize, n_detectors: usize) -> Result<Self> {
        Self::new(n_angles, n_detectors, vec![0.0; n_angles * n_detectors])
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    pub fn n_detectors(&self) -> usize {
        self.n_detectors
    }

    pub fn n_rays(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value for ray `(angle index, detector index)`.
    pub fn at(&self, angle: usize, detector: usize) -> f64 {
        debug_assert!(angle < self.n_angles && detector < self.n_detectors);
        self.values[angle * self.n_detectors + detector]
    }

    /// Detector row for one angle.
    pub fn row(&self, angle: usize) -> &[f64] {
        let start = angle * self.n_detectors;
        &self.values[start..start + self.n_detectors]
    }

    /// Elementwise difference `self - other`.
    pub fn subtract(&self, other: &Sinogram) -> Result<Sinogram> {
        if self.n_angles != other.n_angles || self.n_detectors != other.n_detectors {
            return Err(Error::mismatch(format!(
                "sinogram {}x{} vs {}x{}",
                self.n_angles, self.n_detectors, other.n_angles, other.n_detectors
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Sinogram::new(self.n_angles, self.n_detectors, values)
    }
}

/// Sum-preserving block aggregation of the detector dimension: each output
/// bin is the sum of `detector_factor` consecutive input bins (the block
/// mean scaled by the factor). The angle dimension is unchanged.
pub fn downsample_sinogram(sino: &Sinogram, detector_factor: usize) -> Result<Sinogram> {
    if detector_factor == 0 {
        return Err(Error::invalid("detector_factor must be at least 1"));
    }
    if !sino.n_detectors.is_multiple_of(detector_factor) {
        return Err(Error::invalid(format!(
            "detector count {} not divisible by factor {}",
            sino.n_detectors, detector_factor
        )));
    }
    let out_det = sino.n_detectors / detector_factor;
    let mut values = Vec::with_capacity(sino.n_angles * out_det);
    for a in 0..sino.n_angles {
        let row = sino.row(a);
        for b in 0..out_det {
            let block = &row[b * detector_factor..(b + 1) * detector_factor];
            values.push(block.iter().sum());
        }
    }
    Sinogram::new(sino.n_angles, out_det, values)
}

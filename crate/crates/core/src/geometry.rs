//! Parallel-beam acquisition geometry.

use crate::error::{Error, Result};

/// Detector-count choice for [`build_geometry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorSpec {
    /// `ceil(image_size * sqrt(2))` bins so every pixel is covered at every angle.
    Auto,
    Fixed(usize),
}

/// Parallel-beam geometry: projection angles over `[0, pi)` plus a centered
/// detector array. Angles are strictly increasing; detector offsets are
/// measured from the rotation center in pixel units.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionGeometry {
    angles: Vec<f64>,
    n_detectors: usize,
    detector_spacing: f64,
    origin: (f64, f64),
}

impl ProjectionGeometry {
    pub fn new(
        angles: Vec<f64>,
        n_detectors: usize,
        detector_spacing: f64,
        origin: (f64, f64),
    ) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("geometry needs at least one angle"));
        }
        if n_detectors == 0 {
            return Err(Error::invalid("geometry needs at least one detector"));
        }
        if !(detector_spacing > 0.0 && detector_spacing.is_finite()) {
            return Err(Error::invalid("detector spacing must be positive"));
        }
        for pair in angles.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid("angles must be strictly increasing"));
            }
        }
        let first = angles[0];
        let last = *angles.last().unwrap();
        if first < 0.0 || last >= std::f64::consts::PI {
            return Err(Error::invalid("angles must lie in [0, pi)"));
        }
        Ok(Self {
            angles,
            n_detectors,
            detector_spacing,
            origin,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn n_detectors(&self) -> usize {
        self.n_detectors
    }

    pub fn detector_spacing(&self) -> f64 {
        self.detector_spacing
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn n_rays(&self) -> usize {
        self.angles.len() * self.n_detectors
    }

    /// Signed offset of detector bin `d` from the rotation center.
    pub fn detector_offset(&self, d: usize) -> f64 {
        (d as f64 - (self.n_detectors as f64 - 1.0) / 2.0) * self.detector_spacing
    }
}

/// Detector count used by [`DetectorSpec::Auto`]: `ceil(image_size * sqrt(2))`.
pub fn auto_detector_count(image_size: usize) -> usize {
    ((image_size as f64) * std::f64::consts::SQRT_2).ceil() as usize
}

/// Uniform geometry: `n_angles` angles at `k * pi / n_angles`, a detector
/// array with 1-pixel spacing centered on the center of an
/// `image_size x image_size` grid.
pub fn build_geometry(
    n_angles: usize,
    detectors: DetectorSpec,
    image_size: usize,
) -> Result<ProjectionGeometry> {
    if n_angles == 0 {
        return Err(Error::invalid("n_angles must be at least 1"));
    }
    if image_size == 0 {
        return Err(Error::invalid("image_size must be at least 1"));
    }
    let n_detectors = match detectors {
        DetectorSpec::Auto => auto_detector_count(image_size),
        DetectorSpec::Fixed(0) => return Err(Error::invalid("n_detectors must be at least 1")),
        DetectorSpec::Fixed(n) => n,
    };
    let angles = (0..n_angles)
        .map(|k| k as f64 * std::f64::consts::PI / n_angles as f64)
        .collect();
    let center = image_size as f64 / 2.0;
    ProjectionGeometry::new(angles, n_detectors, 1.0, (center, center))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn paper_scale_geometry() {
        let g = build_geometry(60, DetectorSpec::Auto, 120).unwrap();
        assert_eq!(g.n_angles(), 60);
        assert_eq!(g.n_detectors(), 170);
        // 3 degree spacing
        assert!((g.angles()[1] - g.angles()[0] - PI / 60.0).abs() < 1e-15);
        assert_eq!(g.origin(), (60.0, 60.0));
    }

    #[test]
    fn degenerate_minimum() {
        let g = build_geometry(1, DetectorSpec::Fixed(1), 1).unwrap();
        assert_eq!(g.angles(), &[0.0]);
        assert_eq!(g.n_detectors(), 1);
        // single detector sits on the rotation center
        assert_eq!(g.detector_offset(0), 0.0);
    }

    #[test]
    fn four_uniform_angles() {
        let g = build_geometry(4, DetectorSpec::Fixed(3), 8).unwrap();
        let expect = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];
        for (a, e) in g.angles().iter().zip(expect) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(build_geometry(0, DetectorSpec::Fixed(4), 8).is_err());
        assert!(build_geometry(4, DetectorSpec::Fixed(0), 8).is_err());
        assert!(build_geometry(4, DetectorSpec::Auto, 0).is_err());
    }

    #[test]
    fn detector_offsets_are_centered() {
        let g = build_geometry(2, DetectorSpec::Fixed(4), 8).unwrap();
        let offsets: Vec<f64> = (0..4).map(|d| g.detector_offset(d)).collect();
        assert_eq!(offsets, vec![-1.5, -0.5, 0.5, 1.5]);
    }
}

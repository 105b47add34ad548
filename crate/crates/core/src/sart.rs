//! Simultaneous algebraic reconstruction technique (SART).
//!
//! Angle-by-angle sweeps from a zero initial image: each angle's ray
//! residuals are normalized by their row sums, redistributed over the rays'
//! pixels weighted by intersection length, normalized by the per-angle
//! column sums, and applied with a relaxation factor. Output is unclipped.
//!
//! Within a sweep, angles are visited in a fixed golden-ratio stride order
//! rather than sequentially: consecutive projections of a finely sampled
//! scan are nearly collinear constraints, and updating them back-to-back
//! stalls convergence as the view count grows. The stride permutation is a
//! pure function of the angle count, so runs stay reproducible.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::sinogram::Sinogram;
use crate::system_matrix::SystemMatrix;

#[derive(Debug, Clone, Copy)]
pub struct SartConfig {
    pub n_iterations: usize,
    pub relaxation: f64,
}

impl Default for SartConfig {
    fn default() -> Self {
        Self {
            n_iterations: 20,
            relaxation: 1.0,
        }
    }
}

impl SartConfig {
    fn validate(&self) -> Result<()> {
        if self.n_iterations == 0 {
            return Err(Error::invalid("SART needs at least one iteration"));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 2.0) {
            return Err(Error::invalid(format!(
                "SART relaxation must lie in (0, 2], got {}",
                self.relaxation
            )));
        }
        Ok(())
    }
}

pub fn sart(sino: &Sinogram, matrix: &SystemMatrix, cfg: &SartConfig) -> Result<Image> {
    cfg.validate()?;
    let geom = matrix.geometry();
    if sino.n_angles() != geom.n_angles() || sino.n_detectors() != geom.n_detectors() {
        return Err(Error::mismatch(format!(
            "sinogram {}x{} vs matrix geometry {}x{}",
            sino.n_angles(),
            sino.n_detectors(),
            geom.n_angles(),
            geom.n_detectors()
        )));
    }

    let n_pixels = matrix.width() * matrix.height();
    let nd = geom.n_detectors();
    let row_sums: Vec<f64> = (0..matrix.n_rays()).map(|r| matrix.row_sum(r)).collect();
    let order = access_order(geom.n_angles());

    let mut x = vec![0.0; n_pixels];
    let mut numer = vec![0.0; n_pixels];
    let mut col_sum = vec![0.0; n_pixels];
    for _ in 0..cfg.n_iterations {
        for &a in &order {
            numer.fill(0.0);
            col_sum.fill(0.0);
            for d in 0..nd {
                let r = a * nd + d;
                if row_sums[r] <= 0.0 {
                    continue; // degenerate ray: skipped, not an error
                }
                let residual = (sino.values()[r] - matrix.row_dot(r, &x)) / row_sums[r];
                let (cols, weights) = matrix.row(r);
                for (&c, &w) in cols.iter().zip(weights) {
                    numer[c as usize] += w * residual;
                    col_sum[c as usize] += w;
                }
            }
            for p in 0..n_pixels {
                if col_sum[p] > 0.0 {
                    x[p] += cfg.relaxation * numer[p] / col_sum[p];
                }
            }
        }
    }
    Image::new(matrix.width(), matrix.height(), x)
}

/// Golden-ratio stride permutation of `0..n`: step `round(n / phi)`
/// adjusted upward until coprime with `n`, so each sweep visits every angle
/// once with maximally spread directions.
fn access_order(n: usize) -> Vec<usize> {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut step = ((n as f64) * 0.618_033_988_749_894_9).round() as usize;
    step = step.max(1);
    while gcd(step, n) != 1 {
        step += 1;
    }
    (0..n).map(|j| (j * step) % n).collect()
}

/// Euclidean norm of `sino - forward(image)`; used for convergence checks.
pub fn projection_residual_norm(
    sino: &Sinogram,
    matrix: &SystemMatrix,
    image: &Image,
) -> Result<f64> {
    let model = crate::system_matrix::forward_project(image, matrix)?;
    let diff = sino.subtract(&model)?;
    Ok(diff.values().iter().map(|v| v * v).sum::<f64>().sqrt())
}

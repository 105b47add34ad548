//! Residual-driven QUBO construction for ROI refinement.
//!
//! ROI pixels are encoded with increasing attenuation levels: bit k of a
//! pixel contributes the level increment `w_k` times that pixel's
//! system-matrix column. Minimizing the squared mismatch between the
//! residual sinogram and the encoded ROI projection expands into an
//! upper-triangular quadratic form plus a constant. The constant keeps the
//! contribution of every ray (including rays that never touch the ROI), so
//! the quadratic form evaluates to the full squared-mismatch objective and
//! a perfect bit assignment reaches energy zero on consistent data.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::image::{Image, RoiSpec};
use crate::levels::LevelScheme;
use crate::sinogram::Sinogram;
use crate::system_matrix::{forward_project, SystemMatrix};

/// Default magnitude below which assembled coefficients are dropped.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// Bijection between variable ids and (ROI row, ROI col, level) triples.
/// Ids are pixel-major (row-major over the ROI patch), level-minor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMap {
    roi_w: usize,
    roi_h: usize,
    n_levels: usize,
}

impl VariableMap {
    pub fn new(roi_w: usize, roi_h: usize, n_levels: usize) -> Result<Self> {
        if roi_w == 0 || roi_h == 0 || n_levels == 0 {
            return Err(Error::invalid("variable map dimensions must be positive"));
        }
        Ok(Self {
            roi_w,
            roi_h,
            n_levels,
        })
    }

    pub fn len(&self) -> usize {
        self.roi_w * self.roi_h * self.n_levels
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn roi_width(&self) -> usize {
        self.roi_w
    }

    pub fn roi_height(&self) -> usize {
        self.roi_h
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    /// Variable id for ROI-local pixel (row, col) at `level` (0-based).
    pub fn var_id(&self, row: usize, col: usize, level: usize) -> usize {
        debug_assert!(row < self.roi_h && col < self.roi_w && level < self.n_levels);
        (row * self.roi_w + col) * self.n_levels + level
    }

    /// Inverse lookup: (row, col, level) for a variable id.
    pub fn triple(&self, id: usize) -> (usize, usize, usize) {
        debug_assert!(id < self.len());
        let pixel = id / self.n_levels;
        (pixel / self.roi_w, pixel % self.roi_w, id % self.n_levels)
    }

    /// CSV serialization, one `var_id,row,col,level` line per variable.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for id in 0..self.len() {
            let (r, c, k) = self.triple(id);
            out.push_str(&format!("{id},{r},{c},{k}\n"));
        }
        out
    }
}

/// Upper-triangular QUBO: sparse coefficients `(u <= v) -> value` plus a
/// constant term. Diagonal entries hold the linear terms (q^2 = q).
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    n: usize,
    /// Sorted by (u, v); all entries satisfy u <= v < n.
    coefficients: Vec<(u32, u32, f64)>,
    constant: f64,
    varmap: Option<VariableMap>,
}

impl QuboProblem {
    pub fn new(
        n: usize,
        mut coefficients: Vec<(u32, u32, f64)>,
        constant: f64,
        varmap: Option<VariableMap>,
    ) -> Result<Self> {
        if !constant.is_finite() {
            return Err(Error::invalid("QUBO constant must be finite"));
        }
        for &(u, v, val) in &coefficients {
            if u > v || (v as usize) >= n {
                return Err(Error::invalid(format!(
                    "coefficient ({u}, {v}) outside upper triangle of size {n}"
                )));
            }
            if !val.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite coefficient at ({u}, {v})"
                )));
            }
        }
        if let Some(map) = &varmap {
            if map.len() != n {
                return Err(Error::mismatch(format!(
                    "variable map covers {} variables, problem has {n}",
                    map.len()
                )));
            }
        }
        coefficients.sort_unstable_by_key(|&(u, v, _)| (u, v));
        for pair in coefficients.windows(2) {
            if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
                return Err(Error::invalid(format!(
                    "duplicate coefficient ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }
        Ok(Self {
            n,
            coefficients,
            constant,
            varmap,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[(u32, u32, f64)] {
        &self.coefficients
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn varmap(&self) -> Option<&VariableMap> {
        self.varmap.as_ref()
    }

    pub fn diagonal(&self, u: usize) -> f64 {
        let u = u as u32;
        self.coefficients
            .binary_search_by_key(&(u, u), |&(a, b, _)| (a, b))
            .map(|i| self.coefficients[i].2)
            .unwrap_or(0.0)
    }

    /// Largest absolute diagonal value; scale reference for annealing.
    pub fn max_abs_diagonal(&self) -> f64 {
        self.coefficients
            .iter()
            .filter(|(u, v, _)| u == v)
            .map(|(_, _, val)| val.abs())
            .fold(0.0, f64::max)
    }
}

/// Signed residual sinogram: measured data minus the projection of the
/// ROI-masked background estimate.
pub fn residual_sinogram(
    measured: &Sinogram,
    background: &Image,
    matrix: &SystemMatrix,
) -> Result<Sinogram> {
    let model = forward_project(background, matrix)?;
    measured.subtract(&model)
}

/// Assemble the refinement QUBO for `roi` against a residual sinogram.
///
/// For variable u = (pixel p, level k) with per-ray response
/// `b_u[r] = w_k * weight(r, p)`:
/// diagonal `Q_uu = sum_r b_u^2 - 2 sum_r b_u res_r`, off-diagonal
/// `Q_uv = 2 sum_r b_u b_v` (u < v), constant `c = sum_r res_r^2` over all
/// rays. Entries with magnitude below `prune_tol` are dropped.
pub fn build_roi_qubo(
    residual: &Sinogram,
    matrix: &SystemMatrix,
    roi: &RoiSpec,
    levels: &LevelScheme,
    prune_tol: f64,
) -> Result<QuboProblem> {
    roi.check_within(matrix.width(), matrix.height())?;
    let geom = matrix.geometry();
    if residual.n_angles() != geom.n_angles() || residual.n_detectors() != geom.n_detectors() {
        return Err(Error::mismatch(format!(
            "residual {}x{} vs matrix geometry {}x{}",
            residual.n_angles(),
            residual.n_detectors(),
            geom.n_angles(),
            geom.n_detectors()
        )));
    }
    if prune_tol.is_nan() || prune_tol < 0.0 {
        return Err(Error::invalid("prune tolerance must be nonnegative"));
    }

    let varmap = VariableMap::new(roi.w, roi.h, levels.count())?;
    let n = varmap.len();
    let weights = levels.weights();

    // Map global pixel index -> ROI-local pixel index.
    let width = matrix.width();
    let roi_pixel = |global: usize| -> Option<usize> {
        let (row, col) = (global / width, global % width);
        roi.contains(row, col)
            .then(|| (row - roi.y0) * roi.w + (col - roi.x0))
    };

    let mut acc: HashMap<(u32, u32), f64> = HashMap::new();
    let mut constant = 0.0;
    let mut ray_vars: Vec<(u32, f64)> = Vec::new();
    for r in 0..matrix.n_rays() {
        let res = residual.values()[r];
        constant += res * res;

        ray_vars.clear();
        let (cols, ws) = matrix.row(r);
        for (&c, &w) in cols.iter().zip(ws) {
            if let Some(p) = roi_pixel(c as usize) {
                let base = (p * levels.count()) as u32;
                for (k, &wk) in weights.iter().enumerate() {
                    ray_vars.push((base + k as u32, wk * w));
                }
            }
        }
        for (i, &(u, bu)) in ray_vars.iter().enumerate() {
            *acc.entry((u, u)).or_insert(0.0) += bu * bu - 2.0 * bu * res;
            for &(v, bv) in &ray_vars[i + 1..] {
                let key = if u <= v { (u, v) } else { (v, u) };
                *acc.entry(key).or_insert(0.0) += 2.0 * bu * bv;
            }
        }
    }

    let coefficients: Vec<(u32, u32, f64)> = acc
        .into_iter()
        .filter(|&(_, val)| val.abs() >= prune_tol && val != 0.0)
        .map(|((u, v), val)| (u, v, val))
        .collect();
    QuboProblem::new(n, coefficients, constant, Some(varmap))
}

/// Quadratic-form energy `sum_{u<=v} Q_uv bits_u bits_v + c`.
pub fn qubo_energy(problem: &QuboProblem, bits: &[bool]) -> Result<f64> {
    if bits.len() != problem.n {
        return Err(Error::mismatch(format!(
            "{} bits for {} variables",
            bits.len(),
            problem.n
        )));
    }
    let mut energy = problem.constant;
    for &(u, v, val) in &problem.coefficients {
        if bits[u as usize] && bits[v as usize] {
            energy += val;
        }
    }
    Ok(energy)
}

/// Decode a bit assignment into the ROI patch image.
///
/// A prefix pattern (levels 1..m set, the rest clear) maps to the level
/// value `alpha_m` exactly; other patterns take the sum of their set
/// increments.
pub fn decode_solution(bits: &[bool], varmap: &VariableMap, levels: &LevelScheme) -> Result<Image> {
    if bits.len() != varmap.len() {
        return Err(Error::mismatch(format!(
            "{} bits for {} variables",
            bits.len(),
            varmap.len()
        )));
    }
    if levels.count() != varmap.n_levels() {
        return Err(Error::mismatch(format!(
            "level scheme has {} levels, variable map expects {}",
            levels.count(),
            varmap.n_levels()
        )));
    }
    let k = levels.count();
    let mut values = Vec::with_capacity(varmap.roi_w * varmap.roi_h);
    for pixel in 0..varmap.roi_w * varmap.roi_h {
        let pixel_bits = &bits[pixel * k..(pixel + 1) * k];
        let m = pixel_bits.iter().take_while(|&&b| b).count();
        let value = if pixel_bits[m..].iter().all(|&b| !b) {
            // prefix pattern: telescoped sum is the level itself
            if m == 0 {
                0.0
            } else {
                levels.alphas()[m - 1]
            }
        } else {
            pixel_bits
                .iter()
                .zip(levels.weights())
                .filter(|(&b, _)| b)
                .map(|(_, &w)| w)
                .sum()
        };
        values.push(value);
    }
    Image::new(varmap.roi_w, varmap.roi_h, values)
}

/// Inverse of [`decode_solution`] for discrete patches: level value
/// `alpha_m` becomes bits 1..m set; anything outside the level set is an
/// error.
pub fn encode_ground_truth(patch: &Image, levels: &LevelScheme) -> Result<Vec<bool>> {
    let k = levels.count();
    let mut bits = Vec::with_capacity(patch.values().len() * k);
    for &v in patch.values() {
        match levels.prefix_of(v) {
            Some(m) => bits.extend((0..k).map(|i| i < m)),
            None => {
                return Err(Error::invalid(format!(
                    "patch value {v} is not 0 or a scheme level"
                )))
            }
        }
    }
    Ok(bits)
}

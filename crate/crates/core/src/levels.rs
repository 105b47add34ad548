//! Discrete attenuation-level schemes for the binary pixel encoding.
//!
//! A pixel with bits `q_1..q_K` takes the value
//! `alpha_1 q_1 + sum_k (alpha_k - alpha_{k-1}) q_k`, so the all-ones prefix
//! of length m reproduces `alpha_m`. The weights must telescope back to the
//! levels exactly in floating point; the constructor verifies this.

use crate::error::{Error, Result};

/// Strictly increasing positive attenuation levels `alpha_1 < ... < alpha_K`
/// with derived increment weights `w_1 = alpha_1`, `w_k = alpha_k - alpha_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme {
    alphas: Vec<f64>,
    weights: Vec<f64>,
}

impl LevelScheme {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::invalid("level scheme needs at least one level"));
        }
        let mut prev = 0.0;
        for &a in &alphas {
            if !(a.is_finite() && a > prev) {
                return Err(Error::invalid(format!(
                    "levels must be finite, positive and strictly increasing (got {a} after {prev})"
                )));
            }
            prev = a;
        }
        let mut weights = Vec::with_capacity(alphas.len());
        weights.push(alphas[0]);
        for k in 1..alphas.len() {
            weights.push(alphas[k] - alphas[k - 1]);
        }
        // Partial sums of the weights must reproduce each alpha bitwise;
        // decoding relies on it.
        let mut acc = 0.0;
        for (k, &w) in weights.iter().enumerate() {
            acc += w;
            if acc != alphas[k] {
                return Err(Error::invalid(format!(
                    "level weights do not telescope exactly at level {} ({} vs {})",
                    k + 1,
                    acc,
                    alphas[k]
                )));
            }
        }
        Ok(Self { alphas, weights })
    }

    /// Number of levels K.
    pub fn count(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Map a pixel value to a prefix length: 0 for 0.0, m for `alpha_m`,
    /// None for anything else.
    pub fn prefix_of(&self, value: f64) -> Option<usize> {
        if value == 0.0 {
            return Some(0);
        }
        self.alphas.iter().position(|&a| a == value).map(|m| m + 1)
    }
}

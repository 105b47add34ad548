//! ROI / non-ROI error metrics and the comparison-table CSV.

use crate::error::{Error, Result};
use crate::image::{Image, RoiSpec};

/// RMSE/MAE over the ROI and its strict complement, plus the pixel counts
/// and the min/max of the evaluated image (overshoot diagnostic).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rmse_roi: f64,
    pub mae_roi: f64,
    pub rmse_nonroi: f64,
    pub mae_nonroi: f64,
    pub roi_pixels: usize,
    pub nonroi_pixels: usize,
    pub min: f64,
    pub max: f64,
}

pub fn compute_metrics(truth: &Image, recon: &Image, roi: &RoiSpec) -> Result<MetricsReport> {
    if truth.width() != recon.width() || truth.height() != recon.height() {
        return Err(Error::mismatch(format!(
            "truth {}x{} vs reconstruction {}x{}",
            truth.width(),
            truth.height(),
            recon.width(),
            recon.height()
        )));
    }
    roi.check_within(truth.width(), truth.height())?;

    let mut sq = [0.0f64; 2]; // [roi, nonroi]
    let mut abs = [0.0f64; 2];
    let mut count = [0usize; 2];
    for row in 0..truth.height() {
        for col in 0..truth.width() {
            let region = if roi.contains(row, col) { 0 } else { 1 };
            let d = truth.at(row, col) - recon.at(row, col);
            sq[region] += d * d;
            abs[region] += d.abs();
            count[region] += 1;
        }
    }
    let rmse = |i: usize| {
        if count[i] == 0 {
            0.0
        } else {
            (sq[i] / count[i] as f64).sqrt()
        }
    };
    let mae = |i: usize| {
        if count[i] == 0 {
            0.0
        } else {
            abs[i] / count[i] as f64
        }
    };
    Ok(MetricsReport {
        rmse_roi: rmse(0),
        mae_roi: mae(0),
        rmse_nonroi: rmse(1),
        mae_nonroi: mae(1),
        roi_pixels: count[0],
        nonroi_pixels: count[1],
        min: recon.min(),
        max: recon.max(),
    })
}

/// One parsed row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub pipeline: String,
    pub rmse_roi: f64,
    pub mae_roi: f64,
    pub rmse_nonroi: f64,
    pub mae_nonroi: f64,
    pub min: f64,
    pub max: f64,
}

pub const COMPARISON_HEADER: &str = "pipeline,rmse_roi,mae_roi,rmse_nonroi,mae_nonroi,min,max";

/// CSV table with one row per labeled report, input order preserved.
pub fn emit_comparison_table(results: &[(String, MetricsReport)]) -> Result<String> {
    if results.is_empty() {
        return Err(Error::invalid("comparison table needs at least one row"));
    }
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for (label, r) in results {
        out.push_str(&format!(
            "{label},{},{},{},{},{},{}\n",
            r.rmse_roi, r.mae_roi, r.rmse_nonroi, r.mae_nonroi, r.min, r.max
        ));
    }
    Ok(out)
}

pub fn parse_comparison_table(text: &str) -> Result<Vec<ComparisonRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == COMPARISON_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected header '{header}'"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty table".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                message: format!("bad number '{s}': {e}"),
            })
        };
        rows.push(ComparisonRow {
            pipeline: fields[0].to_string(),
            rmse_roi: num(fields[1])?,
            mae_roi: num(fields[2])?,
            rmse_nonroi: num(fields[3])?,
            mae_nonroi: num(fields[4])?,
            min: num(fields[5])?,
            max: num(fields[6])?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "table has no rows".into(),
        });
    }
    Ok(rows)
}

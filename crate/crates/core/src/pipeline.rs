//! End-to-end hybrid reconstruction: coarse global stage, ROI masking,
//! residual formation, QUBO refinement, ROI insertion, metrics.
//!
//! The coarse stage may use its own (typically denser) angular sampling;
//! the residual and refinement stages always use the measurement geometry,
//! so the refinement stays in the reduced-angle setting.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result, StageExt};
use crate::fbp::{fbp, FbpConfig};
use crate::geometry::{build_geometry, DetectorSpec, ProjectionGeometry};
use crate::image::Image;
use crate::io;
use crate::levels::LevelScheme;
use crate::metrics::{compute_metrics, emit_comparison_table, MetricsReport};
use crate::phantom::{generate_phantom, PhantomSpec};
use crate::qubo::{build_roi_qubo, decode_solution, residual_sinogram, QuboProblem};
use crate::resample::upsample_and_smooth;
use crate::sart::{sart, SartConfig};
use crate::sinogram::{downsample_sinogram, Sinogram};
use crate::solve::{
    export_qubo_to_path, solve_anneal, solve_exhaustive, solve_greedy, AnnealSchedule, SolverResult,
};
use crate::system_matrix::{build_system_matrix, forward_project};

/// First-stage reconstruction method. `Oracle` substitutes the ground truth
/// for the coarse estimate, isolating refinement behavior from coarse-stage
/// error in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarseMethod {
    Qtr,
    Fbp,
    Sart,
    Oracle,
}

impl CoarseMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoarseMethod::Qtr => "qtr",
            CoarseMethod::Fbp => "fbp",
            CoarseMethod::Sart => "sart",
            CoarseMethod::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "qtr" => Ok(CoarseMethod::Qtr),
            "fbp" => Ok(CoarseMethod::Fbp),
            "sart" => Ok(CoarseMethod::Sart),
            "oracle" => Ok(CoarseMethod::Oracle),
            other => Err(Error::invalid(format!(
                "unknown coarse method '{other}' (expected qtr, fbp, sart or oracle)"
            ))),
        }
    }
}

/// Refinement solver selection; `None` disables refinement so the pipeline
/// degenerates to its coarse stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    None,
    Exhaustive,
    Anneal {
        restarts: usize,
        sweeps: usize,
        seed: u64,
    },
    Greedy {
        seed: u64,
    },
}

#[derive(Debug, Clone)]
pub struct CoarseConfig {
    pub method: CoarseMethod,
    /// Denser angular sampling for the coarse stage only (e.g. 180 views
    /// while the refinement keeps the reduced-angle measurement).
    pub n_angles_override: Option<usize>,
    /// Grid side for the reduced first-stage QUBO reconstruction.
    pub reduced_size: usize,
    /// Detector block-aggregation factor applied before the first-stage QUBO.
    pub detector_factor: usize,
    pub sart: SartConfig,
    pub fbp: FbpConfig,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub phantom: PhantomSpec,
    pub n_angles: usize,
    pub detectors: DetectorSpec,
    pub coarse: CoarseConfig,
    /// Gaussian sigma for upsampled first-stage QUBO estimates.
    pub sigma: f64,
    pub prune_tol: f64,
    pub solver: SolverChoice,
    /// Clip negative coarse values before forming the residual.
    pub clip_negative: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub ground_truth: Image,
    pub measured: Sinogram,
    pub measurement_geometry: ProjectionGeometry,
    pub coarse_geometry: ProjectionGeometry,
    pub coarse: Image,
    pub global_estimate: Image,
    pub masked_background: Image,
    pub residual: Sinogram,
    pub problem: QuboProblem,
    pub solver: Option<SolverResult>,
    pub refined_patch: Option<Image>,
    pub final_image: Image,
    pub metrics_final: MetricsReport,
    pub metrics_global: MetricsReport,
    /// Metrics of the raw coarse image; absent when the coarse grid differs
    /// from the target grid (reduced first-stage QUBO).
    pub metrics_coarse: Option<MetricsReport>,
}

fn run_solver(problem: &QuboProblem, choice: &SolverChoice) -> Result<Option<SolverResult>> {
    match choice {
        SolverChoice::None => Ok(None),
        SolverChoice::Exhaustive => solve_exhaustive(problem).map(Some),
        SolverChoice::Anneal {
            restarts,
            sweeps,
            seed,
        } => {
            let schedule = AnnealSchedule::scaled_to(problem, *restarts, *sweeps, *seed);
            solve_anneal(problem, &schedule).map(Some)
        }
        SolverChoice::Greedy { seed } => solve_greedy(problem, *seed).map(Some),
    }
}

/// First-stage full-image QUBO reconstruction on a reduced grid.
///
/// The sinogram's detector dimension is block-aggregated by
/// `detector_factor`, rescaled into reduced-grid line-integral units
/// (aggregation multiplies values by the factor, and shrinking the grid by
/// `full_size / reduced_size` shortens every chord by the same ratio), and
/// matched against a system matrix built for the reduced grid.
pub fn coarse_qtr(
    sino: &Sinogram,
    geometry: &ProjectionGeometry,
    full_size: usize,
    reduced_size: usize,
    detector_factor: usize,
    levels: &LevelScheme,
    solver: &SolverChoice,
) -> Result<Image> {
    if reduced_size == 0 || reduced_size > full_size {
        return Err(Error::invalid(format!(
            "reduced size {reduced_size} must lie in 1..={full_size}"
        )));
    }
    if matches!(solver, SolverChoice::None) {
        return Err(Error::invalid(
            "first-stage QUBO reconstruction needs a solver",
        ));
    }
    let reduced = downsample_sinogram(sino, detector_factor)?;
    let grid_ratio = full_size as f64 / reduced_size as f64;
    let scale = 1.0 / (detector_factor as f64 * grid_ratio);
    let target = Sinogram::new(
        reduced.n_angles(),
        reduced.n_detectors(),
        reduced.values().iter().map(|v| v * scale).collect(),
    )?;

    let center = reduced_size as f64 / 2.0;
    let reduced_geometry = ProjectionGeometry::new(
        geometry.angles().to_vec(),
        reduced.n_detectors(),
        geometry.detector_spacing() * detector_factor as f64 / grid_ratio,
        (center, center),
    )?;
    let matrix = build_system_matrix(&reduced_geometry, reduced_size, reduced_size)?;
    let full_roi = crate::image::RoiSpec::new(0, 0, reduced_size, reduced_size)?;
    let problem = build_roi_qubo(
        &target,
        &matrix,
        &full_roi,
        levels,
        crate::qubo::DEFAULT_PRUNE_TOL,
    )?;
    let result = run_solver(&problem, solver)?.expect("solver checked above");
    let varmap = problem.varmap().expect("roi qubo always carries a map");
    decode_solution(&result.bits, varmap, levels)
}

/// Second branch of the coarse-estimate definition: reduced first-stage
/// QUBO images are upsampled and smoothed; classical coarse images pass
/// through unchanged.
pub fn make_global_estimate(
    coarse: &Image,
    method: CoarseMethod,
    target_size: usize,
    sigma: f64,
) -> Result<Image> {
    match method {
        CoarseMethod::Qtr => upsample_and_smooth(coarse, target_size, target_size, sigma),
        CoarseMethod::Fbp | CoarseMethod::Sart | CoarseMethod::Oracle => Ok(coarse.clone()),
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineResult> {
    let size = config.phantom.size;
    let levels = &config.phantom.levels;
    let roi = config.phantom.roi;

    let ground_truth = generate_phantom(&config.phantom).stage("phantom")?;

    let measurement_geometry =
        build_geometry(config.n_angles, config.detectors, size).stage("geometry")?;
    let matrix = build_system_matrix(&measurement_geometry, size, size).stage("geometry")?;
    let measured = forward_project(&ground_truth, &matrix).stage("projection")?;

    // Coarse stage, possibly at denser angular sampling.
    let (coarse_geometry, coarse_sino, coarse_matrix) = match config.coarse.n_angles_override {
        Some(n) if n != config.n_angles => {
            let geometry = build_geometry(n, config.detectors, size).stage("geometry")?;
            let m = build_system_matrix(&geometry, size, size).stage("geometry")?;
            let sino = forward_project(&ground_truth, &m).stage("projection")?;
            (geometry, sino, m)
        }
        _ => (
            measurement_geometry.clone(),
            measured.clone(),
            matrix.clone(),
        ),
    };
    let coarse = match config.coarse.method {
        CoarseMethod::Fbp => fbp(
            &coarse_sino,
            &coarse_geometry,
            size,
            size,
            &config.coarse.fbp,
        )
        .stage("coarse")?,
        CoarseMethod::Sart => {
            sart(&coarse_sino, &coarse_matrix, &config.coarse.sart).stage("coarse")?
        }
        CoarseMethod::Qtr => coarse_qtr(
            &coarse_sino,
            &coarse_geometry,
            size,
            config.coarse.reduced_size,
            config.coarse.detector_factor,
            levels,
            &config.solver,
        )
        .stage("coarse")?,
        CoarseMethod::Oracle => ground_truth.clone(),
    };

    let mut global_estimate =
        make_global_estimate(&coarse, config.coarse.method, size, config.sigma)
            .stage("global-estimate")?;
    if config.clip_negative {
        global_estimate = global_estimate.clipped_nonnegative();
    }

    let masked_background = global_estimate.mask_roi(&roi).stage("mask")?;
    let residual = residual_sinogram(&measured, &masked_background, &matrix).stage("residual")?;
    let problem =
        build_roi_qubo(&residual, &matrix, &roi, levels, config.prune_tol).stage("qubo-build")?;

    let solver = run_solver(&problem, &config.solver).stage("solve")?;
    let (refined_patch, final_image) = match &solver {
        Some(result) => {
            let varmap = problem.varmap().expect("roi qubo always carries a map");
            let patch = decode_solution(&result.bits, varmap, levels).stage("decode")?;
            let final_image = masked_background.insert_roi(&patch, &roi).stage("insert")?;
            (Some(patch), final_image)
        }
        None => (None, global_estimate.clone()),
    };

    let metrics_final = compute_metrics(&ground_truth, &final_image, &roi).stage("metrics")?;
    let metrics_global = compute_metrics(&ground_truth, &global_estimate, &roi).stage("metrics")?;
    let metrics_coarse = if coarse.width() == size && coarse.height() == size {
        Some(compute_metrics(&ground_truth, &coarse, &roi).stage("metrics")?)
    } else {
        None
    };

    Ok(PipelineResult {
        ground_truth,
        measured,
        measurement_geometry,
        coarse_geometry,
        coarse,
        global_estimate,
        masked_background,
        residual,
        problem,
        solver,
        refined_patch,
        final_image,
        metrics_final,
        metrics_global,
        metrics_coarse,
    })
}

/// Fixed artifact file names written by [`write_artifacts`].
pub const ARTIFACT_FILES: &[&str] = &[
    "ground_truth.csv",
    "sinogram.csv",
    "coarse.csv",
    "global.csv",
    "residual.csv",
    "roi_problem.qubo.txt",
    "roi_varmap.csv",
    "final.csv",
    "metrics.csv",
    "run_manifest.txt",
];

/// Write the full artifact set into `dir` (created if missing). `manifest`
/// is the flat key=value echo of the resolved configuration.
pub fn write_artifacts(result: &PipelineResult, manifest: &str, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    io::write_image_csv(&result.ground_truth, &dir.join("ground_truth.csv"))?;
    io::write_sinogram_csv(&result.measured, &dir.join("sinogram.csv"))?;
    io::write_image_csv(&result.coarse, &dir.join("coarse.csv"))?;
    io::write_image_csv(&result.global_estimate, &dir.join("global.csv"))?;
    io::write_sinogram_csv(&result.residual, &dir.join("residual.csv"))?;
    export_qubo_to_path(&result.problem, &dir.join("roi_problem.qubo.txt"))?;
    if let Some(varmap) = result.problem.varmap() {
        fs::write(dir.join("roi_varmap.csv"), varmap.to_csv())?;
    }
    io::write_image_csv(&result.final_image, &dir.join("final.csv"))?;

    let mut rows = vec![("final".to_string(), result.metrics_final.clone())];
    if let Some(coarse) = &result.metrics_coarse {
        rows.push(("coarse".to_string(), coarse.clone()));
    }
    rows.push(("global".to_string(), result.metrics_global.clone()));
    fs::write(dir.join("metrics.csv"), emit_comparison_table(&rows)?)?;
    fs::write(dir.join("run_manifest.txt"), manifest)?;
    Ok(())
}

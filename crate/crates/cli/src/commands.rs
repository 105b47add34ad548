//! Subcommand implementations. Config problems map to exit code 2,
//! runtime/capacity failures to exit code 3.

use std::fs;
use std::path::Path;

use roict_core::error::Error as CoreError;
use roict_core::io as core_io;
use roict_core::metrics::emit_comparison_table;
use roict_core::pipeline::{run_pipeline, write_artifacts};
use roict_core::solve::{
    import_qubo_from_path, solve_anneal, solve_exhaustive, solve_greedy, AnnealSchedule,
};
use roict_core::{
    build_geometry, build_system_matrix, coarse_qtr, compute_metrics, fbp, forward_project,
    generate_phantom, make_global_estimate, sart, CoarseMethod, MetricsReport, SolverChoice,
};

use crate::config::{RunConfig, SolverKind};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit code 2).
    Config(String),
    /// Failure while running (exit code 3).
    Runtime(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn ensure_output_dir(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create output dir: {e}")))
}

pub fn phantom(cfg: &RunConfig, pgm: bool) -> Result<(), CliError> {
    let spec = cfg.phantom_spec().map_err(CliError::Config)?;
    ensure_output_dir(cfg)?;
    let image = generate_phantom(&spec)?;
    core_io::write_image_csv(&image, &cfg.output_dir.join("ground_truth.csv"))?;
    if pgm {
        core_io::write_image_pgm(&image, &cfg.output_dir.join("ground_truth.pgm"))?;
    }
    Ok(())
}

pub fn project(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.phantom_spec().map_err(CliError::Config)?;
    ensure_output_dir(cfg)?;
    let image = generate_phantom(&spec)?;
    let geometry = build_geometry(cfg.n_angles, cfg.detector_spec(), cfg.image_size)?;
    let matrix = build_system_matrix(&geometry, cfg.image_size, cfg.image_size)?;
    let sino = forward_project(&image, &matrix)?;
    core_io::write_image_csv(&image, &cfg.output_dir.join("ground_truth.csv"))?;
    core_io::write_sinogram_csv(&sino, &cfg.output_dir.join("sinogram.csv"))?;
    Ok(())
}

/// Coarse reconstruction only: phantom, measurement, the configured coarse
/// method, and its global estimate, with coarse/global metrics.
pub fn recon(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.phantom_spec().map_err(CliError::Config)?;
    let pipeline_cfg = cfg.to_pipeline_config().map_err(CliError::Config)?;
    ensure_output_dir(cfg)?;
    let truth = generate_phantom(&spec)?;
    let size = cfg.image_size;

    let meas_geometry = build_geometry(cfg.n_angles, cfg.detector_spec(), size)?;
    let meas_matrix = build_system_matrix(&meas_geometry, size, size)?;
    let measured = forward_project(&truth, &meas_matrix)?;

    let coarse_angles = match pipeline_cfg.coarse.n_angles_override {
        Some(n) => n,
        None => cfg.n_angles,
    };
    let (geometry, matrix, sino);
    if coarse_angles != cfg.n_angles {
        geometry = build_geometry(coarse_angles, cfg.detector_spec(), size)?;
        matrix = build_system_matrix(&geometry, size, size)?;
        sino = forward_project(&truth, &matrix)?;
    } else {
        geometry = meas_geometry.clone();
        matrix = meas_matrix.clone();
        sino = measured.clone();
    }

    let coarse = match cfg.coarse_method {
        CoarseMethod::Fbp => fbp(&sino, &geometry, size, size, &pipeline_cfg.coarse.fbp)?,
        CoarseMethod::Sart => sart(&sino, &matrix, &pipeline_cfg.coarse.sart)?,
        CoarseMethod::Qtr => coarse_qtr(
            &sino,
            &geometry,
            size,
            cfg.coarse_reduced_size,
            cfg.coarse_detector_factor,
            &spec.levels,
            &cfg.solver_choice(),
        )?,
        CoarseMethod::Oracle => truth.clone(),
    };
    let global = make_global_estimate(&coarse, cfg.coarse_method, size, cfg.sigma)?;

    core_io::write_image_csv(&truth, &cfg.output_dir.join("ground_truth.csv"))?;
    core_io::write_sinogram_csv(&measured, &cfg.output_dir.join("sinogram.csv"))?;
    core_io::write_image_csv(&coarse, &cfg.output_dir.join("coarse.csv"))?;
    core_io::write_image_csv(&global, &cfg.output_dir.join("global.csv"))?;

    let mut rows: Vec<(String, MetricsReport)> = Vec::new();
    if coarse.width() == size && coarse.height() == size {
        rows.push((
            "coarse".to_string(),
            compute_metrics(&truth, &coarse, &spec.roi)?,
        ));
    }
    rows.push((
        "global".to_string(),
        compute_metrics(&truth, &global, &spec.roi)?,
    ));
    fs::write(
        cfg.output_dir.join("metrics.csv"),
        emit_comparison_table(&rows)?,
    )?;
    Ok(())
}

/// Solve a `.qubo.txt` problem file with the configured solver.
pub fn refine(cfg: &RunConfig, problem_path: &Path) -> Result<(), CliError> {
    if cfg.solver_kind == SolverKind::None {
        return Err(CliError::Config("refine needs solver.kind != none".into()));
    }
    ensure_output_dir(cfg)?;
    let problem = import_qubo_from_path(problem_path)?;
    let result = match cfg.solver_choice() {
        SolverChoice::Exhaustive => solve_exhaustive(&problem)?,
        SolverChoice::Anneal {
            restarts,
            sweeps,
            seed,
        } => {
            let schedule = AnnealSchedule::scaled_to(&problem, restarts, sweeps, seed);
            solve_anneal(&problem, &schedule)?
        }
        SolverChoice::Greedy { seed } => solve_greedy(&problem, seed)?,
        SolverChoice::None => unreachable!("checked above"),
    };
    let bits: String = result
        .bits
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    let text = format!(
        "bits = {bits}\nenergy = {}\nsolver = {}\nevaluations = {}\nseed = {}\n",
        result.energy, result.solver_id, result.evaluations, result.seed
    );
    fs::write(cfg.output_dir.join("solution.txt"), text)?;
    println!("energy = {}", result.energy);
    Ok(())
}

pub fn pipeline(cfg: &RunConfig) -> Result<(), CliError> {
    let pipeline_cfg = cfg.to_pipeline_config().map_err(CliError::Config)?;
    ensure_output_dir(cfg)?;
    let result = run_pipeline(&pipeline_cfg)?;
    write_artifacts(&result, &cfg.manifest(), &cfg.output_dir)?;
    println!(
        "rmse_roi = {}, mae_roi = {}",
        result.metrics_final.rmse_roi, result.metrics_final.mae_roi
    );
    Ok(())
}

/// The five comparison pipelines, in table order.
pub const COMPARE_VARIANTS: &[&str] = &[
    "direct_fbp",
    "direct_sart",
    "qtr_qtr",
    "fbp_qtr",
    "sart_qtr",
];

/// Derive one variant's configuration from the shared base. The coarse
/// angle override applies only to the hybrid FBP/SART variants; direct
/// baselines and the two-stage QUBO pipeline stay in the measurement
/// geometry.
fn variant_config(base: &RunConfig, label: &str) -> Result<RunConfig, CliError> {
    let mut cfg = base.clone();
    cfg.output_dir = base.output_dir.join(label);
    match label {
        "direct_fbp" => {
            cfg.coarse_method = CoarseMethod::Fbp;
            cfg.solver_kind = SolverKind::None;
            cfg.coarse_n_angles = 0;
        }
        "direct_sart" => {
            cfg.coarse_method = CoarseMethod::Sart;
            cfg.solver_kind = SolverKind::None;
            cfg.coarse_n_angles = 0;
        }
        "qtr_qtr" => {
            cfg.coarse_method = CoarseMethod::Qtr;
            cfg.coarse_n_angles = 0;
        }
        "fbp_qtr" => cfg.coarse_method = CoarseMethod::Fbp,
        "sart_qtr" => cfg.coarse_method = CoarseMethod::Sart,
        other => {
            return Err(CliError::Config(format!(
                "unknown variant '{other}' (expected one of {})",
                COMPARE_VARIANTS.join(", ")
            )))
        }
    }
    let needs_solver = matches!(label, "qtr_qtr" | "fbp_qtr" | "sart_qtr");
    if needs_solver && base.solver_kind == SolverKind::None {
        return Err(CliError::Config(format!(
            "variant '{label}' needs solver.kind != none"
        )));
    }
    Ok(cfg)
}

/// Run the selected variants on a shared phantom and emit the comparison
/// table.
pub fn compare(cfg: &RunConfig, variants: &[String]) -> Result<(), CliError> {
    if variants.is_empty() {
        return Err(CliError::Config("no variants selected".into()));
    }
    ensure_output_dir(cfg)?;
    let mut rows = Vec::new();
    for label in variants {
        let vcfg = variant_config(cfg, label)?;
        let pipeline_cfg = vcfg.to_pipeline_config().map_err(CliError::Config)?;
        let result = run_pipeline(&pipeline_cfg)
            .map_err(|e| CliError::Runtime(format!("variant '{label}': {e}")))?;
        write_artifacts(&result, &vcfg.manifest(), &vcfg.output_dir)
            .map_err(|e| CliError::Runtime(format!("variant '{label}': {e}")))?;
        rows.push((label.clone(), result.metrics_final.clone()));
    }
    let table = emit_comparison_table(&rows)?;
    fs::write(cfg.output_dir.join("comparison.csv"), &table)?;
    print!("{table}");
    Ok(())
}

/// Metrics between two image CSV files, ROI taken from the config.
pub fn metrics(cfg: &RunConfig, truth_path: &Path, recon_path: &Path) -> Result<(), CliError> {
    let roi = cfg.roi().map_err(CliError::Config)?;
    ensure_output_dir(cfg)?;
    let truth = core_io::read_image_csv(truth_path)?;
    let recon = core_io::read_image_csv(recon_path)?;
    let report = compute_metrics(&truth, &recon, &roi)?;
    let label = recon_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "recon".to_string());
    let table = emit_comparison_table(&[(label, report)])?;
    fs::write(cfg.output_dir.join("metrics.csv"), &table)?;
    print!("{table}");
    Ok(())
}

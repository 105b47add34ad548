//! Hybrid ROI CT reconstruction at desk scale.
//!
//! A reduced-angle parallel-beam forward model (exact ray/pixel
//! intersection lengths) feeds three kinds of coarse global reconstruction
//! (filtered backprojection, SART, or a full-image QUBO on a reduced grid),
//! after which a selected region of interest is refined by a second QUBO
//! built from the signed residual between the measured sinogram and the
//! ROI-masked background's projection. Classical solvers (exhaustive
//! enumeration, simulated annealing, steepest descent) stand in for
//! annealing hardware; problems can also be exported to a text format for
//! external solvers.
//!
//! Modules follow the pipeline stages:
//!
//! - [`geometry`], [`system_matrix`], [`sinogram`]: acquisition model
//! - [`phantom`]: seeded discrete-level test objects
//! - [`fbp`], [`sart`], [`resample`]: classical coarse stage
//! - [`levels`], [`qubo`]: residual formation and QUBO assembly
//! - [`solve`]: solvers and the `.qubo.txt` interchange format
//! - [`pipeline`]: end-to-end orchestration and artifact output
//! - [`metrics`]: ROI / non-ROI error reports and comparison tables

pub mod error;
pub mod fbp;
pub mod geometry;
pub mod image;
pub mod io;
pub mod levels;
pub mod metrics;
pub mod phantom;
pub mod pipeline;
pub mod qubo;
pub mod resample;
pub mod sart;
pub mod sinogram;
pub mod solve;
pub mod system_matrix;

pub use error::{Error, Result};
pub use fbp::{fbp, FbpConfig};
pub use geometry::{build_geometry, DetectorSpec, ProjectionGeometry};
pub use image::{Image, RoiSpec};
pub use levels::LevelScheme;
pub use metrics::{compute_metrics, emit_comparison_table, MetricsReport};
pub use phantom::{generate_phantom, PhantomSpec};
pub use pipeline::{
    coarse_qtr, make_global_estimate, run_pipeline, write_artifacts, CoarseConfig, CoarseMethod,
    PipelineConfig, PipelineResult, SolverChoice,
};
pub use qubo::{
    build_roi_qubo, decode_solution, encode_ground_truth, qubo_energy, residual_sinogram,
    QuboProblem, VariableMap,
};
pub use resample::upsample_and_smooth;
pub use sart::{sart, SartConfig};
pub use sinogram::{downsample_sinogram, Sinogram};
pub use solve::{
    export_qubo, import_qubo, solve_anneal, solve_exhaustive, solve_greedy, AnnealSchedule,
    SolverResult,
};
pub use system_matrix::{backproject, build_system_matrix, forward_project, SystemMatrix};

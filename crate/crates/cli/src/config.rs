//! Flat key=value run configuration.
//!
//! Every key has a default, so an empty (or absent) file is a valid
//! configuration; unknown keys are rejected by name. `run_manifest.txt`
//! echoes the resolved values in this same format, so a manifest can be fed
//! back in as a config file to reproduce a run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use roict_core::geometry::auto_detector_count;
use roict_core::sart::SartConfig;
use roict_core::{
    CoarseConfig, CoarseMethod, DetectorSpec, FbpConfig, LevelScheme, PhantomSpec, PipelineConfig,
    RoiSpec, SolverChoice,
};

/// Phantom shape counts used by the CLI (the library accepts arbitrary
/// counts; the config format keeps the key set small).
pub const BACKGROUND_SHAPES: usize = 6;
pub const ROI_SHAPES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverKind {
    None,
    Exhaustive,
    Anneal,
    Greedy,
}

impl SolverKind {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(SolverKind::None),
            "exhaustive" => Ok(SolverKind::Exhaustive),
            "anneal" => Ok(SolverKind::Anneal),
            "greedy" => Ok(SolverKind::Greedy),
            other => Err(format!(
                "unknown solver kind '{other}' (expected none, exhaustive, anneal or greedy)"
            )),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            SolverKind::None => "none",
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::Anneal => "anneal",
            SolverKind::Greedy => "greedy",
        }
    }
}

/// Parsed configuration with all defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub image_size: usize,
    pub roi_x0: usize,
    pub roi_y0: usize,
    pub roi_w: usize,
    pub roi_h: usize,
    pub levels: Vec<f64>,
    pub n_angles: usize,
    /// `None` selects the automatic detector count.
    pub n_detectors: Option<usize>,
    pub coarse_method: CoarseMethod,
    /// 0 means: coarse stage uses the measurement angles.
    pub coarse_n_angles: usize,
    pub coarse_reduced_size: usize,
    pub coarse_detector_factor: usize,
    pub sigma: f64,
    pub sart_iterations: usize,
    pub sart_relaxation: f64,
    pub solver_kind: SolverKind,
    pub solver_restarts: usize,
    pub solver_sweeps: usize,
    pub solver_seed: u64,
    pub clip_negative: bool,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            image_size: 48,
            roi_x0: 18,
            roi_y0: 18,
            roi_w: 12,
            roi_h: 12,
            levels: vec![0.4, 0.8],
            n_angles: 30,
            n_detectors: None,
            coarse_method: CoarseMethod::Sart,
            coarse_n_angles: 0,
            coarse_reduced_size: 12,
            coarse_detector_factor: 1,
            sigma: 1.0,
            sart_iterations: 20,
            sart_relaxation: 1.0,
            solver_kind: SolverKind::Anneal,
            solver_restarts: 10,
            solver_sweeps: 2000,
            solver_seed: 7,
            clip_negative: false,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config '{}': {e}", p.display()))?;
                Self::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value, got '{raw}'", idx + 1))?;
            cfg.apply(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", idx + 1))?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| format!("bad value '{value}' for {key}: {e}"))
        }
        match key {
            "seed" => self.seed = num(key, value)?,
            "image_size" => self.image_size = num(key, value)?,
            "roi.x0" => self.roi_x0 = num(key, value)?,
            "roi.y0" => self.roi_y0 = num(key, value)?,
            "roi.w" => self.roi_w = num(key, value)?,
            "roi.h" => self.roi_h = num(key, value)?,
            "levels" => {
                let mut levels = Vec::new();
                for part in value.split(',') {
                    levels.push(num::<f64>(key, part.trim())?);
                }
                self.levels = levels;
            }
            "n_angles" => self.n_angles = num(key, value)?,
            "n_detectors" => {
                self.n_detectors = if value == "auto" {
                    None
                } else {
                    Some(num(key, value)?)
                }
            }
            "coarse.method" => {
                self.coarse_method = CoarseMethod::parse(value).map_err(|e| e.to_string())?
            }
            "coarse.n_angles" => self.coarse_n_angles = num(key, value)?,
            "coarse.reduced_size" => self.coarse_reduced_size = num(key, value)?,
            "coarse.detector_factor" => self.coarse_detector_factor = num(key, value)?,
            "sigma" => self.sigma = num(key, value)?,
            "sart.iterations" => self.sart_iterations = num(key, value)?,
            "sart.relaxation" => self.sart_relaxation = num(key, value)?,
            "solver.kind" => self.solver_kind = SolverKind::parse(value)?,
            "solver.restarts" => self.solver_restarts = num(key, value)?,
            "solver.sweeps" => self.solver_sweeps = num(key, value)?,
            "solver.seed" => self.solver_seed = num(key, value)?,
            "clip_negative" => {
                self.clip_negative = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(format!("bad value '{other}' for clip_negative")),
                }
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn solver_choice(&self) -> SolverChoice {
        match self.solver_kind {
            SolverKind::None => SolverChoice::None,
            SolverKind::Exhaustive => SolverChoice::Exhaustive,
            SolverKind::Anneal => SolverChoice::Anneal {
                restarts: self.solver_restarts,
                sweeps: self.solver_sweeps,
                seed: self.solver_seed,
            },
            SolverKind::Greedy => SolverChoice::Greedy {
                seed: self.solver_seed,
            },
        }
    }

    pub fn roi(&self) -> Result<RoiSpec, String> {
        RoiSpec::new(self.roi_x0, self.roi_y0, self.roi_w, self.roi_h).map_err(|e| e.to_string())
    }

    pub fn level_scheme(&self) -> Result<LevelScheme, String> {
        LevelScheme::new(self.levels.clone()).map_err(|e| e.to_string())
    }

    pub fn phantom_spec(&self) -> Result<PhantomSpec, String> {
        let roi = self.roi()?;
        roi.check_within(self.image_size, self.image_size)
            .map_err(|e| e.to_string())?;
        Ok(PhantomSpec {
            seed: self.seed,
            size: self.image_size,
            roi,
            levels: self.level_scheme()?,
            n_background_shapes: BACKGROUND_SHAPES,
            n_roi_shapes: ROI_SHAPES,
        })
    }

    pub fn detector_spec(&self) -> DetectorSpec {
        match self.n_detectors {
            None => DetectorSpec::Auto,
            Some(n) => DetectorSpec::Fixed(n),
        }
    }

    pub fn resolved_n_detectors(&self) -> usize {
        self.n_detectors
            .unwrap_or_else(|| auto_detector_count(self.image_size))
    }

    pub fn to_pipeline_config(&self) -> Result<PipelineConfig, String> {
        if self.n_angles == 0 {
            return Err("n_angles must be at least 1".into());
        }
        Ok(PipelineConfig {
            phantom: self.phantom_spec()?,
            n_angles: self.n_angles,
            detectors: self.detector_spec(),
            coarse: CoarseConfig {
                method: self.coarse_method,
                n_angles_override: match self.coarse_n_angles {
                    0 => None,
                    n => Some(n),
                },
                reduced_size: self.coarse_reduced_size,
                detector_factor: self.coarse_detector_factor,
                sart: SartConfig {
                    n_iterations: self.sart_iterations,
                    relaxation: self.sart_relaxation,
                },
                fbp: FbpConfig::default(),
            },
            sigma: self.sigma,
            prune_tol: roict_core::qubo::DEFAULT_PRUNE_TOL,
            solver: self.solver_choice(),
            clip_negative: self.clip_negative,
        })
    }

    /// Resolved key=value echo, valid as a config file.
    pub fn manifest(&self) -> String {
        let levels = self
            .levels
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("seed", self.seed.to_string());
        kv("image_size", self.image_size.to_string());
        kv("roi.x0", self.roi_x0.to_string());
        kv("roi.y0", self.roi_y0.to_string());
        kv("roi.w", self.roi_w.to_string());
        kv("roi.h", self.roi_h.to_string());
        kv("levels", levels);
        kv("n_angles", self.n_angles.to_string());
        kv("n_detectors", self.resolved_n_detectors().to_string());
        kv("coarse.method", self.coarse_method.as_str().to_string());
        kv(
            "coarse.n_angles",
            if self.coarse_n_angles == 0 {
                self.n_angles.to_string()
            } else {
                self.coarse_n_angles.to_string()
            },
        );
        kv("coarse.reduced_size", self.coarse_reduced_size.to_string());
        kv(
            "coarse.detector_factor",
            self.coarse_detector_factor.to_string(),
        );
        kv("sigma", self.sigma.to_string());
        kv("sart.iterations", self.sart_iterations.to_string());
        kv("sart.relaxation", self.sart_relaxation.to_string());
        kv("solver.kind", self.solver_kind.as_str().to_string());
        kv("solver.restarts", self.solver_restarts.to_string());
        kv("solver.sweeps", self.solver_sweeps.to_string());
        kv("solver.seed", self.solver_seed.to_string());
        kv("clip_negative", self.clip_negative.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        out
    }
}

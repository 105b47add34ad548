//! Shared fixtures for the stage benchmarks.

use roict_core::sart::SartConfig;
use roict_core::*;

pub const SIZE: usize = 48;
pub const N_ANGLES: usize = 30;

pub fn levels() -> LevelScheme {
    LevelScheme::new(vec![0.4, 0.8]).unwrap()
}

pub fn roi() -> RoiSpec {
    RoiSpec::new(18, 18, 12, 12).unwrap()
}

pub fn phantom() -> Image {
    generate_phantom(&PhantomSpec {
        seed: 7,
        size: SIZE,
        roi: roi(),
        levels: levels(),
        n_background_shapes: 6,
        n_roi_shapes: 3,
    })
    .unwrap()
}

pub fn geometry() -> ProjectionGeometry {
    build_geometry(N_ANGLES, DetectorSpec::Auto, SIZE).unwrap()
}

pub fn matrix() -> SystemMatrix {
    build_system_matrix(&geometry(), SIZE, SIZE).unwrap()
}

pub fn sart_config() -> SartConfig {
    SartConfig::default()
}

/// Refinement problem for the benchmark phantom with a SART background.
pub fn refinement_problem() -> QuboProblem {
    let truth = phantom();
    let m = matrix();
    let measured = forward_project(&truth, &m).unwrap();
    let coarse = sart(&measured, &m, &sart_config()).unwrap();
    let background = coarse.mask_roi(&roi()).unwrap();
    let residual = residual_sinogram(&measured, &background, &m).unwrap();
    build_roi_qubo(&residual, &m, &roi(), &levels(), qubo::DEFAULT_PRUNE_TOL).unwrap()
}

//! Seeded procedural phantoms with discrete attenuation levels and a
//! structured ROI.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::image::{Image, RoiSpec};
use crate::levels::LevelScheme;

/// Recipe for one phantom. Equal specs generate bit-identical images.
#[derive(Debug, Clone)]
pub struct PhantomSpec {
    pub seed: u64,
    pub size: usize,
    pub roi: RoiSpec,
    pub levels: LevelScheme,
    pub n_background_shapes: usize,
    pub n_roi_shapes: usize,
}

enum Shape {
    Rect {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
    },
    Ellipse {
        cx: f64,
        cy: f64,
        a: f64,
        b: f64,
    },
}

impl Shape {
    fn draw(&self, values: &mut [f64], size: usize, level: f64) {
        match *self {
            Shape::Rect { x0, y0, w, h } => {
                for j in y0..(y0 + h).min(size) {
                    for i in x0..(x0 + w).min(size) {
                        values[j * size + i] = level;
                    }
                }
            }
            Shape::Ellipse { cx, cy, a, b } => {
                for j in 0..size {
                    for i in 0..size {
                        let dx = (i as f64 + 0.5 - cx) / a;
                        let dy = (j as f64 + 0.5 - cy) / b;
                        if dx * dx + dy * dy <= 1.0 {
                            values[j * size + i] = level;
                        }
                    }
                }
            }
        }
    }
}

/// Draw `n_background_shapes` rectangles/ellipses anywhere on the grid, then
/// `n_roi_shapes` inside the ROI; overlaps resolve last-drawn-wins. Every
/// pixel ends up exactly 0 or one of the scheme's levels.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<Image> {
    spec.roi.check_within(spec.size, spec.size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = vec![0.0; spec.size * spec.size];

    for _ in 0..spec.n_background_shapes {
        let shape = sample_shape(&mut rng, 0, 0, spec.size, spec.size);
        let level = sample_level(&mut rng, &spec.levels);
        shape.draw(&mut values, spec.size, level);
    }
    for _ in 0..spec.n_roi_shapes {
        let shape = sample_shape(&mut rng, spec.roi.x0, spec.roi.y0, spec.roi.w, spec.roi.h);
        let level = sample_level(&mut rng, &spec.levels);
        shape.draw(&mut values, spec.size, level);
    }

    Image::new(spec.size, spec.size, values)
}

fn sample_level(rng: &mut ChaCha8Rng, levels: &LevelScheme) -> f64 {
    levels.alphas()[rng.random_range(0..levels.count())]
}

/// Shape with its bounding box inside the given region (region has w,h >= 1).
fn sample_shape(rng: &mut ChaCha8Rng, rx: usize, ry: usize, rw: usize, rh: usize) -> Shape {
    let w = rng.random_range(1..=(rw / 2).max(1));
    let h = rng.random_range(1..=(rh / 2).max(1));
    let x0 = rx + rng.random_range(0..=rw - w);
    let y0 = ry + rng.random_range(0..=rh - h);
    if rng.random_bool(0.5) {
        Shape::Rect { x0, y0, w, h }
    } else {
        // Ellipse inscribed in the sampled box; semi-axes >= 0.5 keeps at
        // least the center pixel inside.
        Shape::Ellipse {
            cx: x0 as f64 + w as f64 / 2.0,
            cy: y0 as f64 + h as f64 / 2.0,
            a: (w as f64 / 2.0).max(0.5),
            b: (h as f64 / 2.0).max(0.5),
        }
    }
}

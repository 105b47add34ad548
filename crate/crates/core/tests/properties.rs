//! Property tests for the forward model, the binary encoding, and the
//! serialization formats.

use proptest::prelude::*;

use roict_core::io::{image_from_csv, image_to_csv, sinogram_from_csv, sinogram_to_csv};
use roict_core::qubo::DEFAULT_PRUNE_TOL;
use roict_core::solve::{export_qubo, import_qubo};
use roict_core::*;

fn finite_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-100.0..100.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_projection_is_linear(
        seed in 0u64..1_000,
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        size in 3usize..9,
        n_angles in 1usize..8,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let geometry = build_geometry(n_angles, DetectorSpec::Auto, size).unwrap();
        let matrix = build_system_matrix(&geometry, size, size).unwrap();
        let n = size * size;
        let i1 = Image::new(size, size, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let i2 = Image::new(size, size, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let combo = Image::new(
            size,
            size,
            i1.values().iter().zip(i2.values()).map(|(x, y)| a * x + b * y).collect(),
        ).unwrap();
        let s1 = forward_project(&i1, &matrix).unwrap();
        let s2 = forward_project(&i2, &matrix).unwrap();
        let sc = forward_project(&combo, &matrix).unwrap();
        for i in 0..sc.n_rays() {
            let expect = a * s1.values()[i] + b * s2.values()[i];
            prop_assert!((sc.values()[i] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn downsampling_preserves_totals(
        n_angles in 1usize..5,
        blocks in 1usize..6,
        factor in 1usize..5,
        seed in 0u64..1_000,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let nd = blocks * factor;
        let sino = Sinogram::new(
            n_angles,
            nd,
            (0..n_angles * nd).map(|_| rng.random_range(-2.0..2.0)).collect(),
        ).unwrap();
        let down = downsample_sinogram(&sino, factor).unwrap();
        prop_assert_eq!(down.n_detectors(), blocks);
        let before: f64 = sino.values().iter().sum();
        let after: f64 = down.values().iter().sum();
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before.abs()));
    }

    #[test]
    fn decode_is_monotone_and_round_trips(
        alphas_raw in proptest::collection::vec(0.05..0.6f64, 1..4),
        mask in 0u32..4096,
        extra in 0usize..12,
    ) {
        // cumulative sums give a strictly increasing scheme
        let alphas: Vec<f64> = alphas_raw.iter().scan(0.0, |acc, d| { *acc += d; Some(*acc) }).collect();
        let levels = LevelScheme::new(alphas).unwrap();
        let k = levels.count();
        let varmap = VariableMap::new(2, 2, k).unwrap();
        let n = varmap.len();
        let bits: Vec<bool> = (0..n).map(|i| mask >> (i % 12) & 1 == 1).collect();
        let patch = decode_solution(&bits, &varmap, &levels).unwrap();
        // setting one more bit never decreases any pixel
        let extra = extra % n;
        if !bits[extra] {
            let mut more = bits.clone();
            more[extra] = true;
            let patch2 = decode_solution(&more, &varmap, &levels).unwrap();
            for (a, b) in patch.values().iter().zip(patch2.values()) {
                prop_assert!(b >= a);
            }
        }
        // prefix encodings of discrete patches round-trip exactly
        let discrete = Image::new(
            2,
            2,
            (0..4).map(|i| {
                let m = (mask as usize >> (2 * i)) % (k + 1);
                if m == 0 { 0.0 } else { levels.alphas()[m - 1] }
            }).collect(),
        ).unwrap();
        let encoded = encode_ground_truth(&discrete, &levels).unwrap();
        prop_assert_eq!(decode_solution(&encoded, &varmap, &levels).unwrap(), discrete);
    }

    #[test]
    fn image_and_sinogram_csv_round_trip(
        w in 1usize..7,
        h in 1usize..7,
        values in finite_values(36),
    ) {
        let img = Image::new(w, h, values[..w * h].to_vec()).unwrap();
        prop_assert_eq!(image_from_csv(&image_to_csv(&img)).unwrap(), img);
        let sino = Sinogram::new(h, w, values[..w * h].to_vec()).unwrap();
        prop_assert_eq!(sinogram_from_csv(&sinogram_to_csv(&sino)).unwrap(), sino);
    }

    #[test]
    fn qubo_file_round_trip(
        n in 0usize..12,
        seed in 0u64..1_000,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = Vec::new();
        for u in 0..n as u32 {
            for v in u..n as u32 {
                if rng.random_bool(0.4) {
                    coeffs.push((u, v, rng.random_range(-3.0..3.0)));
                }
            }
        }
        let p = QuboProblem::new(n, coeffs, rng.random_range(-3.0..3.0), None).unwrap();
        let text = export_qubo(&p);
        let back = import_qubo(&text).unwrap();
        prop_assert_eq!(back.coefficients(), p.coefficients());
        prop_assert_eq!(back.constant(), p.constant());
        prop_assert_eq!(back.n(), p.n());
        prop_assert_eq!(export_qubo(&back), text);
    }

    #[test]
    fn metrics_regions_partition_and_mae_below_rmse(
        size in 2usize..8,
        seed in 0u64..1_000,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = size * size;
        let truth = Image::new(size, size, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let recon = Image::new(size, size, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let w = rng.random_range(1..=size);
        let h = rng.random_range(1..=size);
        let roi = RoiSpec::new(
            rng.random_range(0..=size - w),
            rng.random_range(0..=size - h),
            w,
            h,
        ).unwrap();
        let m = compute_metrics(&truth, &recon, &roi).unwrap();
        prop_assert_eq!(m.roi_pixels + m.nonroi_pixels, n);
        prop_assert_eq!(m.roi_pixels, roi.pixel_count());
        prop_assert!(m.mae_roi <= m.rmse_roi + 1e-12);
        prop_assert!(m.mae_nonroi <= m.rmse_nonroi + 1e-12);
        prop_assert!(m.rmse_roi >= 0.0 && m.rmse_nonroi >= 0.0);
    }
}

proptest! {
    // heavier: QUBO assembly against the direct objective
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn qubo_energy_matches_direct_objective(
        seed in 0u64..500,
        size in 5usize..9,
        n_angles in 3usize..8,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let levels = LevelScheme::new(vec![0.3, 0.7]).unwrap();
        let roi = RoiSpec::new(1, 1, 2, 2).unwrap();
        let geometry = build_geometry(n_angles, DetectorSpec::Auto, size).unwrap();
        let matrix = build_system_matrix(&geometry, size, size).unwrap();
        let residual = Sinogram::new(
            geometry.n_angles(),
            geometry.n_detectors(),
            (0..geometry.n_rays()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        ).unwrap();
        let problem = build_roi_qubo(&residual, &matrix, &roi, &levels, DEFAULT_PRUNE_TOL).unwrap();
        let k = levels.count();
        let width = matrix.width();
        for _ in 0..20 {
            let bits: Vec<bool> = (0..problem.n()).map(|_| rng.random_bool(0.5)).collect();
            // direct objective, evaluated ray by ray
            let mut direct = 0.0;
            for r in 0..matrix.n_rays() {
                let (cols, ws) = matrix.row(r);
                let mut model = 0.0;
                for (&c, &w) in cols.iter().zip(ws) {
                    let (row, col) = (c as usize / width, c as usize % width);
                    if roi.contains(row, col) {
                        let p = (row - roi.y0) * roi.w + (col - roi.x0);
                        for (lvl, &wk) in levels.weights().iter().enumerate() {
                            if bits[p * k + lvl] {
                                model += wk * w;
                            }
                        }
                    }
                }
                let d = residual.values()[r] - model;
                direct += d * d;
            }
            let via_q = qubo_energy(&problem, &bits).unwrap();
            prop_assert!((via_q - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
    }
}

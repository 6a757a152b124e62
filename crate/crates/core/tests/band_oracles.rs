use num_complex::Complex64;
use polariton_core::bands::{compute_bands, dispersion_function, KronigPenneySpec};
use polariton_core::continuum::grid_band_edges;
use polariton_core::eit::rb87_preset;
use polariton_core::units::FrequencyConvention;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// Half the trace of the (ψ, ψ') transfer matrix across one barrier and one well.
fn transfer_matrix_half_trace(spec: &KronigPenneySpec, energy: f64) -> f64 {
    let segment = |potential: f64, length: f64| {
        let k = Complex64::new(2.0 * spec.m_eff * (energy - potential), 0.0).sqrt();
        let (c, s) = ((k * length).cos(), (k * length).sin());
        // sin(kL)/k → L as k → 0
        let s_over_k = if k.norm() * length < 1e-8 { Complex64::new(length, 0.0) } else { s / k };
        [[c, s_over_k], [-k * s, c]]
    };
    let barrier = segment(spec.v0, spec.a);
    let well = segment(0.0, spec.b);
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = well[i][0] * barrier[0][j] + well[i][1] * barrier[1][j];
        }
    }
    0.5 * (m[0][0] + m[1][1]).re
}

#[test]
fn dispersion_matches_transfer_matrix_on_random_energies() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7A11);
    for convention in FrequencyConvention::ALL {
        let base = rb87_preset().lattice.with_v0(convention.khz_to_internal(79.15)).unwrap();
        for _ in 0..500 {
            let spec = base.with_barrier_fraction(rng.gen_range(0.1..0.9)).unwrap();
            let energy = rng.gen_range(0.0..8.0) * spec.v0;
            let g = dispersion_function(&spec, energy).unwrap();
            let oracle = transfer_matrix_half_trace(&spec, energy);
            assert!(
                (g - oracle).abs() <= 1e-10 * oracle.abs().max(1.0),
                "E/V0 = {}: {g} vs {oracle}",
                energy / spec.v0
            );
        }
    }
}

#[test]
fn band_edges_agree_with_plane_wave_diagonalisation() {
    for convention in FrequencyConvention::ALL {
        for fraction in [0.2, 0.5, 0.8] {
            let spec = rb87_preset()
                .lattice
                .with_v0(convention.khz_to_internal(79.15))
                .unwrap()
                .with_barrier_fraction(fraction)
                .unwrap();
            let solver = compute_bands(&spec, 3).unwrap();
            let grid = grid_band_edges(&spec, 2, 3).unwrap();
            for (s, g) in solver.bands.iter().zip(&grid.bands) {
                assert!(((s.bottom - g.bottom) / s.bottom.abs().max(spec.v0)).abs() < 1e-3);
                assert!(((s.top - g.top) / s.top.abs().max(spec.v0)).abs() < 1e-3);
            }
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            assert!(rel(grid.ground_width, solver.ground_width) < 1e-3, "{convention} a/d={fraction}");
            assert!(rel(grid.first_gap.unwrap(), solver.first_gap.unwrap()) < 1e-3);
        }
    }
}

#[test]
fn band_edges_are_roots_of_unit_modulus() {
    let spec = rb87_preset().lattice;
    let bs = compute_bands(&spec, 4).unwrap();
    for band in &bs.bands {
        for e in [band.bottom, band.top] {
            assert!((transfer_matrix_half_trace(&spec, e).abs() - 1.0).abs() < 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bands_are_ordered_and_inside_allowed_region(fraction in 0.15f64..0.85, v0_scale in 0.2f64..5.0) {
        let base = rb87_preset().lattice;
        let spec = base.with_v0(base.v0 * v0_scale).unwrap().with_barrier_fraction(fraction).unwrap();
        let bs = compute_bands(&spec, 3).unwrap();
        for w in bs.bands.windows(2) {
            prop_assert!(w[0].bottom < w[0].top);
            prop_assert!(w[0].top <= w[1].bottom);
        }
        for band in &bs.bands {
            let mid = 0.5 * (band.bottom + band.top);
            prop_assert!(dispersion_function(&spec, mid).unwrap().abs() <= 1.0 + 1e-9);
        }
        prop_assert!(bs.ground_width > 0.0);
    }

    #[test]
    fn deeper_barriers_narrow_the_ground_band(v0_scale in 0.5f64..4.0) {
        let base = rb87_preset().lattice;
        let shallow = compute_bands(&base.with_v0(base.v0 * v0_scale).unwrap(), 1).unwrap();
        let deep = compute_bands(&base.with_v0(base.v0 * v0_scale * 1.5).unwrap(), 1).unwrap();
        prop_assert!(deep.ground_width < shallow.ground_width);
    }
}

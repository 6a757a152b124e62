use num_complex::Complex64;
use polariton_core::eit::rb87_preset;
use polariton_core::lattice::{
    apply_hamiltonian, evolve_exact, evolve_numeric, gaussian_packet, max_stable_dt, wannier_stark_state,
    TightBindingModel, WavePacket,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn random_state(model: TightBindingModel, support: i64, seed: u64) -> WavePacket {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let amplitudes = model
        .sites()
        .map(|n| {
            if n.abs() <= support {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let mut psi = WavePacket::new(model, amplitudes, 0.0).unwrap();
    psi.normalize();
    psi
}

#[test]
fn exact_and_numeric_agree_over_a_period_on_401_sites() {
    let p = rb87_preset().polariton().unwrap();
    let model = TightBindingModel::from_params(&p, 401).unwrap();
    let psi = gaussian_packet(&model, 10.0 * model.d, 0.0).unwrap();
    let t = p.bloch_period;
    let exact = evolve_exact(&psi, t).unwrap();
    let numeric = evolve_numeric(&psi, t, max_stable_dt(&model)).unwrap();
    assert!(exact.max_abs_diff(&numeric) <= 1e-6, "{}", exact.max_abs_diff(&numeric));
    assert!((exact.norm_sqr() - 1.0).abs() <= 1e-9);
    assert!((numeric.norm_sqr() - 1.0).abs() <= 1e-9);
}

#[test]
fn ladder_states_solve_the_eigenproblem() {
    let p = rb87_preset().polariton().unwrap();
    let model = TightBindingModel::from_params(&p, 301).unwrap();
    let step = model.d * model.force;
    for m in -3..=3 {
        let psi = wannier_stark_state(&model, m).unwrap();
        let h = apply_hamiltonian(&model, &psi);
        let energy = m as f64 * step;
        let residual = h
            .amplitudes
            .iter()
            .zip(&psi.amplitudes)
            .map(|(a, b)| (a - b * energy).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(residual <= 1e-6 * step.max(1.0), "m = {m}: {residual}");
        assert!((psi.energy() - energy).abs() <= 1e-9 * step * 4.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_states_revive_after_one_period(seed in any::<u64>(), support in 1i64..20) {
        let p = rb87_preset().polariton().unwrap();
        let model = TightBindingModel::from_params(&p, 301).unwrap();
        let psi = random_state(model, support, seed);
        let back = evolve_exact(&psi, p.bloch_period).unwrap();
        prop_assert!(psi.fidelity(&back) >= 1.0 - 1e-8);
    }

    #[test]
    fn exact_evolution_preserves_norm(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let p = rb87_preset().polariton().unwrap();
        let model = TightBindingModel::from_params(&p, 301).unwrap();
        let psi = random_state(model, 10, seed);
        let out = evolve_exact(&psi, frac * p.bloch_period).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_composes(seed in any::<u64>(), s in 0.0f64..0.5, u in 0.0f64..0.5) {
        let p = rb87_preset().polariton().unwrap();
        let model = TightBindingModel::from_params(&p, 511).unwrap();
        let psi = random_state(model, 6, seed);
        let t = p.bloch_period;
        let two_steps = evolve_exact(&evolve_exact(&psi, s * t).unwrap(), u * t).unwrap();
        let one_step = evolve_exact(&psi, (s + u) * t).unwrap();
        prop_assert!(two_steps.max_abs_diff(&one_step) < 1e-9);
    }
}

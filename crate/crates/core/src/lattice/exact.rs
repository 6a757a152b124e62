//! Closed-form propagator of the tilted tight-binding lattice.
//!
//! U_{μν}(t) = J_{ν−μ}(X)·e^{−iμω_Bt}·e^{−i(ν−μ)(ω_Bt−π)/2} with
//! X = (Δ/ω_B)·sin(ω_Bt/2). For F = 0 the argument tends to Δt/2.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::observables::{measured_quasimomentum, packet_moments};
use super::{TightBindingModel, WavePacket};
use crate::bessel::bessel_row;
use crate::error::{Error, Result};
use crate::series::TrajectorySeries;

/// Sites with |f|² above this count as occupied when checking margins.
const SUPPORT_THRESHOLD: f64 = 1e-12;
/// Largest edge occupancy tolerated after propagation.
pub(crate) const EDGE_LIMIT: f64 = 1e-8;

fn bessel_argument(model: &TightBindingModel, t: f64) -> f64 {
    let omega_b = model.omega_b();
    if omega_b == 0.0 {
        0.5 * model.band_width * t
    } else {
        model.band_width / omega_b * (0.5 * omega_b * t).sin()
    }
}

/// Largest |X(τ)| for τ between 0 and t.
fn max_bessel_argument(model: &TightBindingModel, t: f64) -> f64 {
    let omega_b = model.omega_b();
    if omega_b == 0.0 {
        return (0.5 * model.band_width * t).abs();
    }
    if (omega_b * t).abs() >= PI {
        (model.band_width / omega_b).abs()
    } else {
        bessel_argument(model, t).abs()
    }
}

fn coupling_phase(k: i64, omega_b: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -(k as f64) * (omega_b * t - PI) / 2.0)
}

/// ⟨μ|U(t)|ν⟩.
pub fn propagator_element(model: &TightBindingModel, mu: i64, nu: i64, t: f64) -> Result<Complex64> {
    let omega_b = model.omega_b();
    let x = bessel_argument(model, t);
    let k = nu - mu;
    let j = crate::bessel::bessel_j(k, x)?;
    Ok(j * Complex64::from_polar(1.0, -(mu as f64) * omega_b * t) * coupling_phase(k, omega_b, t))
}

/// ψ(t) = U(t)ψ(0) with the closed-form propagator.
///
/// Fails when the packet, spread by the largest Bessel argument reached
/// during [0, t], would touch the lattice ends.
pub fn evolve_exact(psi0: &WavePacket, t: f64) -> Result<WavePacket> {
    let model = psi0.model;
    check_margin(psi0, max_bessel_argument(&model, t))?;

    let n = model.n_sites;
    let omega_b = model.omega_b();
    let x = bessel_argument(&model, t);
    let row = bessel_row(x, n - 1)?;
    // kernel[k + n − 1] = J_k(X)·e^{−ik(ω_Bt−π)/2}
    let kernel: Vec<Complex64> = (-(n as i64 - 1)..=(n as i64 - 1))
        .map(|k| row.get(k) * coupling_phase(k, omega_b, t))
        .collect();

    let occupied: Vec<(usize, Complex64)> = psi0
        .amplitudes
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
        .collect();
    let amplitudes = (0..n)
        .map(|mu_i| {
            let mu = model.site(mu_i);
            let sum: Complex64 = occupied
                .iter()
                .map(|&(nu_i, a)| kernel[nu_i + n - 1 - mu_i] * a)
                .sum();
            sum * Complex64::from_polar(1.0, -(mu as f64) * omega_b * t)
        })
        .collect();

    let out = WavePacket { model, amplitudes, t: psi0.t + t };
    if out.edge_occupancy() > EDGE_LIMIT {
        return Err(Error::LatticeTooSmall {
            required: required_sites(psi0, max_bessel_argument(&model, t)) + 40,
            reason: format!("edge occupancy {:e} after propagation", out.edge_occupancy()),
        });
    }
    Ok(out)
}

fn support(psi: &WavePacket) -> Option<(i64, i64)> {
    let occupied = |a: &Complex64| a.norm_sqr() > SUPPORT_THRESHOLD;
    let lo = psi.amplitudes.iter().position(occupied)?;
    let hi = psi.amplitudes.iter().rposition(occupied)?;
    Some((psi.model.site(lo), psi.model.site(hi)))
}

fn required_sites(psi: &WavePacket, spread: f64) -> usize {
    let (lo, hi) = support(psi).unwrap_or((0, 0));
    let reach = lo.abs().max(hi.abs()) as f64 + spread.ceil() + 1.0;
    2 * reach as usize + 1
}

fn check_margin(psi: &WavePacket, spread: f64) -> Result<()> {
    let h = psi.model.half_width();
    let Some((lo, hi)) = support(psi) else {
        return Ok(());
    };
    let spread_sites = spread.ceil() as i64;
    if lo - spread_sites <= -h || hi + spread_sites >= h {
        return Err(Error::LatticeTooSmall {
            required: required_sites(psi, spread),
            reason: format!("trajectory spreads the packet by {spread:.1} sites"),
        });
    }
    Ok(())
}

/// Observables of U(t)ψ(0) at each of `times`, each computed directly from ψ(0).
pub fn exact_series(psi0: &WavePacket, times: &[f64]) -> Result<TrajectorySeries> {
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    check_margin(psi0, max_bessel_argument(&psi0.model, t_max))?;
    let mut series = TrajectorySeries::with_capacity(times.len());
    for &t in times {
        let psi = evolve_exact(psi0, t)?;
        let m = packet_moments(&psi);
        series.push(psi.t, m.center, m.width, measured_quasimomentum(&psi), m.norm);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::super::{gaussian_packet, wannier_stark_state};
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn small_model() -> TightBindingModel {
        TightBindingModel::new(3.0, 0.7, 1.0, 101).unwrap()
    }

    /// exp(−iHt) from the dense symmetric eigendecomposition of the truncated H.
    fn dense_propagator(model: &TightBindingModel, t: f64) -> DMatrix<Complex64> {
        let n = model.n_sites;
        let mut h = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = model.site(i) as f64 * model.omega_b();
            if i + 1 < n {
                h[(i, i + 1)] = -0.25 * model.band_width;
                h[(i + 1, i)] = -0.25 * model.band_width;
            }
        }
        let eig = h.symmetric_eigen();
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = DVector::from_iterator(
            n,
            eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        );
        &v * DMatrix::from_diagonal(&phases) * v.adjoint()
    }

    #[test]
    fn identity_at_time_zero() {
        let m = small_model();
        for (mu, nu) in [(0, 0), (3, 3), (2, 5), (-4, 1)] {
            let u = propagator_element(&m, mu, nu, 0.0).unwrap();
            let want = if mu == nu { 1.0 } else { 0.0 };
            assert!((u - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn revival_after_one_period() {
        let m = small_model();
        let period = m.bloch_period().unwrap();
        for (mu, nu) in [(0, 0), (3, 3), (2, 5), (-4, 1)] {
            let u = propagator_element(&m, mu, nu, period).unwrap();
            let want = if mu == nu { 1.0 } else { 0.0 };
            assert!((u - Complex64::new(want, 0.0)).norm() < 1e-12, "({mu},{nu}): {u}");
        }
    }

    #[test]
    fn matches_dense_matrix_exponential() {
        let m = TightBindingModel::new(3.0, 0.7, 1.0, 401).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let t = rng.gen_range(0.1..20.0);
            let u = dense_propagator(&m, t);
            for _ in 0..25 {
                let mu: i64 = rng.gen_range(-60..=60);
                let nu: i64 = mu + rng.gen_range(-8..=8);
                let want = u[(m.index(mu).unwrap(), m.index(nu).unwrap())];
                let got = propagator_element(&m, mu, nu, t).unwrap();
                assert!((got - want).norm() < 1e-8, "t={t} ({mu},{nu}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_time_is_identity_on_packets() {
        let m = TightBindingModel::new(2.0, 0.5, 1.0, 201).unwrap();
        let psi = gaussian_packet(&m, 10.0, 0.0).unwrap();
        let out = evolve_exact(&psi, 0.0).unwrap();
        assert!(out.max_abs_diff(&psi) < 1e-15);
    }

    #[test]
    fn composition() {
        let m = TightBindingModel::new(2.0, 0.5, 1.0, 201).unwrap();
        let psi = gaussian_packet(&m, 8.0, 0.0).unwrap();
        let (t1, t2) = (1.3, 4.1);
        let once = evolve_exact(&psi, t1 + t2).unwrap();
        let twice = evolve_exact(&evolve_exact(&psi, t1).unwrap(), t2).unwrap();
        assert!(once.max_abs_diff(&twice) < 1e-8);
    }

    #[test]
    fn ladder_states_only_acquire_phase() {
        let m = TightBindingModel::new(2.0, 0.5, 1.0, 201).unwrap();
        let psi = wannier_stark_state(&m, 2).unwrap();
        let t = 3.7;
        let out = evolve_exact(&psi, t).unwrap();
        let phase = Complex64::from_polar(1.0, -2.0 * m.omega_b() * t);
        for (a, b) in out.amplitudes.iter().zip(&psi.amplitudes) {
            assert!((a - b * phase).norm() < 1e-10);
        }
    }

    #[test]
    fn lattice_exit_is_reported() {
        let m = TightBindingModel::new(20.0, 0.1, 1.0, 61).unwrap();
        let psi = WavePacket::site_state(m, 0).unwrap();
        match evolve_exact(&psi, 10.0) {
            Err(Error::LatticeTooSmall { required, .. }) => assert!(required > 61),
            other => panic!("expected lattice error, got {other:?}"),
        }
    }

    #[test]
    fn free_limit_keeps_symmetric_packet_centred() {
        let m = TightBindingModel::new(2.0, 0.0, 1.0, 301).unwrap();
        let psi = gaussian_packet(&m, 10.0, 0.0).unwrap();
        let out = evolve_exact(&psi, 15.0).unwrap();
        assert!(packet_moments(&out).center.abs() < 1e-9 * m.d);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }
}

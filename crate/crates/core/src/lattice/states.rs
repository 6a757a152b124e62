use std::f64::consts::PI;

use num_complex::Complex64;

use super::{TightBindingModel, WavePacket};
use crate::bessel::bessel_row;
use crate::error::{Error, Result};

/// Below this σ/d the packet is not in the broad regime the rigid-packet
/// law assumes.
const BROAD_RATIO: f64 = 5.0;

/// f_n ∝ exp(−(nd − center)²/(4σ²)), renormalised on the truncated lattice.
///
/// The lattice must leave 6σ between the packet center and either edge.
pub fn gaussian_packet(model: &TightBindingModel, sigma: f64, center: f64) -> Result<WavePacket> {
    if !(sigma >= model.d) {
        return Err(Error::invalid(
            "sigma",
            format!("packet width {sigma:e} m is below one lattice constant {:e} m", model.d),
        ));
    }
    if sigma / model.d < BROAD_RATIO {
        log::warn!("σ/d = {:.2} is outside the broad-packet regime (≥ {BROAD_RATIO})", sigma / model.d);
    }
    let reach = center.abs() + 6.0 * sigma;
    let edge = model.half_width() as f64 * model.d;
    if reach > edge {
        let required = 2 * (reach / model.d * (1.0 - 1e-12)).ceil() as usize + 1;
        return Err(Error::LatticeTooSmall {
            required,
            reason: format!("Gaussian needs 6σ = {:e} m of margin around {center:e} m", 6.0 * sigma),
        });
    }
    let amplitudes = model
        .sites()
        .map(|n| {
            let x = n as f64 * model.d - center;
            Complex64::new((-x * x / (4.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect();
    let mut psi = WavePacket::new(*model, amplitudes, 0.0)?;
    psi.normalize();
    Ok(psi)
}

/// Wannier-Stark state ψ_m with amplitudes J_{n−m}(Δ/(2dF)).
pub fn wannier_stark_state(model: &TightBindingModel, m: i64) -> Result<WavePacket> {
    if model.force == 0.0 {
        return Err(Error::ZeroForce);
    }
    if model.index(m).is_none() {
        return Err(Error::invalid("m", format!("ladder index {m} lies outside the lattice")));
    }
    let argument = model.band_width / (2.0 * model.omega_b());
    let h = model.half_width();
    let row = bessel_row(argument, (h + m.abs()) as usize)?;
    let amplitudes = model.sites().map(|n| Complex64::new(row.get(n - m), 0.0)).collect();
    let mut psi = WavePacket::new(*model, amplitudes, 0.0)?;
    psi.normalize();
    Ok(psi)
}

/// Bloch state Σ_n e^{inκd}|n⟩ normalised on the truncated lattice.
pub fn bloch_state(model: &TightBindingModel, kappa: f64) -> WavePacket {
    let scale = 1.0 / (model.n_sites as f64).sqrt();
    let amplitudes = model
        .sites()
        .map(|n| Complex64::from_polar(scale, n as f64 * kappa * model.d))
        .collect();
    WavePacket { model: *model, amplitudes, t: 0.0 }
}

/// Rigid-packet approximation of f_n(t) for a broad Gaussian launched at x = 0:
/// (2πσ²/d²)^{−1/4}·exp(−d²(n − n_t)²/(4σ²))·exp(−inω_Bt + iΔ sin(ω_Bt)/(2ω_B)),
/// with n_t = x_c(t)/d.
pub fn broad_packet_amplitude(model: &TightBindingModel, n: i64, t: f64, sigma: f64) -> Result<Complex64> {
    if model.force == 0.0 {
        return Err(Error::ZeroForce);
    }
    let ratio = sigma / model.d;
    if !(ratio >= BROAD_RATIO) {
        return Err(Error::invalid(
            "sigma",
            format!("rigid-packet law needs σ/d ≥ {BROAD_RATIO}, got {ratio:.3}"),
        ));
    }
    if ratio < 10.0 {
        log::warn!("σ/d = {ratio:.2}: rigid-packet law is only approximate below 10");
    }
    let omega_b = model.omega_b();
    let amplitude = model.band_width / (2.0 * model.force);
    let n_t = amplitude * ((omega_b * t).cos() - 1.0) / model.d;
    let envelope = (2.0 * PI * ratio * ratio).powf(-0.25)
        * (-(n as f64 - n_t).powi(2) / (4.0 * ratio * ratio)).exp();
    let phase = -(n as f64) * omega_b * t + model.band_width * (omega_b * t).sin() / (2.0 * omega_b);
    Ok(Complex64::from_polar(envelope, phase))
}

#[cfg(test)]
mod tests {
    use super::super::{apply_hamiltonian, packet_moments};
    use super::*;

    fn rb_model(n_sites: usize) -> TightBindingModel {
        TightBindingModel::new(2.0 * PI * 74.9e3, 7.4797e8, 8e-6, n_sites).unwrap()
    }

    #[test]
    fn gaussian_is_normalised_and_centred() {
        let m = rb_model(401);
        let psi = gaussian_packet(&m, 1e-4, 0.0).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let mom = packet_moments(&psi);
        assert!(mom.center.abs() < 1e-12 * m.d);
        assert!(((mom.width - 1e-4) / 1e-4).abs() < 1e-3, "{}", mom.width);
    }

    #[test]
    fn shifted_gaussian_center() {
        let m = rb_model(401);
        let c = 5.0 * m.d;
        let psi = gaussian_packet(&m, 1e-4, c).unwrap();
        assert!((packet_moments(&psi).center - c).abs() < 1e-9 * m.d);
    }

    #[test]
    fn gaussian_margin_guard() {
        let m = rb_model(101);
        match gaussian_packet(&m, 1e-4, 0.0) {
            Err(Error::LatticeTooSmall { required, .. }) => assert_eq!(required, 151),
            other => panic!("expected margin error, got {other:?}"),
        }
        assert!(gaussian_packet(&m, 0.5 * m.d, 0.0).is_err());
    }

    #[test]
    fn strong_force_ladder_state_is_a_site() {
        let m = TightBindingModel::new(1e-9, 1.0, 1.0, 11).unwrap();
        let psi = wannier_stark_state(&m, 2).unwrap();
        assert!((psi.amplitude(2).re - 1.0).abs() < 1e-12);
        assert!(psi.amplitude(3).norm() < 1e-9);
    }

    #[test]
    fn ladder_state_eigenvalue() {
        let m = rb_model(401);
        for k in [-3, 0, 2] {
            let psi = wannier_stark_state(&m, k).unwrap();
            let h = apply_hamiltonian(&m, &psi);
            let e = k as f64 * m.omega_b();
            let residual: f64 = h
                .amplitudes
                .iter()
                .zip(&psi.amplitudes)
                .map(|(hp, p)| (hp - p * e).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(residual <= 1e-6, "m={k}: residual {residual}");
            let center = packet_moments(&psi).center;
            assert!((center - k as f64 * m.d).abs() < 1e-6 * m.d);
        }
    }

    #[test]
    fn ladder_needs_force() {
        let m = TightBindingModel::new(1.0, 0.0, 1.0, 11).unwrap();
        assert_eq!(wannier_stark_state(&m, 0), Err(Error::ZeroForce));
    }

    #[test]
    fn broad_packet_at_time_zero_matches_gaussian() {
        let m = rb_model(401);
        let psi = gaussian_packet(&m, 1e-4, 0.0).unwrap();
        for n in m.sites() {
            let f = broad_packet_amplitude(&m, n, 0.0, 1e-4).unwrap();
            assert!((f - psi.amplitude(n)).norm() < 1e-12, "site {n}");
        }
        assert!(broad_packet_amplitude(&m, 0, 0.0, 2.0 * m.d).is_err());
    }

    #[test]
    fn broad_packet_is_rigid() {
        let m = rb_model(401);
        let period = m.bloch_period().unwrap();
        for i in 0..8 {
            let t = i as f64 * period / 8.0;
            let amps: Vec<_> = m.sites().map(|n| broad_packet_amplitude(&m, n, t, 1e-4).unwrap()).collect();
            let psi = WavePacket::new(m, amps, t).unwrap();
            let w = packet_moments(&psi).width;
            assert!(((w - 1e-4) / 1e-4).abs() < 1e-3, "t={t}: {w}");
        }
    }
}

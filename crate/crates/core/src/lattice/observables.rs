use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::WavePacket;
use crate::eit::PolaritonParams;
use crate::units::wrap_to_brillouin_zone;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketMoments {
    /// ⟨x⟩ (m).
    pub center: f64,
    /// σ_x (m).
    pub width: f64,
    pub norm: f64,
}

/// ⟨x⟩ = Σ nd|f_n|², σ_x = √(⟨x²⟩ − ⟨x⟩²) and Σ|f_n|².
pub fn packet_moments(psi: &WavePacket) -> PacketMoments {
    let d = psi.model.d;
    let (mut norm, mut first, mut second) = (0.0, 0.0, 0.0);
    for (i, a) in psi.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        let x = psi.model.site(i) as f64 * d;
        norm += p;
        first += p * x;
        second += p * x * x;
    }
    if norm == 0.0 {
        return PacketMoments { center: 0.0, width: 0.0, norm };
    }
    let center = first / norm;
    let width = (second / norm - center * center).max(0.0).sqrt();
    PacketMoments { center, width, norm }
}

/// Quasimomentum of the largest Bloch component |⟨κ|ψ⟩|², with
/// |κ⟩ ∝ Σ_n e^{inκd}|n⟩, on a grid of spacing 2π/(Md), M ≥ 8·n_sites.
pub fn measured_quasimomentum(psi: &WavePacket) -> f64 {
    let n = psi.amplitudes.len();
    let size = (8 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    buf[..n].copy_from_slice(&psi.amplitudes);
    FftPlanner::new().plan_fft_forward(size).process(&mut buf);
    let peak = buf
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map_or(0, |(k, _)| k);
    let d = psi.model.d;
    wrap_to_brillouin_zone(2.0 * PI * peak as f64 / (size as f64 * d), d)
}

/// Semiclassical quasimomentum κ(t) = −F·t folded into the first zone.
///
/// The sign follows the e^{−inω_Bt} phase the propagator imprints on the
/// Wannier amplitudes, measured against Bloch states Σ_n e^{inκd}|n⟩.
pub fn quasimomentum_drift(force: f64, d: f64, t: f64) -> f64 {
    wrap_to_brillouin_zone(-force * t, d)
}

/// Max-norm difference after removing one global phase, fixed by the
/// largest-magnitude amplitude of `reference`.
pub fn phase_aligned_max_diff(reference: &WavePacket, other: &WavePacket) -> f64 {
    let Some((i, _)) = reference
        .amplitudes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
    else {
        return 0.0;
    };
    let (r, o) = (reference.amplitudes[i], other.amplitudes[i]);
    let phase = if o.norm() > 0.0 {
        Complex64::from_polar(1.0, r.arg() - o.arg())
    } else {
        Complex64::new(1.0, 0.0)
    };
    reference
        .amplitudes
        .iter()
        .zip(&other.amplitudes)
        .map(|(a, b)| (a - b * phase).norm())
        .fold(0.0, f64::max)
}

/// Semiclassical Bloch-oscillation trajectory of a broad packet launched at x = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticTrajectory {
    /// A = Δ/(2F) (m).
    pub amplitude: f64,
    /// ω_B = d·F (rad·s⁻¹).
    pub omega_b: f64,
    /// ζ = ω_B/v_g (rad·m⁻¹).
    pub zeta: f64,
}

impl AnalyticTrajectory {
    pub fn new(band_width: f64, force: f64, d: f64, v_g: f64) -> Self {
        let omega_b = d * force;
        Self { amplitude: band_width / (2.0 * force), omega_b, zeta: omega_b / v_g }
    }

    pub fn from_params(params: &PolaritonParams) -> Self {
        Self { amplitude: params.amplitude, omega_b: params.omega_b, zeta: params.zeta }
    }

    /// x_c(t) = A·[cos(ω_Bt) − 1].
    pub fn center(&self, t: f64) -> f64 {
        self.amplitude * ((self.omega_b * t).cos() - 1.0)
    }

    /// Beam-axis form A·[1 − cos(ζz)], the mirror image of [`Self::center`]
    /// at z = v_g·t.
    pub fn x_of_z(&self, z: f64) -> f64 {
        self.amplitude * (1.0 - (self.zeta * z).cos())
    }
}

/// x_c(t) for component 2 of `params`.
pub fn analytic_center(params: &PolaritonParams, t: f64) -> f64 {
    AnalyticTrajectory::from_params(params).center(t)
}

//! Single-band tight-binding dynamics in a tilted lattice.
//!
//! H = −(Δ/4) Σ_n (|n⟩⟨n+1| + h.c.) + d·F Σ_n n |n⟩⟨n| on the Wannier sites
//! n ∈ [−h, h], h = (n_sites − 1)/2, with open ends.

mod exact;
mod numeric;
mod observables;
mod states;

use num_complex::Complex64;

use crate::eit::PolaritonParams;
use crate::error::{Error, Result};

pub use exact::{evolve_exact, exact_series, propagator_element};
pub use numeric::{evolve_numeric, max_stable_dt, numeric_series, SplitStepPropagator};
pub use observables::{
    analytic_center, measured_quasimomentum, packet_moments, phase_aligned_max_diff,
    quasimomentum_drift, AnalyticTrajectory, PacketMoments,
};
pub use states::{bloch_state, broad_packet_amplitude, gaussian_packet, wannier_stark_state};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightBindingModel {
    /// Ground-band width Δ (rad·s⁻¹).
    pub band_width: f64,
    /// Static force F (rad·s⁻¹·m⁻¹).
    pub force: f64,
    /// Lattice constant (m).
    pub d: f64,
    /// Odd number of sites.
    pub n_sites: usize,
}

impl TightBindingModel {
    pub fn new(band_width: f64, force: f64, d: f64, n_sites: usize) -> Result<Self> {
        if !(band_width > 0.0 && band_width.is_finite()) {
            return Err(Error::invalid("band_width", format!("must be positive, got {band_width}")));
        }
        if !force.is_finite() {
            return Err(Error::invalid("force", "must be finite"));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::invalid("d", format!("must be positive, got {d}")));
        }
        if n_sites < 3 || n_sites.is_multiple_of(2) {
            return Err(Error::invalid("n_sites", format!("must be odd and at least 3, got {n_sites}")));
        }
        Ok(Self { band_width, force, d, n_sites })
    }

    /// Model for component 2 of a derived parameter set.
    pub fn from_params(params: &PolaritonParams, n_sites: usize) -> Result<Self> {
        Self::new(params.band_width, params.force_2, params.lattice_constant, n_sites)
    }

    /// 2·⌈2A/d + 3σ/d + |Δ/ω_B| + 60⌉ + 1 sites; the force terms drop out when F = 0.
    pub fn default_n_sites(band_width: f64, force: f64, d: f64, sigma: f64) -> usize {
        let mut half = 3.0 * sigma / d + 60.0;
        if force != 0.0 {
            let omega_b = d * force;
            half += (band_width / (force * d)).abs() + (band_width / omega_b).abs();
        }
        2 * half.ceil() as usize + 1
    }

    pub fn half_width(&self) -> i64 {
        (self.n_sites as i64 - 1) / 2
    }

    /// Site label n of storage index `i`.
    pub fn site(&self, i: usize) -> i64 {
        i as i64 - self.half_width()
    }

    /// Storage index of site `n`, if it lies on the lattice.
    pub fn index(&self, n: i64) -> Option<usize> {
        let i = n + self.half_width();
        (0..self.n_sites as i64).contains(&i).then_some(i as usize)
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        let h = self.half_width();
        -h..=h
    }

    /// ω_B = d·F.
    pub fn omega_b(&self) -> f64 {
        self.d * self.force
    }

    /// T_B = 2π/|ω_B|, or `None` without a force.
    pub fn bloch_period(&self) -> Option<f64> {
        (self.force != 0.0).then(|| 2.0 * std::f64::consts::PI / self.omega_b().abs())
    }
}

/// Site amplitudes f_n at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    pub model: TightBindingModel,
    pub amplitudes: Vec<Complex64>,
    pub t: f64,
}

impl WavePacket {
    pub fn new(model: TightBindingModel, amplitudes: Vec<Complex64>, t: f64) -> Result<Self> {
        if amplitudes.len() != model.n_sites {
            return Err(Error::invalid(
                "amplitudes",
                format!("expected {} sites, got {}", model.n_sites, amplitudes.len()),
            ));
        }
        Ok(Self { model, amplitudes, t })
    }

    /// |n⟩.
    pub fn site_state(model: TightBindingModel, n: i64) -> Result<Self> {
        let i = model
            .index(n)
            .ok_or_else(|| Error::invalid("site", format!("site {n} lies outside the lattice")))?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); model.n_sites];
        amplitudes[i] = Complex64::new(1.0, 0.0);
        Ok(Self { model, amplitudes, t: 0.0 })
    }

    pub fn amplitude(&self, n: i64) -> Complex64 {
        self.model.index(n).map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    /// Larger of |f|² on the two outermost sites.
    pub fn edge_occupancy(&self) -> f64 {
        let first = self.amplitudes.first().map_or(0.0, |a| a.norm_sqr());
        let last = self.amplitudes.last().map_or(0.0, |a| a.norm_sqr());
        first.max(last)
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &WavePacket) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|, insensitive to a global phase.
    pub fn fidelity(&self, other: &WavePacket) -> f64 {
        self.overlap(other).norm()
    }

    /// max_n |f_n − g_n|.
    pub fn max_abs_diff(&self, other: &WavePacket) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ⟨ψ|H|ψ⟩.
    pub fn energy(&self) -> f64 {
        let h = apply_hamiltonian(&self.model, self);
        self.overlap(&h).re
    }
}

/// (Hψ)_n = −(Δ/4)(f_{n−1} + f_{n+1}) + n·d·F·f_n.
pub fn apply_hamiltonian(model: &TightBindingModel, psi: &WavePacket) -> WavePacket {
    let f = &psi.amplitudes;
    let hop = -0.25 * model.band_width;
    let omega_b = model.omega_b();
    let n = f.len();
    let out = (0..n)
        .map(|i| {
            let mut acc = f[i] * (model.site(i) as f64 * omega_b);
            if i > 0 {
                acc += f[i - 1] * hop;
            }
            if i + 1 < n {
                acc += f[i + 1] * hop;
            }
            acc
        })
        .collect();
    WavePacket { model: *model, amplitudes: out, t: psi.t }
}

/// Samples 0, T/s, 2T/s, … covering `periods` periods.
pub fn time_grid(period: f64, samples_per_period: usize, periods: f64) -> Vec<f64> {
    let n = (samples_per_period as f64 * periods).round() as usize;
    let step = period / samples_per_period as f64;
    (0..=n).map(|i| i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(force: f64) -> TightBindingModel {
        TightBindingModel::new(4.0, force, 1.0, 21).unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(TightBindingModel::new(1.0, 0.0, 1.0, 4).is_err());
        assert!(TightBindingModel::new(1.0, 0.0, 1.0, 1).is_err());
        assert!(TightBindingModel::new(0.0, 0.0, 1.0, 5).is_err());
        assert!(TightBindingModel::new(1.0, 0.0, 0.0, 5).is_err());
        let m = model(0.5);
        assert_eq!(m.half_width(), 10);
        assert_eq!(m.site(0), -10);
        assert_eq!(m.index(10), Some(20));
        assert_eq!(m.index(11), None);
    }

    #[test]
    fn hamiltonian_on_site_state() {
        let m = model(0.7);
        let psi = WavePacket::site_state(m, 0).unwrap();
        let h = apply_hamiltonian(&m, &psi);
        for n in m.sites() {
            let want = if n.abs() == 1 { -1.0 } else { 0.0 };
            assert_eq!(h.amplitude(n), Complex64::new(want, 0.0), "site {n}");
        }
        let psi = WavePacket::site_state(m, 3).unwrap();
        let h = apply_hamiltonian(&m, &psi);
        assert!((h.amplitude(3).re - 3.0 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn expectation_is_real() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = model(0.3);
        for _ in 0..20 {
            let amps = (0..m.n_sites)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let mut psi = WavePacket::new(m, amps, 0.0).unwrap();
            psi.normalize();
            let h = apply_hamiltonian(&m, &psi);
            assert!(psi.overlap(&h).im.abs() < 1e-14);
        }
    }

    #[test]
    fn default_lattice_size() {
        // A/d = 39.3, Δ/ω_B = 78.6, σ/d = 12.5
        let n = TightBindingModel::default_n_sites(2.0 * std::f64::consts::PI * 74.9e3, 7.48e8, 8e-6, 1e-4);
        assert_eq!(n % 2, 1);
        assert!((505..=515).contains(&n), "{n}");
    }

    #[test]
    fn time_grid_spacing() {
        let g = time_grid(1.0, 4, 2.0);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]);
    }
}

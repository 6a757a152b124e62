//! Effective single-particle parameters of the two dark-state polariton
//! components under electromagnetically induced transparency.
//!
//! Inputs are SI quantities (J·T⁻¹, T·m⁻¹, m, rad·s⁻¹); outputs follow the
//! internal convention of [`crate::units`].

use std::f64::consts::{FRAC_PI_2, PI};

use crate::bands::KronigPenneySpec;
use crate::error::{Error, Result};
use crate::units::{
    self, FrequencyConvention, BOHR_MAGNETON, HBAR, SPEED_OF_LIGHT,
};

/// Magnetic moments of the three ground states of the tripod scheme (J·T⁻¹).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicLevels {
    pub mu_1: f64,
    pub mu_2: f64,
    pub mu_s: f64,
}

impl AtomicLevels {
    pub fn new(mu_1: f64, mu_2: f64, mu_s: f64) -> Result<Self> {
        for (name, v) in [("mu_1", mu_1), ("mu_2", mu_2), ("mu_s", mu_s)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("moment must be finite, got {v}")));
            }
        }
        Ok(Self { mu_1, mu_2, mu_s })
    }

    /// Builds the moments from `(m_F, g_F)` pairs of |1⟩, |2⟩ and |s⟩ as
    /// μ = m_F·g_F·μ_B.
    pub fn from_g_factors(level_1: (f64, f64), level_2: (f64, f64), level_s: (f64, f64)) -> Result<Self> {
        let moment = |(m_f, g_f): (f64, f64)| m_f * g_f * BOHR_MAGNETON;
        Self::new(moment(level_1), moment(level_2), moment(level_s))
    }

    /// Zeeman detunings δᵢ = μᵢB of |1⟩, |2⟩, |s⟩ in rad·s⁻¹ for a field `b` (T).
    ///
    /// Reported for diagnostics; after the EIT reduction only the effective
    /// moments enter the dynamics.
    pub fn zeeman_detunings(&self, b: f64) -> [f64; 3] {
        [self.mu_1, self.mu_2, self.mu_s].map(|mu| units::moment_to_internal(mu) * b)
    }
}

/// How the mixing angle is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingSource {
    /// Collective coupling g√N and control Rabi frequency Ω, both rad·s⁻¹.
    Couplings { g_sqrt_n: f64, rabi: f64 },
    /// Effective transverse mass m = k/v_g (s·m⁻²); fixes cos²θ = v_g/c.
    EffectiveMass(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub mixing: MixingSource,
    /// Probe wavelength (m).
    pub lambda_probe: f64,
    /// Magnitude of the linear field gradient B₁ (T·m⁻¹).
    pub b1: f64,
    /// Lattice constant of the periodic field (m).
    pub lattice_constant: f64,
}

impl FieldParams {
    pub fn new(mixing: MixingSource, lambda_probe: f64, b1: f64, lattice_constant: f64) -> Result<Self> {
        if !(lambda_probe > 0.0 && lambda_probe.is_finite()) {
            return Err(Error::invalid("lambda_probe", format!("must be positive, got {lambda_probe}")));
        }
        if !b1.is_finite() {
            return Err(Error::invalid("b1", "must be finite"));
        }
        if !(lattice_constant > 0.0 && lattice_constant.is_finite()) {
            return Err(Error::invalid("d", format!("must be positive, got {lattice_constant}")));
        }
        match mixing {
            MixingSource::Couplings { g_sqrt_n, rabi } => {
                mixing_angle(g_sqrt_n, rabi)?;
            }
            MixingSource::EffectiveMass(m) => {
                mixing_angle_from_mass(m, 2.0 * PI / lambda_probe)?;
            }
        }
        Ok(Self { mixing, lambda_probe, b1, lattice_constant })
    }

    /// Probe wavenumber 2π/λ (m⁻¹).
    pub fn k_probe(&self) -> f64 {
        2.0 * PI / self.lambda_probe
    }

    pub fn mixing_angle(&self) -> Result<f64> {
        match self.mixing {
            MixingSource::Couplings { g_sqrt_n, rabi } => mixing_angle(g_sqrt_n, rabi),
            MixingSource::EffectiveMass(m) => mixing_angle_from_mass(m, self.k_probe()),
        }
    }
}

/// tan θ = g√N/Ω.
pub fn mixing_angle(g_sqrt_n: f64, rabi: f64) -> Result<f64> {
    if !(rabi > 0.0) || !rabi.is_finite() {
        return Err(Error::Domain(format!(
            "control Rabi frequency must be positive for EIT, got {rabi}"
        )));
    }
    if !(g_sqrt_n >= 0.0) || !g_sqrt_n.is_finite() {
        return Err(Error::Domain(format!("collective coupling must be non-negative, got {g_sqrt_n}")));
    }
    Ok((g_sqrt_n / rabi).atan())
}

/// Inverts v_g = c·cos²θ.
pub fn mixing_angle_from_group_velocity(v_g: f64) -> Result<f64> {
    if !(v_g > 0.0 && v_g <= SPEED_OF_LIGHT) {
        return Err(Error::Domain(format!("group velocity must lie in (0, c], got {v_g}")));
    }
    Ok((v_g / SPEED_OF_LIGHT).sqrt().acos())
}

/// Mixing angle implied by an effective mass m = k/v_g.
pub fn mixing_angle_from_mass(m_eff: f64, k_probe: f64) -> Result<f64> {
    if !(m_eff > 0.0 && m_eff.is_finite()) {
        return Err(Error::invalid("effective_mass", format!("must be positive, got {m_eff}")));
    }
    mixing_angle_from_group_velocity(k_probe / m_eff)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    /// Group velocity along the beam (m·s⁻¹).
    pub v_g: f64,
    /// Effective transverse mass (s·m⁻²).
    pub m_eff: f64,
}

pub fn polariton_kinematics(theta: f64, k_probe: f64) -> Result<Kinematics> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!(
            "mixing angle must lie in [0, π/2), got {theta} (θ = π/2 has infinite mass)"
        )));
    }
    let v_g = SPEED_OF_LIGHT * theta.cos().powi(2);
    if v_g <= 0.0 {
        return Err(Error::Domain("group velocity underflows to zero".into()));
    }
    Ok(Kinematics { v_g, m_eff: k_probe / v_g })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoupling {
    /// Effective moments (J·T⁻¹).
    pub mu_eff_1: f64,
    pub mu_eff_2: f64,
    /// Static forces F_j = μ_j^eff·B₁/ħ (rad·s⁻¹·m⁻¹).
    pub force_1: f64,
    pub force_2: f64,
}

/// μ_j^eff = (μ_s − μ_j)·sin²θ and F_j = μ_j^eff·B₁.
pub fn effective_moments_and_forces(atom: &AtomicLevels, theta: f64, b1: f64) -> Result<EffectiveCoupling> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!("mixing angle must lie in [0, π/2), got {theta}")));
    }
    let s2 = theta.sin().powi(2);
    let mu_eff_1 = (atom.mu_s - atom.mu_1) * s2;
    let mu_eff_2 = (atom.mu_s - atom.mu_2) * s2;
    Ok(EffectiveCoupling {
        mu_eff_1,
        mu_eff_2,
        force_1: units::moment_to_internal(mu_eff_1) * b1,
        force_2: units::moment_to_internal(mu_eff_2) * b1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    /// Bloch angular frequency ω_B = d·F (rad·s⁻¹).
    pub omega_b: f64,
    /// Amplitude A = Δ/(2F) (m).
    pub amplitude: f64,
    /// Bloch period 2π/ω_B (s).
    pub period: f64,
    /// Spatial wavenumber ζ = ω_B/v_g of the oscillation along z (rad·m⁻¹).
    pub zeta: f64,
}

pub fn oscillation_observables(band_width: f64, force: f64, d: f64, v_g: f64) -> Result<Oscillation> {
    if force == 0.0 {
        return Err(Error::ZeroForce);
    }
    if !(d > 0.0) {
        return Err(Error::invalid("d", format!("must be positive, got {d}")));
    }
    if !(v_g > 0.0) {
        return Err(Error::invalid("v_g", format!("must be positive, got {v_g}")));
    }
    let omega_b = d * force;
    Ok(Oscillation {
        omega_b,
        amplitude: band_width / (2.0 * force),
        period: 2.0 * PI / omega_b,
        zeta: omega_b / v_g,
    })
}

/// Everything the dynamics needs about both components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonParams {
    pub theta: f64,
    pub k_probe: f64,
    pub v_g: f64,
    pub m_eff: f64,
    pub mu_eff_1: f64,
    pub mu_eff_2: f64,
    pub force_1: f64,
    pub force_2: f64,
    pub lattice_constant: f64,
    /// Ground-band width Δ used for the tight-binding model (rad·s⁻¹).
    pub band_width: f64,
    pub omega_b: f64,
    pub amplitude: f64,
    pub zeta: f64,
    pub bloch_period: f64,
}

impl PolaritonParams {
    /// Chains the EIT relations for component 2, which carries the force.
    pub fn derive(atom: &AtomicLevels, fields: &FieldParams, band_width: f64) -> Result<Self> {
        if !(band_width > 0.0) {
            return Err(Error::invalid("band_width", format!("must be positive, got {band_width}")));
        }
        let theta = fields.mixing_angle()?;
        let k_probe = fields.k_probe();
        let kin = polariton_kinematics(theta, k_probe)?;
        let coupling = effective_moments_and_forces(atom, theta, fields.b1)?;
        let osc = oscillation_observables(band_width, coupling.force_2, fields.lattice_constant, kin.v_g)?;
        Ok(Self {
            theta,
            k_probe,
            v_g: kin.v_g,
            m_eff: kin.m_eff,
            mu_eff_1: coupling.mu_eff_1,
            mu_eff_2: coupling.mu_eff_2,
            force_1: coupling.force_1,
            force_2: coupling.force_2,
            lattice_constant: fields.lattice_constant,
            band_width,
            omega_b: osc.omega_b,
            amplitude: osc.amplitude,
            zeta: osc.zeta,
            bloch_period: osc.period,
        })
    }
}

/// Published rubidium-87 D1-line scenario values, in the units they are quoted in.
pub mod rb87 {
    /// Barrier height V₀ (kHz).
    pub const V0_KHZ: f64 = 79.15;
    /// Lattice constant d (m).
    pub const LATTICE_CONSTANT: f64 = 8e-6;
    /// Effective transverse mass (s·m⁻²).
    pub const EFFECTIVE_MASS: f64 = 7.9e5;
    /// Probe wavelength (m).
    pub const LAMBDA_PROBE: f64 = 795e-9;
    /// Field gradient B₁ (μG·mm⁻¹).
    pub const B1_MICROGAUSS_PER_MM: f64 = 8.5e4;
    /// Moments of |1⟩, |2⟩, |s⟩ (J·T⁻¹); μ₁ = μ_s.
    pub const MU_1: f64 = 4.64e-24;
    pub const MU_2: f64 = -4.64e-24;
    pub const MU_S: f64 = 4.64e-24;
    /// Reported ground-band width Δ and first gap E_g (kHz).
    pub const BAND_WIDTH_KHZ: f64 = 74.9;
    pub const BAND_GAP_KHZ: f64 = 266.0;
    /// Initial packet width of both components (m).
    pub const SIGMA: f64 = 1e-4;
}

/// The rubidium-87 parameter set converted to internal units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rb87Preset {
    pub atom: AtomicLevels,
    pub fields: FieldParams,
    pub lattice: KronigPenneySpec,
    pub convention: FrequencyConvention,
    /// Published Δ and E_g converted with `convention` (rad·s⁻¹).
    pub band_width: f64,
    pub band_gap: f64,
}

/// Preset under the default (ordinary-frequency) reading of kHz values,
/// with the symmetric barrier/well split a = b = d/2.
pub fn rb87_preset() -> Rb87Preset {
    rb87_preset_with(FrequencyConvention::Ordinary)
}

pub fn rb87_preset_with(convention: FrequencyConvention) -> Rb87Preset {
    let atom = AtomicLevels { mu_1: rb87::MU_1, mu_2: rb87::MU_2, mu_s: rb87::MU_S };
    let fields = FieldParams {
        mixing: MixingSource::EffectiveMass(rb87::EFFECTIVE_MASS),
        lambda_probe: rb87::LAMBDA_PROBE,
        b1: units::microgauss_per_mm_to_tesla_per_m(rb87::B1_MICROGAUSS_PER_MM),
        lattice_constant: rb87::LATTICE_CONSTANT,
    };
    let lattice = KronigPenneySpec {
        d: rb87::LATTICE_CONSTANT,
        a: rb87::LATTICE_CONSTANT / 2.0,
        b: rb87::LATTICE_CONSTANT / 2.0,
        v0: convention.khz_to_internal(rb87::V0_KHZ),
        m_eff: rb87::EFFECTIVE_MASS,
    };
    Rb87Preset {
        atom,
        fields,
        lattice,
        convention,
        band_width: convention.khz_to_internal(rb87::BAND_WIDTH_KHZ),
        band_gap: convention.khz_to_internal(rb87::BAND_GAP_KHZ),
    }
}

impl Rb87Preset {
    pub fn polariton(&self) -> Result<PolaritonParams> {
        PolaritonParams::derive(&self.atom, &self.fields, self.band_width)
    }
}

/// Converts an internal force back to J·m⁻¹.
pub fn force_to_si(force: f64) -> f64 {
    force * HBAR
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn mixing_angle_limits() {
        assert_eq!(mixing_angle(0.0, 1.0).unwrap(), 0.0);
        let th = mixing_angle(3.0, 3.0).unwrap();
        assert!((th - PI / 4.0).abs() < 1e-15);
        assert!((th.cos().powi(2) - 0.5).abs() < 1e-15);
        assert!(matches!(mixing_angle(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(mixing_angle(1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn slow_light_angle_from_published_mass() {
        // v_g = k/m = 7.903e6 / 7.9e5 ≈ 10 m/s
        let k = 2.0 * PI / rb87::LAMBDA_PROBE;
        let v_g = k / rb87::EFFECTIVE_MASS;
        assert!((v_g - 10.004).abs() < 1e-3, "v_g = {v_g}");
        let th = mixing_angle_from_group_velocity(v_g).unwrap();
        let gap = FRAC_PI_2 - th;
        // cos²θ = v_g/c
        assert!((gap - 1.826e-4).abs() < 0.001e-4, "π/2 − θ = {gap}");
        // the same angle through the coupling parametrisation
        let via_couplings = mixing_angle(th.tan(), 1.0).unwrap();
        assert!((via_couplings - th).abs() < 1e-12);
    }

    #[test]
    fn kinematics_vacuum_and_singular() {
        let k = 1e7;
        let kin = polariton_kinematics(0.0, k).unwrap();
        assert_eq!(kin.v_g, SPEED_OF_LIGHT);
        assert!(rel(kin.m_eff, k / SPEED_OF_LIGHT) < 1e-15);
        assert!(polariton_kinematics(FRAC_PI_2, k).is_err());
    }

    #[test]
    fn group_velocity_monotone_in_rabi() {
        let k = 1e7;
        let mut last = 0.0;
        for i in 0..20 {
            let rabi = 1e3 * 2f64.powi(i);
            let th = mixing_angle(1e6, rabi).unwrap();
            let v = polariton_kinematics(th, k).unwrap().v_g;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn moments_vanish_for_pure_photon_and_equal_levels() {
        let atom = AtomicLevels::new(rb87::MU_1, rb87::MU_2, rb87::MU_S).unwrap();
        let c = effective_moments_and_forces(&atom, 0.0, 1.0).unwrap();
        assert_eq!((c.mu_eff_1, c.mu_eff_2, c.force_1, c.force_2), (0.0, 0.0, 0.0, 0.0));
        let c = effective_moments_and_forces(&atom, 1.2, 1.0).unwrap();
        assert_eq!(c.mu_eff_1, 0.0);
        assert_eq!(c.force_1, 0.0);
    }

    #[test]
    fn published_force_conversion() {
        // (μ_s − μ₂)·B₁ = 9.28e-24 × 8.5e-3 ≈ 7.89e-26 J/m, ≈ 7.48e8 rad/s/m after /ħ
        let p = rb87_preset().polariton().unwrap();
        let f_si = force_to_si(p.force_2);
        assert!(rel(f_si, 9.28e-24 * 8.5e-3) < 1e-6, "F₂ = {f_si}");
        assert!(rel(p.force_2, 7.48e8) < 1e-3, "F₂ = {}", p.force_2);
    }

    #[test]
    fn oscillation_from_published_values() {
        let force = 9.28e-24 * 8.5e-3 / HBAR;
        let osc = oscillation_observables(2.0 * PI * 74.9e3, force, 8e-6, 10.0).unwrap();
        assert!(rel(osc.omega_b, 5.99e3) < 2e-3, "ω_B = {}", osc.omega_b);
        assert!(rel(osc.period, 1.05e-3) < 2e-3, "T_B = {}", osc.period);
        assert!(rel(osc.amplitude, 3.15e-4) < 2e-3, "A = {}", osc.amplitude);
        assert!(rel(osc.amplitude / 8e-6, 39.3) < 2e-3);
        assert!(rel(osc.zeta, 599.0) < 2e-3, "ζ = {}", osc.zeta);
        assert!(rel(2.0 * PI / osc.zeta, 1.05e-2) < 2e-3);
        assert_eq!(oscillation_observables(1.0, 0.0, 8e-6, 10.0), Err(Error::ZeroForce));
    }

    #[test]
    fn preset_values() {
        let p = rb87_preset();
        assert!(rel(p.lattice.v0, 2.0 * PI * 79.15e3) < 1e-15);
        assert_eq!(p.lattice.d, 8e-6);
        assert_eq!(p.atom.mu_1, p.atom.mu_s);
        let pol = p.polariton().unwrap();
        assert_eq!(pol.force_1, 0.0);
        assert!(rel(pol.v_g, 10.0) < 1e-3);
    }

    #[test]
    fn g_factor_product_rule() {
        let a = AtomicLevels::from_g_factors((1.0, -0.5), (-1.0, -0.5), (1.0, 0.5)).unwrap();
        assert_eq!(a.mu_1, -0.5 * BOHR_MAGNETON);
        assert_eq!(a.mu_2, 0.5 * BOHR_MAGNETON);
        assert_eq!(a.mu_s, a.mu_2);
        assert!(AtomicLevels::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn detunings_scale_with_field() {
        let a = AtomicLevels::new(rb87::MU_1, rb87::MU_2, rb87::MU_S).unwrap();
        let d = a.zeeman_detunings(1e-4);
        assert!(rel(d[1], -4.64e-28 / HBAR) < 1e-12);
        assert_eq!(d[0], d[2]);
    }

    #[test]
    fn field_params_reject_bad_input() {
        let mix = MixingSource::EffectiveMass(7.9e5);
        assert!(FieldParams::new(mix, 0.0, 1e-3, 8e-6).is_err());
        assert!(FieldParams::new(mix, 795e-9, 1e-3, -1.0).is_err());
        assert!(FieldParams::new(MixingSource::Couplings { g_sqrt_n: 1.0, rabi: 0.0 }, 795e-9, 1e-3, 8e-6).is_err());
        let f = FieldParams::new(mix, 795e-9, 1e-3, 8e-6).unwrap();
        assert!((f.k_probe() * f.lambda_probe - 2.0 * PI).abs() < 1e-12 * 2.0 * PI);
    }
}

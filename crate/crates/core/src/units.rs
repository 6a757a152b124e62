//! Physical constants and the internal unit convention.
//!
//! Internally ħ = 1. Energies are angular frequencies (rad·s⁻¹), magnetic
//! moments are divided by ħ on ingestion (rad·s⁻¹·T⁻¹) and forces are
//! therefore in rad·s⁻¹·m⁻¹. Masses follow from m = k/v_g in s·m⁻².

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Reduced Planck constant (J·s), exact since the 2019 SI redefinition.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum (m·s⁻¹).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Bohr magneton (J·T⁻¹).
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;

/// How a frequency quoted in kHz is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FrequencyConvention {
    /// kHz are ordinary frequencies: multiply by 2π·10³ to get rad·s⁻¹.
    #[default]
    Ordinary,
    /// kHz label angular frequencies: multiply by 10³ only.
    Angular,
}

impl FrequencyConvention {
    pub const ALL: [FrequencyConvention; 2] =
        [FrequencyConvention::Ordinary, FrequencyConvention::Angular];

    /// Converts a quoted kHz value into an internal angular frequency.
    pub fn khz_to_internal(self, khz: f64) -> f64 {
        match self {
            FrequencyConvention::Ordinary => 2.0 * PI * khz * 1e3,
            FrequencyConvention::Angular => khz * 1e3,
        }
    }

    pub fn internal_to_khz(self, omega: f64) -> f64 {
        match self {
            FrequencyConvention::Ordinary => omega / (2.0 * PI * 1e3),
            FrequencyConvention::Angular => omega / 1e3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyConvention::Ordinary => "ordinary",
            FrequencyConvention::Angular => "angular",
        }
    }
}

impl fmt::Display for FrequencyConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FrequencyConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ordinary" => Ok(FrequencyConvention::Ordinary),
            "angular" => Ok(FrequencyConvention::Angular),
            other => Err(format!(
                "unknown frequency convention `{other}` (expected `ordinary` or `angular`)"
            )),
        }
    }
}

/// J·T⁻¹ → rad·s⁻¹·T⁻¹.
pub fn moment_to_internal(mu_joule_per_tesla: f64) -> f64 {
    mu_joule_per_tesla / HBAR
}

pub fn moment_from_internal(mu_internal: f64) -> f64 {
    mu_internal * HBAR
}

/// μG·mm⁻¹ → T·m⁻¹ (1 μG = 10⁻¹⁰ T, 1 mm = 10⁻³ m).
pub fn microgauss_per_mm_to_tesla_per_m(value: f64) -> f64 {
    value * 1e-10 / 1e-3
}

pub fn tesla_per_m_to_microgauss_per_mm(value: f64) -> f64 {
    value * 1e-3 / 1e-10
}

/// Wraps a quasimomentum into the first Brillouin zone [−π/d, π/d).
pub fn wrap_to_brillouin_zone(kappa: f64, d: f64) -> f64 {
    let zone = 2.0 * PI / d;
    let shifted = (kappa + PI / d).rem_euclid(zone);
    let wrapped = shifted - PI / d;
    // rem_euclid can land exactly on `zone` after rounding
    if wrapped >= PI / d {
        wrapped - zone
    } else {
        wrapped
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions_differ_by_two_pi() {
        let ord = FrequencyConvention::Ordinary.khz_to_internal(1.0);
        let ang = FrequencyConvention::Angular.khz_to_internal(1.0);
        assert!((ord / ang - 2.0 * PI).abs() < 1e-15);
        for conv in FrequencyConvention::ALL {
            let back = conv.internal_to_khz(conv.khz_to_internal(79.15));
            assert!((back - 79.15).abs() < 1e-12);
            assert_eq!(conv.as_str().parse::<FrequencyConvention>(), Ok(conv));
        }
        assert!("hz".parse::<FrequencyConvention>().is_err());
    }

    #[test]
    fn field_gradient_conversion() {
        let b1 = microgauss_per_mm_to_tesla_per_m(8.5e4);
        assert!((b1 - 8.5e-3).abs() < 1e-18);
        assert!((tesla_per_m_to_microgauss_per_mm(b1) - 8.5e4).abs() < 1e-9);
    }

    #[test]
    fn brillouin_wrap() {
        let d = 8e-6;
        assert_eq!(wrap_to_brillouin_zone(0.0, d), 0.0);
        assert!(wrap_to_brillouin_zone(2.0 * PI / d, d).abs() < 1e-6);
        let k = wrap_to_brillouin_zone(1.5 * PI / d, d);
        assert!((k + 0.5 * PI / d).abs() < 1e-6);
        for i in -50..50 {
            let k = wrap_to_brillouin_zone(i as f64 * 0.37 / d, d);
            assert!((-PI / d..PI / d).contains(&k));
        }
    }
}

//! Machine-readable run summary.

use std::collections::BTreeMap;

use polariton_core::bands::{single_band_validity, SINGLE_BAND_THRESHOLD};
use polariton_core::eit::PolaritonParams;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{emit_config, ScenarioConfig};

/// Parameters derived from the configuration by the core library.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedParams {
    pub theta: f64,
    pub k_probe: f64,
    pub v_g: f64,
    pub m_eff: f64,
    pub mu_eff_1: f64,
    pub mu_eff_2: f64,
    pub force_1: f64,
    pub force_2: f64,
    pub omega_b: f64,
    pub bloch_period: f64,
    pub amplitude: f64,
    pub amplitude_over_d: f64,
    pub zeta: f64,
    pub band_width: f64,
    pub band_gap: f64,
    pub validity_ratio: f64,
    pub validity_threshold: f64,
    pub single_band_valid: bool,
    pub sigma: f64,
    pub sigma_over_d: f64,
    pub lattice_constant: f64,
}

impl DerivedParams {
    pub fn from_config(config: &ScenarioConfig) -> polariton_core::Result<(Self, PolaritonParams)> {
        let atom = config.atom_levels()?;
        let fields = config.field_params()?;
        let p = PolaritonParams::derive(&atom, &fields, config.band_width())?;
        let band_gap = config.band_gap();
        let validity = single_band_validity(p.force_2, p.lattice_constant, band_gap)?;
        let sigma = config.simulation.sigma;
        let derived = Self {
            theta: p.theta,
            k_probe: p.k_probe,
            v_g: p.v_g,
            m_eff: p.m_eff,
            mu_eff_1: p.mu_eff_1,
            mu_eff_2: p.mu_eff_2,
            force_1: p.force_1,
            force_2: p.force_2,
            omega_b: p.omega_b,
            bloch_period: p.bloch_period,
            amplitude: p.amplitude,
            amplitude_over_d: p.amplitude / p.lattice_constant,
            zeta: p.zeta,
            band_width: p.band_width,
            band_gap,
            validity_ratio: validity.ratio,
            validity_threshold: SINGLE_BAND_THRESHOLD,
            single_band_valid: validity.valid,
            sigma,
            sigma_over_d: sigma / p.lattice_constant,
            lattice_constant: p.lattice_constant,
        };
        Ok((derived, p))
    }
}

/// One pass/fail verdict: `measured` compared against `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }

    /// Passes when `measured ≥ tolerance`.
    pub fn at_least(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured >= tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// SHA-256 of the normalised configuration text.
    pub input_sha256: String,
    pub normalized_config: String,
    pub engine: String,
    pub cli: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(config: &ScenarioConfig, seed: Option<u64>) -> Self {
        let normalized_config = emit_config(config);
        Self {
            input_sha256: hex::encode(Sha256::digest(normalized_config.as_bytes())),
            normalized_config,
            engine: format!("polariton-core {}", polariton_core::VERSION),
            cli: format!("polariton-cli {}", env!("CARGO_PKG_VERSION")),
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub frequency_convention: String,
    pub derived: DerivedParams,
    pub checks: Vec<Check>,
    /// Scenario-specific scalar results.
    pub results: BTreeMap<String, f64>,
    /// Scenario-specific labels (e.g. the best-fit convention).
    pub labels: BTreeMap<String, String>,
    pub artifacts: Vec<String>,
    pub provenance: Provenance,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn derived_preset_values() {
        let c = parse_config("").unwrap();
        let (d, _) = DerivedParams::from_config(&c).unwrap();
        assert!((d.v_g - 10.0).abs() < 0.01);
        assert!(((d.bloch_period - 1.05e-3) / 1.05e-3).abs() < 0.02);
        assert!(((d.amplitude_over_d - 39.3) / 39.3).abs() < 0.02);
        assert!(d.validity_ratio < 0.01 && d.single_band_valid);
        assert!((d.sigma_over_d - 12.5).abs() < 1e-12);
    }

    #[test]
    fn hash_tracks_normalised_config() {
        let a = Provenance::new(&parse_config("").unwrap(), None);
        let b = Provenance::new(&parse_config("[lattice]\nd = 8e-6\n").unwrap(), None);
        let c = Provenance::new(&parse_config("[lattice]\nd = 9e-6\n").unwrap(), None);
        assert_eq!(a.input_sha256, b.input_sha256);
        assert_ne!(a.input_sha256, c.input_sha256);
        assert_eq!(a.input_sha256.len(), 64);
    }
}

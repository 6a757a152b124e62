//! Scenario configuration: a TOML document with the top-level keys
//! `scenario` and `frequency_convention` plus the sections `[atom]`,
//! `[fields]`, `[lattice]`, `[simulation]` and `[output]`.
//!
//! Every key is optional and defaults to the rubidium-87 preset. Unknown
//! keys are rejected. Errors carry the dotted key path and the 1-based line
//! of the offending key.

use std::fmt;
use std::str::FromStr;

use polariton_core::bands::KronigPenneySpec;
use polariton_core::eit::{polariton_kinematics, rb87, AtomicLevels, FieldParams, MixingSource};
use polariton_core::units::{microgauss_per_mm_to_tesla_per_m, FrequencyConvention};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    BandStructure,
    BlochOscillation,
    FreeComponent,
    WannierStark,
    Figure3,
    ValidityCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::BandStructure,
        Scenario::BlochOscillation,
        Scenario::FreeComponent,
        Scenario::WannierStark,
        Scenario::Figure3,
        Scenario::ValidityCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::BandStructure => "band-structure",
            Scenario::BlochOscillation => "bloch-oscillation",
            Scenario::FreeComponent => "free-component",
            Scenario::WannierStark => "wannier-stark",
            Scenario::Figure3 => "figure3",
            Scenario::ValidityCheck => "validity-check",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.as_str()).collect();
                format!("unknown scenario `{s}`, expected one of {}", names.join(", "))
            })
    }
}

/// How kHz figures are read: ordinary frequency (×2π·10³) or angular (×10³).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Ordinary,
    Angular,
}

impl From<Convention> for FrequencyConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Ordinary => FrequencyConvention::Ordinary,
            Convention::Angular => FrequencyConvention::Angular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!("unknown format `{other}`, expected csv, json or both")),
        }
    }
}

/// Magnetic moments (J·T⁻¹).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomSection {
    pub mu_1: f64,
    pub mu_2: f64,
    pub mu_s: f64,
}

impl Default for AtomSection {
    fn default() -> Self {
        Self { mu_1: rb87::MU_1, mu_2: rb87::MU_2, mu_s: rb87::MU_S }
    }
}

/// Probe and field parameters. The mixing angle comes either from
/// `effective_mass` (s·m⁻²) or from the pair `coupling_gsqrtn`, `rabi_omega`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldsSection {
    /// Probe wavelength (m).
    pub lambda_probe: f64,
    /// Field gradient B₁ (μG·mm⁻¹).
    pub b1_microgauss_per_mm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_gsqrtn: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi_omega: Option<f64>,
}

impl Default for FieldsSection {
    fn default() -> Self {
        Self {
            lambda_probe: rb87::LAMBDA_PROBE,
            b1_microgauss_per_mm: rb87::B1_MICROGAUSS_PER_MM,
            effective_mass: None,
            coupling_gsqrtn: None,
            rabi_omega: None,
        }
    }
}

/// Kronig-Penney lattice and the published band figures (kHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    /// Lattice constant (m).
    pub d: f64,
    /// Barrier width a as a fraction of d.
    pub barrier_fraction: f64,
    pub v0_khz: f64,
    pub band_width_khz: f64,
    pub band_gap_khz: f64,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            d: rb87::LATTICE_CONSTANT,
            barrier_fraction: 0.5,
            v0_khz: rb87::V0_KHZ,
            band_width_khz: rb87::BAND_WIDTH_KHZ,
            band_gap_khz: rb87::BAND_GAP_KHZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    /// Initial packet width (m).
    pub sigma: f64,
    /// Numeric lattice step (s); defaults to the stability budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Odd lattice size; defaults to a size that holds the full oscillation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    pub grid_points_per_cell: usize,
    /// Continuum step (s); defaults to the phase budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_dt: Option<f64>,
    pub samples_per_period: usize,
    pub periods: f64,
    /// Duration of the free-component run (s).
    pub free_duration: f64,
    pub free_samples: usize,
    pub n_bands: usize,
    /// Whether bloch-oscillation also runs the continuum grid oracle.
    pub continuum: bool,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            sigma: rb87::SIGMA,
            dt: None,
            n_sites: None,
            grid_points_per_cell: 16,
            grid_dt: None,
            samples_per_period: 64,
            periods: 2.0,
            free_duration: 5e-3,
            free_samples: 100,
            n_bands: 4,
            continuum: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { format: OutputFormat::Both, directory: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    pub frequency_convention: Convention,
    pub atom: AtomSection,
    pub fields: FieldsSection,
    pub lattice: LatticeSection,
    pub simulation: SimulationSection,
    pub output: OutputSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            frequency_convention: Convention::Ordinary,
            atom: AtomSection::default(),
            fields: FieldsSection::default(),
            lattice: LatticeSection::default(),
            simulation: SimulationSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Syntax,
    UnknownKey,
    Invalid,
}

/// A configuration problem anchored to a key and, when known, a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub kind: ConfigErrorKind,
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ConfigErrorKind::Syntax => "syntax error",
            ConfigErrorKind::UnknownKey => "unknown key",
            ConfigErrorKind::Invalid => "invalid value",
        };
        match self.line {
            Some(line) => write!(f, "line {line}: {kind} at `{}`: {}", self.key, self.message),
            None => write!(f, "{kind} at `{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses and validates a configuration, filling defaults from the preset.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut config: ScenarioConfig = toml::from_str(text).map_err(|e| from_toml_error(text, &e))?;
    normalize(&mut config, text)?;
    Ok(config)
}

/// Normalised TOML for a configuration; parsing it back yields the same value.
pub fn emit_config(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("configuration serialises to TOML")
}

fn from_toml_error(text: &str, err: &toml::de::Error) -> ConfigError {
    let line = err.span().map(|span| line_of_offset(text, span.start));
    let message = err.message().to_string();
    let field = backticked(&message);
    let section = line.and_then(|l| section_at(text, l));
    let key = match (&section, &field) {
        (Some(s), Some(f)) => format!("{s}.{f}"),
        (None, Some(f)) => f.clone(),
        (Some(s), None) => s.clone(),
        (None, None) => "<document>".into(),
    };
    let kind = if message.starts_with("unknown field") {
        ConfigErrorKind::UnknownKey
    } else {
        ConfigErrorKind::Syntax
    };
    ConfigError { kind, key, line, message }
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Name of the `[section]` in force at `line`, if any.
fn section_at(text: &str, line: usize) -> Option<String> {
    text.lines()
        .take(line)
        .filter_map(|l| {
            let t = l.trim();
            t.strip_prefix('[').and_then(|r| r.split(']').next()).map(|s| s.trim().to_string())
        })
        .last()
}

/// Line holding `key` inside `[section]` (or at top level when `section` is empty).
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.split(']').next().unwrap_or("").trim().to_string();
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else { continue };
        let lhs = lhs.trim().trim_matches('"');
        let (sec, name) = match lhs.rsplit_once('.') {
            Some((prefix, name)) if current.is_empty() => (prefix.to_string(), name),
            _ => (current.clone(), lhs),
        };
        if sec == section && name == key {
            return Some(i + 1);
        }
    }
    None
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn fail(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        let path = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        ConfigError {
            kind: ConfigErrorKind::Invalid,
            key: path,
            line: locate(self.text, section, key),
            message: message.into(),
        }
    }

    fn positive(&self, section: &str, key: &str, v: f64) -> Result<(), ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(section, key, format!("must be positive and finite, got {v}")))
        }
    }

    fn finite(&self, section: &str, key: &str, v: f64) -> Result<(), ConfigError> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(section, key, format!("must be finite, got {v}")))
        }
    }
}

fn normalize(config: &mut ScenarioConfig, text: &str) -> Result<(), ConfigError> {
    let v = Validator { text };

    let atom = &config.atom;
    v.finite("atom", "mu_1", atom.mu_1)?;
    v.finite("atom", "mu_2", atom.mu_2)?;
    v.finite("atom", "mu_s", atom.mu_s)?;
    if atom.mu_2 == atom.mu_s {
        return Err(v.fail("atom", "mu_2", "must differ from mu_s, or component 2 feels no force"));
    }

    let fields = &mut config.fields;
    v.positive("fields", "lambda_probe", fields.lambda_probe)?;
    v.finite("fields", "b1_microgauss_per_mm", fields.b1_microgauss_per_mm)?;
    match (fields.effective_mass, fields.coupling_gsqrtn, fields.rabi_omega) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(v.fail(
                "fields",
                "effective_mass",
                "give either effective_mass or the coupling pair, not both",
            ));
        }
        (None, Some(g), Some(r)) => {
            v.positive("fields", "coupling_gsqrtn", g)?;
            v.positive("fields", "rabi_omega", r)?;
        }
        (None, Some(_), None) => return Err(v.fail("fields", "coupling_gsqrtn", "needs rabi_omega as well")),
        (None, None, Some(_)) => return Err(v.fail("fields", "rabi_omega", "needs coupling_gsqrtn as well")),
        (mass, None, None) => {
            let m = mass.unwrap_or(rb87::EFFECTIVE_MASS);
            v.positive("fields", "effective_mass", m)?;
            fields.effective_mass = Some(m);
        }
    }

    let lat = &config.lattice;
    v.positive("lattice", "d", lat.d)?;
    if !(lat.barrier_fraction > 0.0 && lat.barrier_fraction < 1.0) {
        return Err(v.fail("lattice", "barrier_fraction", format!("must lie in (0, 1), got {}", lat.barrier_fraction)));
    }
    v.positive("lattice", "v0_khz", lat.v0_khz)?;
    v.positive("lattice", "band_width_khz", lat.band_width_khz)?;
    v.positive("lattice", "band_gap_khz", lat.band_gap_khz)?;

    let sim = &config.simulation;
    v.positive("simulation", "sigma", sim.sigma)?;
    if sim.sigma < lat.d {
        return Err(v.fail("simulation", "sigma", "packet must span at least one lattice constant"));
    }
    if let Some(dt) = sim.dt {
        v.positive("simulation", "dt", dt)?;
    }
    if let Some(dt) = sim.grid_dt {
        v.positive("simulation", "grid_dt", dt)?;
    }
    if let Some(n) = sim.n_sites {
        if n < 3 || n % 2 == 0 {
            return Err(v.fail("simulation", "n_sites", format!("must be odd and at least 3, got {n}")));
        }
    }
    if sim.grid_points_per_cell < 8 {
        return Err(v.fail("simulation", "grid_points_per_cell", "need at least 8 points per cell"));
    }
    if sim.samples_per_period < 8 {
        return Err(v.fail("simulation", "samples_per_period", "need at least 8 samples per period"));
    }
    v.positive("simulation", "periods", sim.periods)?;
    v.positive("simulation", "free_duration", sim.free_duration)?;
    if sim.free_samples == 0 {
        return Err(v.fail("simulation", "free_samples", "must be at least 1"));
    }
    if sim.n_bands < 2 {
        return Err(v.fail("simulation", "n_bands", "need at least 2 bands to report a gap"));
    }

    // the owning constructors enforce the remaining invariants
    config.atom_levels().map_err(|e| v.fail("atom", "mu_1", e.to_string()))?;
    config.field_params().map_err(|e| v.fail("fields", "lambda_probe", e.to_string()))?;
    config.kronig_penney().map_err(|e| v.fail("lattice", "v0_khz", e.to_string()))?;
    Ok(())
}

impl ScenarioConfig {
    pub fn convention(&self) -> FrequencyConvention {
        self.frequency_convention.into()
    }

    pub fn atom_levels(&self) -> polariton_core::Result<AtomicLevels> {
        AtomicLevels::new(self.atom.mu_1, self.atom.mu_2, self.atom.mu_s)
    }

    pub fn field_params(&self) -> polariton_core::Result<FieldParams> {
        let f = &self.fields;
        let mixing = match (f.coupling_gsqrtn, f.rabi_omega) {
            (Some(g_sqrt_n), Some(rabi)) => MixingSource::Couplings { g_sqrt_n, rabi },
            _ => MixingSource::EffectiveMass(f.effective_mass.unwrap_or(rb87::EFFECTIVE_MASS)),
        };
        FieldParams::new(
            mixing,
            f.lambda_probe,
            microgauss_per_mm_to_tesla_per_m(f.b1_microgauss_per_mm),
            self.lattice.d,
        )
    }

    /// Polariton mass, derived from the couplings when those are given.
    pub fn effective_mass(&self) -> polariton_core::Result<f64> {
        match self.fields.effective_mass {
            Some(m) => Ok(m),
            None => {
                let fields = self.field_params()?;
                Ok(polariton_kinematics(fields.mixing_angle()?, fields.k_probe())?.m_eff)
            }
        }
    }

    pub fn kronig_penney(&self) -> polariton_core::Result<KronigPenneySpec> {
        let l = &self.lattice;
        KronigPenneySpec::new(
            l.d,
            l.barrier_fraction * l.d,
            self.convention().khz_to_internal(l.v0_khz),
            self.effective_mass()?,
        )
    }

    /// Published Δ in rad·s⁻¹ under the configured convention.
    pub fn band_width(&self) -> f64 {
        self.convention().khz_to_internal(self.lattice.band_width_khz)
    }

    /// Published E_g in rad·s⁻¹ under the configured convention.
    pub fn band_gap(&self) -> f64 {
        self.convention().khz_to_internal(self.lattice.band_gap_khz)
    }
}

/// Sets a dotted key (e.g. `lattice.v0_khz`) in a TOML document, creating
/// sections as needed, and returns the new text.
pub fn override_key(text: &str, path: &str, value: toml::Value) -> Result<String, ConfigError> {
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| from_toml_error(text, &e))?;
    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| ConfigError {
        kind: ConfigErrorKind::Invalid,
        key: path.into(),
        line: None,
        message: "empty key path".into(),
    })?;
    let mut table = &mut doc;
    for part in parts {
        let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| ConfigError {
            kind: ConfigErrorKind::Invalid,
            key: path.into(),
            line: None,
            message: format!("`{part}` is not a section"),
        })?;
    }
    table.insert(leaf.to_string(), value);
    Ok(toml::to_string(&doc).expect("table serialises to TOML"))
}

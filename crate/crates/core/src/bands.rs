//! Kronig-Penney band structure of the rectangular periodic potential.
//!
//! Within one cell the barrier (height V₀) occupies 0 < x < a and the well
//! −b < x < 0, with a + b = d. Allowed energies satisfy |g(E)| ≤ 1 where
//! g(E) = cos(κd) is the half-trace of the one-cell transfer matrix.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::FrequencyConvention;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KronigPenneySpec {
    /// Lattice constant (m).
    pub d: f64,
    /// Barrier width (m).
    pub a: f64,
    /// Well width (m).
    pub b: f64,
    /// Barrier height (rad·s⁻¹).
    pub v0: f64,
    /// Effective mass (s·m⁻²).
    pub m_eff: f64,
}

impl KronigPenneySpec {
    /// Builds a spec from the lattice constant and barrier width; the well
    /// fills the rest of the cell.
    pub fn new(d: f64, a: f64, v0: f64, m_eff: f64) -> Result<Self> {
        let spec = Self { d, a, b: d - a, v0, m_eff };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::invalid("d", format!("must be positive, got {}", self.d)));
        }
        if !(self.a > 0.0) {
            return Err(Error::invalid("a", format!("barrier width must be positive, got {}", self.a)));
        }
        if !(self.b > 0.0) {
            return Err(Error::invalid("b", format!("well width must be positive, got {}", self.b)));
        }
        if ((self.a + self.b - self.d) / self.d).abs() > 1e-12 {
            return Err(Error::invalid("a", "barrier and well widths must add up to d"));
        }
        if !(self.v0 > 0.0 && self.v0.is_finite()) {
            return Err(Error::invalid("V0", format!("must be positive, got {}", self.v0)));
        }
        if !(self.m_eff > 0.0 && self.m_eff.is_finite()) {
            return Err(Error::invalid("m_eff", format!("must be positive, got {}", self.m_eff)));
        }
        Ok(())
    }

    pub fn with_barrier_fraction(&self, fraction: f64) -> Result<Self> {
        Self::new(self.d, fraction * self.d, self.v0, self.m_eff)
    }

    pub fn with_v0(&self, v0: f64) -> Result<Self> {
        let spec = Self { v0, ..*self };
        spec.validate()?;
        Ok(spec)
    }

    /// Free-particle energy at the zone boundary, (π/d)²/(2m).
    pub fn recoil_energy(&self) -> f64 {
        (PI / self.d).powi(2) / (2.0 * self.m_eff)
    }
}

/// One allowed band, edges in rad·s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub bottom: f64,
    pub top: f64,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.top - self.bottom
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub bands: Vec<Band>,
    /// Ground-band width Δ.
    pub ground_width: f64,
    /// Gap between the two lowest bands, when at least two were computed.
    pub first_gap: Option<f64>,
}

impl BandStructure {
    pub fn from_bands(bands: Vec<Band>) -> Result<Self> {
        let Some(ground) = bands.first() else {
            return Err(Error::Domain("band structure needs at least one band".into()));
        };
        let ground_width = ground.width();
        let first_gap = bands.get(1).map(|b| b.bottom - ground.top);
        Ok(Self { bands, ground_width, first_gap })
    }
}

/// Window around E = V₀ inside which the barrier factors use their Taylor series.
const BRANCH_WINDOW: f64 = 1e-6;

/// g(E) = cos(κd) for the Kronig-Penney cell.
///
/// Written as g = cos(k₁b)·C + (k₂² − k₁²)/(2k₁)·sin(k₁b)·S with
/// k₂² = 2m(V₀ − E) signed, C = cosh(k₂a) and S = sinh(k₂a)/k₂. Above the
/// barrier C and S continue to cos(qa) and sin(qa)/q.
pub fn dispersion_function(spec: &KronigPenneySpec, energy: f64) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::Domain(format!("energy must be positive, got {energy}")));
    }
    let k1 = (2.0 * spec.m_eff * energy).sqrt();
    let s = 2.0 * spec.m_eff * (spec.v0 - energy);
    let (c, sa) = barrier_factors(spec, energy, s);
    let (sin_b, cos_b) = (k1 * spec.b).sin_cos();
    Ok(cos_b * c + (s - k1 * k1) / (2.0 * k1) * sin_b * sa)
}

/// (C, S) = (cosh(k₂a), sinh(k₂a)/k₂) continued through the branch point.
fn barrier_factors(spec: &KronigPenneySpec, energy: f64, s: f64) -> (f64, f64) {
    let a = spec.a;
    let z = s * a * a;
    if (energy - spec.v0).abs() < BRANCH_WINDOW * spec.v0 && z.abs() < 1e-2 {
        let c = 1.0 + z / 2.0 + z * z / 24.0 + z * z * z / 720.0;
        let sa = a * (1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0);
        (c, sa)
    } else if s > 0.0 {
        let q = s.sqrt();
        ((q * a).cosh(), (q * a).sinh() / q)
    } else {
        let q = (-s).sqrt();
        ((q * a).cos(), (q * a).sin() / q)
    }
}

const INITIAL_POINTS_PER_BAND: usize = 64;
const MAX_DOUBLINGS: usize = 8;
const MAX_EXTENSIONS: usize = 6;
const EDGE_REL_TOL: f64 = 1e-12;

/// Lowest `n_bands` bands, edges located where |g| crosses 1.
///
/// The energy mesh is uniform in free-particle wavenumber with 64 points per
/// free band, doubled until the number of bands stops changing; the ceiling
/// is raised when too few bands lie below it.
pub fn compute_bands(spec: &KronigPenneySpec, n_bands: usize) -> Result<BandStructure> {
    spec.validate()?;
    if n_bands == 0 {
        return Err(Error::invalid("n_bands", "must be at least 1"));
    }
    let mut span = (n_bands + 2) as f64;
    let mut ceiling = 0.0;
    let mut found = 0;
    for _ in 0..MAX_EXTENSIONS {
        ceiling = spec.v0 + (span * PI / spec.d).powi(2) / (2.0 * spec.m_eff);
        let mut density = INITIAL_POINTS_PER_BAND;
        let mut previous = scan_bands(spec, ceiling, density)?;
        for _ in 0..MAX_DOUBLINGS {
            density *= 2;
            let refined = scan_bands(spec, ceiling, density)?;
            let stable = refined.len() == previous.len();
            previous = refined;
            if stable {
                break;
            }
        }
        found = previous.len();
        if found >= n_bands {
            previous.truncate(n_bands);
            return BandStructure::from_bands(previous);
        }
        span *= 2.0;
    }
    Err(Error::BandSearchExhausted { found, requested: n_bands, ceiling })
}

fn excess(spec: &KronigPenneySpec, e: f64) -> f64 {
    dispersion_function(spec, e).map(|g| g.abs() - 1.0).unwrap_or(f64::NAN)
}

/// Complete bands below `ceiling` found on one mesh.
///
/// g runs monotonically from ±1 to ∓1 across every band, so each band holds
/// exactly one zero of g and |g| has a single maximum in each gap. Zeros are
/// bracketed on the mesh however narrow the band, then each gap maximum is
/// refined and the edges bisected on either side of it.
fn scan_bands(spec: &KronigPenneySpec, ceiling: f64, points_per_band: usize) -> Result<Vec<Band>> {
    let k_max = (2.0 * spec.m_eff * ceiling).sqrt();
    let n = ((k_max * spec.d / PI) * points_per_band as f64).ceil() as usize + 1;
    // skip E = 0, where the well wavenumber vanishes
    let energies: Vec<f64> = (1..=n).map(|i| (k_max * i as f64 / n as f64).powi(2) / (2.0 * spec.m_eff)).collect();
    let g: Vec<f64> = energies.iter().map(|&e| dispersion_function(spec, e)).collect::<Result<_>>()?;

    let mut zeros = Vec::new();
    for i in 1..energies.len() {
        if g[i] == 0.0 {
            zeros.push(energies[i]);
        } else if g[i - 1] != 0.0 && (g[i - 1] > 0.0) != (g[i] > 0.0) {
            zeros.push(bisect_zero(spec, energies[i - 1], energies[i]));
        }
    }
    let Some(&first_zero) = zeros.first() else {
        return Ok(Vec::new());
    };

    let floor = energies[0] * 1e-9;
    let mut bottom = if excess(spec, floor) > 0.0 { bisect_edge(spec, floor, first_zero) } else { floor };
    let mut bands = Vec::with_capacity(zeros.len());
    for pair in zeros.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (e_star, h_star) = gap_maximum(spec, lo, hi, &energies, &g);
        if h_star > 0.0 {
            bands.push(Band { bottom, top: bisect_edge(spec, lo, e_star) });
            bottom = bisect_edge(spec, e_star, hi);
        } else {
            bands.push(Band { bottom, top: e_star });
            bottom = e_star;
        }
    }
    Ok(bands)
}

/// Maximum of |g| − 1 strictly between two consecutive zeros of g, seeded
/// from the largest mesh sample in between.
fn gap_maximum(spec: &KronigPenneySpec, lo: f64, hi: f64, energies: &[f64], g: &[f64]) -> (f64, f64) {
    let inside: Vec<usize> = (0..energies.len()).filter(|&i| energies[i] > lo && energies[i] < hi).collect();
    let (a, b) = match inside.iter().copied().max_by(|&i, &j| g[i].abs().total_cmp(&g[j].abs())) {
        Some(best) => {
            let a = if best > 0 { energies[best - 1].max(lo) } else { lo };
            let b = energies.get(best + 1).map_or(hi, |&e| e.min(hi));
            (a, b)
        }
        None => (lo, hi),
    };
    maximise_excess(spec, a, b)
}

/// Zero of g between a sign-changing pair.
fn bisect_zero(spec: &KronigPenneySpec, mut lo: f64, mut hi: f64) -> f64 {
    let sign_lo = dispersion_function(spec, lo).map_or(0.0, f64::signum);
    for _ in 0..200 {
        if hi - lo <= EDGE_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = dispersion_function(spec, mid).unwrap_or(f64::NAN);
        if g_mid == 0.0 {
            return mid;
        }
        if g_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of |g| − 1 between a bracketing pair, to relative [`EDGE_REL_TOL`].
fn bisect_edge(spec: &KronigPenneySpec, mut lo: f64, mut hi: f64) -> f64 {
    let mut h_lo = excess(spec, lo);
    for _ in 0..200 {
        if hi - lo <= EDGE_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let h_mid = excess(spec, mid);
        if h_mid == 0.0 {
            return mid;
        }
        if (h_mid > 0.0) == (h_lo > 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the maximum of |g| − 1 on [lo, hi].
fn maximise_excess(spec: &KronigPenneySpec, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = excess(spec, x1);
    let mut f2 = excess(spec, x2);
    for _ in 0..200 {
        if hi - lo <= EDGE_REL_TOL * hi {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = excess(spec, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = excess(spec, x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, excess(spec, x))
}

/// Default threshold on F·d/E_g below which interband mixing is neglected.
pub const SINGLE_BAND_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleBandValidity {
    pub ratio: f64,
    pub valid: bool,
}

/// Ratio F·d/E_g of the Bloch energy to the first gap.
pub fn single_band_validity(force: f64, d: f64, band_gap: f64) -> Result<SingleBandValidity> {
    if !(band_gap > 0.0) {
        return Err(Error::invalid("E_gap", format!("must be positive, got {band_gap}")));
    }
    let ratio = (force * d).abs() / band_gap;
    Ok(SingleBandValidity { ratio, valid: ratio < SINGLE_BAND_THRESHOLD })
}

/// One point of the barrier-fraction / frequency-convention study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryFit {
    pub convention: FrequencyConvention,
    pub barrier_fraction: f64,
    /// Computed Δ and E_g, expressed back in kHz under `convention`.
    pub width_khz: f64,
    pub gap_khz: f64,
    /// Root-sum-square of the relative deviations from the targets.
    pub misfit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryScan {
    pub points: Vec<GeometryFit>,
    pub best: GeometryFit,
}

/// Scans barrier fractions a/d and both kHz readings of V₀, comparing the
/// resulting (Δ, E_g) with target values quoted in kHz.
pub fn scan_geometry(
    d: f64,
    m_eff: f64,
    v0_khz: f64,
    fractions: &[f64],
    target_width_khz: f64,
    target_gap_khz: f64,
) -> Result<GeometryScan> {
    let mut points = Vec::with_capacity(fractions.len() * 2);
    for convention in FrequencyConvention::ALL {
        for &fraction in fractions {
            let spec = KronigPenneySpec::new(d, fraction * d, convention.khz_to_internal(v0_khz), m_eff)?;
            let bs = compute_bands(&spec, 2)?;
            let width_khz = convention.internal_to_khz(bs.ground_width);
            let gap_khz = convention.internal_to_khz(bs.first_gap.unwrap_or(0.0));
            let misfit = (((width_khz - target_width_khz) / target_width_khz).powi(2)
                + ((gap_khz - target_gap_khz) / target_gap_khz).powi(2))
            .sqrt();
            points.push(GeometryFit { convention, barrier_fraction: fraction, width_khz, gap_khz, misfit });
        }
    }
    let best = *points
        .iter()
        .min_by(|x, y| x.misfit.total_cmp(&y.misfit))
        .ok_or_else(|| Error::invalid("fractions", "scan needs at least one barrier fraction"))?;
    Ok(GeometryScan { points, best })
}

/// a/d ∈ {0.10, 0.15, …, 0.90}.
pub fn default_barrier_fractions() -> Vec<f64> {
    (0..=16).map(|i| 0.1 + 0.05 * i as f64).collect()
}

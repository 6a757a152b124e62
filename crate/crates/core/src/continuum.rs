//! Continuum propagation of i∂_tψ = [P²/(2m) + V(x) + F·x]ψ on a uniform
//! periodic grid.
//!
//! The split-step scheme alternates exact potential phases in position space
//! with exact kinetic phases in momentum space (Strang splitting, second
//! order in the step). It checks the tight-binding reduction against the
//! full Kronig-Penney washboard and propagates the force-free component.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::bands::{compute_bands, Band, BandStructure, KronigPenneySpec};
use crate::eit::PolaritonParams;
use crate::error::{Error, Result};
use crate::series::TrajectorySeries;
use crate::units::wrap_to_brillouin_zone;

/// Largest phase any single factor may rotate per step.
pub const PHASE_BUDGET: f64 = 0.05;
/// Probability allowed in the outer 5% of the grid on each side.
pub const EDGE_OCCUPANCY_LIMIT: f64 = 1e-6;
/// Barrier widths must span at least this many grid cells.
pub const POINTS_PER_BARRIER: f64 = 8.0;

/// Cell-relative positions this close to a boundary snap onto it, so grid
/// points placed exactly on barrier edges classify consistently.
const SNAP: f64 = 1e-9;

/// V(x) = V₀ on barriers (x mod d ∈ [0, a)), 0 in wells, plus F·x.
pub fn sample_potential(spec: &KronigPenneySpec, force: f64, x: f64) -> f64 {
    let mut frac = x / spec.d - (x / spec.d).floor();
    if frac > 1.0 - SNAP {
        frac = 0.0;
    }
    let barrier = frac < spec.a / spec.d - SNAP;
    (if barrier { spec.v0 } else { 0.0 }) + force * x
}

/// Periodic Kronig-Penney potential (if any) plus a linear tilt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Washboard {
    pub lattice: Option<KronigPenneySpec>,
    pub force: f64,
}

impl Washboard {
    pub fn free() -> Self {
        Self { lattice: None, force: 0.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.lattice {
            Some(spec) => sample_potential(spec, self.force, x),
            None => self.force * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHamiltonian {
    /// Effective mass (s·m⁻²).
    pub mass: f64,
    pub potential: Washboard,
}

/// ψ(x_j) at x_j = x_min + j·dx on a periodic grid of power-of-two size.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub x_min: f64,
    pub dx: f64,
    pub psi: Vec<Complex64>,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMoments {
    pub center: f64,
    pub width: f64,
    pub norm: f64,
}

impl GridState {
    pub fn new(x_min: f64, dx: f64, psi: Vec<Complex64>) -> Result<Self> {
        if !psi.len().is_power_of_two() || psi.len() < 4 {
            return Err(Error::invalid("n_points", format!("must be a power of two, got {}", psi.len())));
        }
        if !(dx > 0.0 && dx.is_finite()) || !x_min.is_finite() {
            return Err(Error::invalid("dx", format!("grid spacing must be positive, got {dx}")));
        }
        Ok(Self { x_min, dx, psi, t: 0.0 })
    }

    /// Normalised Gaussian (2πσ²)^{−1/4}·exp(−(x − center)²/(4σ²)) with zero mean momentum.
    pub fn gaussian(x_min: f64, dx: f64, n_points: usize, sigma: f64, center: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
        }
        let psi = (0..n_points)
            .map(|j| {
                let x = x_min + j as f64 * dx - center;
                Complex64::new((-x * x / (4.0 * sigma * sigma)).exp(), 0.0)
            })
            .collect();
        let mut state = Self::new(x_min, dx, psi)?;
        state.normalize();
        Ok(state)
    }

    pub fn n_points(&self) -> usize {
        self.psi.len()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.n_points() as f64 * self.dx
    }

    /// Σ|ψ|²·dx.
    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn normalize(&mut self) {
        let n = self.norm().sqrt();
        if n > 0.0 {
            for a in &mut self.psi {
                *a /= n;
            }
        }
    }

    /// Larger of the probabilities held by the outer 5% of points on each side.
    pub fn edge_occupancy(&self) -> f64 {
        let band = (self.n_points() as f64 * 0.05).ceil() as usize;
        let sum = |s: &[Complex64]| s.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx;
        let n = self.n_points();
        sum(&self.psi[..band]).max(sum(&self.psi[n - band..]))
    }

    pub fn moments(&self) -> GridMoments {
        let (mut norm, mut first, mut second) = (0.0, 0.0, 0.0);
        for (j, a) in self.psi.iter().enumerate() {
            let p = a.norm_sqr();
            let x = self.x(j);
            norm += p;
            first += p * x;
            second += p * x * x;
        }
        if norm == 0.0 {
            return GridMoments { center: 0.0, width: 0.0, norm: 0.0 };
        }
        let center = first / norm;
        GridMoments {
            center,
            width: (second / norm - center * center).max(0.0).sqrt(),
            norm: norm * self.dx,
        }
    }

    /// |ψ(x_j)|² (m⁻¹).
    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_edges(&self) -> Result<()> {
        let occupancy = self.edge_occupancy();
        if occupancy > EDGE_OCCUPANCY_LIMIT {
            return Err(Error::EdgeOccupancy { occupancy, limit: EDGE_OCCUPANCY_LIMIT });
        }
        Ok(())
    }
}

/// Grid wavenumber of FFT bin j.
fn grid_wavenumber(j: usize, n: usize, dx: f64) -> f64 {
    let signed = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
    2.0 * PI * signed / (n as f64 * dx)
}

/// Checks the phase budgets and barrier resolution for one step size.
pub fn check_grid_budget(state: &GridState, ham: &GridHamiltonian, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(ham.mass > 0.0) {
        return Err(Error::invalid("mass", format!("must be positive, got {}", ham.mass)));
    }
    if let Some(spec) = &ham.potential.lattice {
        let required = spec.a / POINTS_PER_BARRIER;
        if state.dx > required * (1.0 + 1e-9) {
            return Err(Error::GridTooCoarse { dx: state.dx, required });
        }
    }
    let k_max = PI / state.dx;
    let kinetic_max = k_max * k_max / (2.0 * ham.mass);
    let potential_max = (0..state.n_points())
        .map(|j| ham.potential.value(state.x(j)).abs())
        .fold(0.0, f64::max);
    let limit = PHASE_BUDGET / kinetic_max.max(potential_max);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::UnstableStep { dt, suggested: limit });
    }
    Ok(())
}

/// Largest step satisfying both phase budgets on this grid.
pub fn max_grid_dt(state: &GridState, ham: &GridHamiltonian) -> f64 {
    let k_max = PI / state.dx;
    let kinetic_max = k_max * k_max / (2.0 * ham.mass);
    let potential_max = (0..state.n_points())
        .map(|j| ham.potential.value(state.x(j)).abs())
        .fold(0.0, f64::max);
    PHASE_BUDGET / kinetic_max.max(potential_max)
}

/// Strang split-step propagator for one grid and one signed step.
pub struct GridPropagator {
    step: f64,
    half_potential: Vec<Complex64>,
    full_potential: Vec<Complex64>,
    /// e^{−ik²τ/2m}/N, folding in the inverse-transform normalisation.
    kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl GridPropagator {
    pub fn new(state: &GridState, ham: &GridHamiltonian, step: f64) -> Self {
        let n = state.n_points();
        let potential: Vec<f64> = (0..n).map(|j| ham.potential.value(state.x(j))).collect();
        let half_potential = potential.iter().map(|v| Complex64::from_polar(1.0, -0.5 * v * step)).collect();
        let full_potential = potential.iter().map(|v| Complex64::from_polar(1.0, -v * step)).collect();
        let scale = 1.0 / n as f64;
        let kinetic = (0..n)
            .map(|j| {
                let k = grid_wavenumber(j, n, state.dx);
                Complex64::from_polar(scale, -k * k / (2.0 * ham.mass) * step)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            step,
            half_potential,
            full_potential,
            kinetic,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn kinetic_step(&mut self, psi: &mut [Complex64]) {
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (a, k) in psi.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }

    /// Advances `steps` Strang steps; interior half-potential factors are merged.
    pub fn advance(&mut self, state: &mut GridState, steps: usize) {
        if steps == 0 {
            return;
        }
        let psi = &mut state.psi;
        for (a, p) in psi.iter_mut().zip(&self.half_potential) {
            *a *= p;
        }
        for s in 0..steps {
            self.kinetic_step(psi);
            let factors = if s + 1 == steps { &self.half_potential } else { &self.full_potential };
            for (a, p) in psi.iter_mut().zip(factors) {
                *a *= p;
            }
        }
        state.t += steps as f64 * self.step;
    }
}

fn step_count(t: f64, dt: f64) -> usize {
    ((t.abs() / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Propagates `state` by `t` (either sign) with steps no longer than `dt`.
pub fn evolve_grid(state: &GridState, ham: &GridHamiltonian, t: f64, dt: f64) -> Result<GridState> {
    check_grid_budget(state, ham, dt)?;
    let mut out = state.clone();
    if t != 0.0 {
        let steps = step_count(t, dt);
        GridPropagator::new(state, ham, t / steps as f64).advance(&mut out, steps);
        out.t = state.t + t;
    }
    out.check_edges()?;
    Ok(out)
}

/// Observables at increasing `times` measured from `state.t`.
///
/// When `lattice_constant` is given the reported quasimomentum is the peak
/// of the momentum density folded into the first Brillouin zone; otherwise
/// it is the plain momentum peak.
pub fn evolve_grid_series(
    state: &GridState,
    ham: &GridHamiltonian,
    times: &[f64],
    dt: f64,
    lattice_constant: Option<f64>,
) -> Result<(TrajectorySeries, GridState)> {
    check_grid_budget(state, ham, dt)?;
    let mut series = TrajectorySeries::with_capacity(times.len());
    let mut current = state.clone();
    let start = state.t;
    let mut now = 0.0;
    let mut cached: Option<(usize, GridPropagator)> = None;
    for &t in times {
        let interval = t - now;
        if interval < 0.0 {
            return Err(Error::invalid("times", "sample times must be increasing"));
        }
        if interval > 0.0 {
            let steps = step_count(interval, dt);
            let step = interval / steps as f64;
            let reuse = matches!(&cached, Some((s, p)) if *s == steps && (p.step() - step).abs() <= 1e-12 * step);
            if !reuse {
                cached = Some((steps, GridPropagator::new(state, ham, step)));
            }
            let (_, prop) = cached.as_mut().expect("propagator cached above");
            prop.advance(&mut current, steps);
            current.t = start + t;
            current.check_edges()?;
        }
        now = t;
        let m = current.moments();
        series.push(current.t, m.center, m.width, momentum_peak(&current, lattice_constant), m.norm);
    }
    Ok((series, current))
}

/// Peak of |ψ̃(k)|², folded into [−π/d, π/d) when a lattice constant is given.
pub fn momentum_peak(state: &GridState, lattice_constant: Option<f64>) -> f64 {
    let n = state.n_points();
    let mut buf = state.psi.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    match lattice_constant {
        None => {
            let j = argmax(buf.iter().map(|a| a.norm_sqr()));
            grid_wavenumber(j, n, state.dx)
        }
        Some(d) => {
            let dk = 2.0 * PI / (n as f64 * state.dx);
            let bins = ((2.0 * PI / d) / dk).round().max(1.0) as usize;
            let mut folded = vec![0.0; bins];
            for (j, a) in buf.iter().enumerate() {
                let idx = (j as i64 - if j < n / 2 { 0 } else { n as i64 }).rem_euclid(bins as i64);
                folded[idx as usize] += a.norm_sqr();
            }
            let j = argmax(folded.into_iter());
            wrap_to_brillouin_zone(j as f64 * dk, d)
        }
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0, |(j, _)| j)
}

/// Ground-band Bloch function at κ = 0 on a cell of `points_per_cell` grid
/// points starting at a barrier edge, using the same spectral kinetic
/// operator as the propagator. Returns (energy, u_j) with Σ u_j > 0.
pub fn ground_bloch_function(spec: &KronigPenneySpec, points_per_cell: usize) -> Result<(f64, Vec<f64>)> {
    spec.validate()?;
    if points_per_cell < 4 {
        return Err(Error::invalid("points_per_cell", "need at least 4 points per cell"));
    }
    let m = points_per_cell;
    let dx = spec.d / m as f64;
    let mut h = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        for l in 0..m {
            // T_jl = (1/M) Σ_q k_q²/(2m) cos(k_q (x_j − x_l))
            let mut t = 0.0;
            for q in 0..m {
                let k = grid_wavenumber(q, m, dx);
                t += k * k / (2.0 * spec.m_eff) * (k * (j as f64 - l as f64) * dx).cos();
            }
            h[(j, l)] = t / m as f64;
        }
        h[(j, j)] += sample_potential(spec, 0.0, j as f64 * dx);
    }
    let eig = SymmetricEigen::new(h);
    let (idx, energy) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty cell");
    let mut u: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((energy, u))
}

/// Gaussian envelope times the ground-band Bloch function, so the launched
/// state lies in the lowest band. `x_min` must sit on a cell boundary and
/// `dx` must divide d into `bloch.len()` points.
pub fn dressed_gaussian(
    x_min: f64,
    dx: f64,
    n_points: usize,
    sigma: f64,
    center: f64,
    d: f64,
    bloch: &[f64],
) -> Result<GridState> {
    let m = bloch.len();
    if ((dx * m as f64 - d) / d).abs() > 1e-9 {
        return Err(Error::invalid("dx", "grid spacing must divide the lattice constant"));
    }
    let cells = x_min / d;
    if (cells - cells.round()).abs() > 1e-9 {
        return Err(Error::invalid("x_min", "grid must start on a cell boundary"));
    }
    let mut state = GridState::gaussian(x_min, dx, n_points, sigma, center)?;
    for (j, a) in state.psi.iter_mut().enumerate() {
        *a *= bloch[j % m];
    }
    state.normalize();
    Ok(state)
}

/// Grid layout for a washboard run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WashboardGrid {
    pub x_min: f64,
    pub dx: f64,
    pub n_points: usize,
}

impl WashboardGrid {
    /// Covers [min(0, −2A) − 10σ, max(0, −2A) + 10σ] with d/points_per_cell
    /// spacing, starting on a cell boundary and rounded up to a power of two.
    pub fn for_oscillation(d: f64, amplitude: f64, sigma: f64, points_per_cell: usize) -> Self {
        let dx = d / points_per_cell as f64;
        let turning = -2.0 * amplitude;
        let lo = turning.min(0.0) - 10.0 * sigma;
        let hi = turning.max(0.0) + 10.0 * sigma;
        let x_min = (lo / d).floor() * d;
        let needed = ((hi - x_min) / dx).ceil() as usize;
        Self { x_min, dx, n_points: needed.next_power_of_two() }
    }
}

/// Result of launching a ground-band packet into the full washboard.
#[derive(Debug, Clone)]
pub struct WashboardRun {
    pub series: TrajectorySeries,
    pub final_state: GridState,
    /// ⟨x⟩ at t = 0; the dressed packet sits slightly off x = 0 inside the cell.
    pub initial_center: f64,
    pub dt: f64,
    pub grid: WashboardGrid,
}

/// Continuum Bloch oscillation: dressed Gaussian of width `sigma` at x = 0
/// in the Kronig-Penney potential plus tilt `force`.
pub fn washboard_run(
    spec: &KronigPenneySpec,
    force: f64,
    band_width: f64,
    sigma: f64,
    points_per_cell: usize,
    times: &[f64],
    dt: Option<f64>,
) -> Result<WashboardRun> {
    let amplitude = if force == 0.0 { 0.0 } else { band_width / (2.0 * force) };
    let grid = WashboardGrid::for_oscillation(spec.d, amplitude, sigma, points_per_cell);
    let (_, bloch) = ground_bloch_function(spec, points_per_cell)?;
    let state = dressed_gaussian(grid.x_min, grid.dx, grid.n_points, sigma, 0.0, spec.d, &bloch)?;
    let ham = GridHamiltonian { mass: spec.m_eff, potential: Washboard { lattice: Some(*spec), force } };
    let dt = dt.unwrap_or_else(|| max_grid_dt(&state, &ham));
    let initial_center = state.moments().center;
    let (series, final_state) = evolve_grid_series(&state, &ham, times, dt, Some(spec.d))?;
    Ok(WashboardRun { series, final_state, initial_center, dt, grid })
}

/// Washboard trajectory compared with A[cos(ω_B t) − 1], where Δ is the
/// ground-band width of the same Kronig-Penney lattice.
#[derive(Debug, Clone)]
pub struct ContinuumCheck {
    pub run: WashboardRun,
    pub band_width: f64,
    pub amplitude: f64,
    pub omega_b: f64,
    /// max_t |x(t) − x(0) − A[cos(ω_B t) − 1]| (m).
    pub max_center_error: f64,
    /// Time of the first displacement maximum after a half period.
    pub measured_period: f64,
    /// |measured − 2π/ω_B| / (2π/ω_B).
    pub period_error: f64,
}

impl ContinuumCheck {
    pub fn relative_error(&self) -> f64 {
        self.max_center_error / self.amplitude.abs()
    }
}

/// Runs the washboard for `periods` Bloch periods (at least 1.2 so the
/// return peak is bracketed) and scores it against the cosine law.
pub fn continuum_cross_check(
    spec: &KronigPenneySpec,
    force: f64,
    sigma: f64,
    points_per_cell: usize,
    samples_per_period: usize,
    periods: f64,
    dt: Option<f64>,
) -> Result<ContinuumCheck> {
    if force == 0.0 {
        return Err(Error::ZeroForce);
    }
    if periods < 1.2 {
        return Err(Error::invalid("periods", "need at least 1.2 periods to time the return"));
    }
    let band_width = compute_bands(spec, 1)?.ground_width;
    let omega_b = (force * spec.d).abs();
    let period = 2.0 * PI / omega_b;
    let amplitude = band_width / (2.0 * force);
    let count = (samples_per_period as f64 * periods).round() as usize;
    let times: Vec<f64> = (0..=count).map(|i| i as f64 * period / samples_per_period as f64).collect();
    let run = washboard_run(spec, force, band_width, sigma, points_per_cell, &times, dt)?;
    let x0 = run.series.center[0];
    let disp: Vec<f64> = run.series.center.iter().map(|c| c - x0).collect();
    let max_center_error = run
        .series
        .times
        .iter()
        .zip(&disp)
        .map(|(t, x)| (x - amplitude * ((omega_b * t).cos() - 1.0)).abs())
        .fold(0.0, f64::max);
    // x_c = A(cos ω_B t − 1) moves toward −sign(A)
    let measured_period = run.series.return_time(period, -amplitude).ok_or_else(|| {
        Error::invalid("periods", "too few samples to time the return")
    })?;
    Ok(ContinuumCheck {
        run,
        band_width,
        amplitude,
        omega_b,
        max_center_error,
        measured_period,
        period_error: ((measured_period - period) / period).abs(),
    })
}

/// Free propagation of the force-free component: a Gaussian of width
/// `sigma` on a ±10σ grid, sampled at `samples + 1` evenly spaced times up
/// to `t_final`, with the beam-axis drift z = v_g·t attached.
pub fn free_component_run(params: &PolaritonParams, sigma: f64, t_final: f64, samples: usize) -> Result<TrajectorySeries> {
    let (series, _) = free_component_states(params, sigma, t_final, samples, 512)?;
    Ok(series)
}

/// As [`free_component_run`] on `n_points` grid points, also returning the
/// grid state at every sample.
pub fn free_component_states(
    params: &PolaritonParams,
    sigma: f64,
    t_final: f64,
    samples: usize,
    n_points: usize,
) -> Result<(TrajectorySeries, Vec<GridState>)> {
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample interval"));
    }
    let dx = 20.0 * sigma / n_points as f64;
    let state = GridState::gaussian(-10.0 * sigma, dx, n_points, sigma, 0.0)?;
    let ham = GridHamiltonian { mass: params.m_eff, potential: Washboard::free() };
    let dt = max_grid_dt(&state, &ham);
    let mut series = TrajectorySeries::with_capacity(samples + 1);
    let mut states = Vec::with_capacity(samples + 1);
    let mut current = state.clone();
    let interval = t_final / samples as f64;
    let steps = step_count(interval, dt);
    let mut prop = GridPropagator::new(&state, &ham, interval / steps as f64);
    for i in 0..=samples {
        if i > 0 {
            prop.advance(&mut current, steps);
            current.t = i as f64 * interval;
            current.check_edges()?;
        }
        let m = current.moments();
        series.push(current.t, m.center, m.width, momentum_peak(&current, None), m.norm);
        states.push(current.clone());
    }
    series.z_center = Some(series.times.iter().map(|t| params.v_g * t).collect());
    Ok((series, states))
}

/// Plane waves per side in [`grid_band_edges`].
const PLANE_WAVE_CUTOFF: i64 = 128;

/// Bands from diagonalising the Bloch Hamiltonian in a plane-wave basis at
/// `kappa_samples` evenly spaced κ ∈ [0, π/d]; each band spans the extrema
/// over the samples.
pub fn grid_band_edges(spec: &KronigPenneySpec, kappa_samples: usize, n_bands: usize) -> Result<BandStructure> {
    spec.validate()?;
    if kappa_samples < 2 {
        return Err(Error::invalid("kappa_samples", "need at least 2 samples"));
    }
    if n_bands == 0 || n_bands as i64 > 2 * PLANE_WAVE_CUTOFF {
        return Err(Error::invalid("n_bands", format!("must lie in 1..={}", 2 * PLANE_WAVE_CUTOFF)));
    }
    let mut bands: Vec<Band> =
        vec![Band { bottom: f64::INFINITY, top: f64::NEG_INFINITY }; n_bands];
    for s in 0..kappa_samples {
        let kappa = PI / spec.d * s as f64 / (kappa_samples - 1) as f64;
        let energies = bloch_energies(spec, kappa);
        for (band, &e) in bands.iter_mut().zip(&energies) {
            band.bottom = band.bottom.min(e);
            band.top = band.top.max(e);
        }
    }
    BandStructure::from_bands(bands)
}

/// Sorted eigenvalues of the Bloch Hamiltonian at quasimomentum κ.
///
/// The cell is centred on a barrier so the Fourier coefficients
/// V_G = 2V₀ sin(Ga/2)/(Gd) are real.
pub fn bloch_energies(spec: &KronigPenneySpec, kappa: f64) -> Vec<f64> {
    let g = |j: i64| 2.0 * PI * j as f64 / spec.d;
    let size = (2 * PLANE_WAVE_CUTOFF + 1) as usize;
    let mut h = DMatrix::<f64>::zeros(size, size);
    for p in 0..size {
        let jp = p as i64 - PLANE_WAVE_CUTOFF;
        for q in 0..size {
            let jq = q as i64 - PLANE_WAVE_CUTOFF;
            let dg = g(jp - jq);
            h[(p, q)] = if jp == jq {
                (kappa + g(jp)).powi(2) / (2.0 * spec.m_eff) + spec.v0 * spec.a / spec.d
            } else {
                2.0 * spec.v0 * (0.5 * dg * spec.a).sin() / (dg * spec.d)
            };
        }
    }
    let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

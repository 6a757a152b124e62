//! Scenario runners. Each one only wires core-library calls together and
//! packages their results; all physics lives in `polariton_core`.

use std::collections::BTreeMap;

use polariton_core::bands::{compute_bands, dispersion_function, scan_geometry, default_barrier_fractions};
use polariton_core::bands::single_band_validity;
use polariton_core::continuum::{continuum_cross_check, free_component_states, grid_band_edges};
use polariton_core::eit::{rb87, PolaritonParams};
use polariton_core::lattice::{
    apply_hamiltonian, evolve_exact, exact_series, gaussian_packet, max_stable_dt, numeric_series,
    packet_moments, quasimomentum_drift, time_grid, wannier_stark_state, AnalyticTrajectory, TightBindingModel,
};
use polariton_core::units::FrequencyConvention;
use polariton_core::TrajectorySeries;

use crate::config::{Scenario, ScenarioConfig};
use crate::output::Artifact;
use crate::summary::{Check, DerivedParams};

/// Everything a scenario produces besides the derived parameters.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOutcome {
    pub checks: Vec<Check>,
    pub results: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
    pub artifacts: Vec<Artifact>,
}

impl ScenarioOutcome {
    fn result(&mut self, key: &str, value: f64) {
        self.results.insert(key.into(), value);
    }

    fn label(&mut self, key: &str, value: impl Into<String>) {
        self.labels.insert(key.into(), value.into());
    }
}

/// Tolerances pinned by the acceptance criteria.
pub mod tolerance {
    pub const CROSS_METHOD_CENTER: f64 = 0.05;
    pub const TRAJECTORY: f64 = 0.05;
    pub const WIDTH_DRIFT: f64 = 0.05;
    /// Norm drift allowed per simulated millisecond.
    pub const NORM_PER_MS: f64 = 1e-9;
    pub const REVIVAL: f64 = 1e-8;
    pub const CONTINUUM_TRAJECTORY: f64 = 0.08;
    pub const PERIOD: f64 = 0.02;
    pub const FREE_CENTER_M: f64 = 1e-9;
    pub const FREE_WIDTH_LAW: f64 = 1e-4;
    pub const LADDER_RESIDUAL: f64 = 1e-6;
    pub const LADDER_SPACING: f64 = 1e-9;
    pub const BAND_ORACLE: f64 = 1e-3;
    pub const RIDGE_SPAN: f64 = 0.05;
}

/// Runs one scenario on a validated configuration.
pub fn run_scenario(
    scenario: Scenario,
    config: &ScenarioConfig,
) -> polariton_core::Result<(DerivedParams, ScenarioOutcome)> {
    let (derived, params) = DerivedParams::from_config(config)?;
    let outcome = match scenario {
        Scenario::BandStructure => band_structure(config, &params)?,
        Scenario::BlochOscillation => bloch_oscillation(config, &params)?,
        Scenario::FreeComponent => free_component(config, &params)?,
        Scenario::WannierStark => wannier_stark(config, &params)?,
        Scenario::Figure3 => figure3(config, &params)?,
        Scenario::ValidityCheck => validity_check(config, &params, &derived)?,
    };
    Ok((derived, outcome))
}

fn lattice_model(config: &ScenarioConfig, p: &PolaritonParams) -> polariton_core::Result<TightBindingModel> {
    let n_sites = config.simulation.n_sites.unwrap_or_else(|| {
        TightBindingModel::default_n_sites(p.band_width, p.force_2, p.lattice_constant, config.simulation.sigma)
    });
    TightBindingModel::from_params(p, n_sites)
}

fn oscillation_times(config: &ScenarioConfig, p: &PolaritonParams) -> Vec<f64> {
    time_grid(p.bloch_period, config.simulation.samples_per_period, config.simulation.periods)
}

fn norm_budget(duration: f64) -> f64 {
    tolerance::NORM_PER_MS * (duration * 1e3).max(1.0)
}

fn band_structure(config: &ScenarioConfig, p: &PolaritonParams) -> polariton_core::Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::default();
    let spec = config.kronig_penney()?;
    let conv = config.convention();
    let n_bands = config.simulation.n_bands;
    let solver = compute_bands(&spec, n_bands)?;
    let oracle = grid_band_edges(&spec, 2, n_bands)?;

    let scale = |e: f64| e.abs().max(spec.v0);
    let edge_dev = solver
        .bands
        .iter()
        .zip(&oracle.bands)
        .flat_map(|(s, g)| [(s.bottom - g.bottom).abs() / scale(s.bottom), (s.top - g.top).abs() / scale(s.top)])
        .fold(0.0, f64::max);
    let gap = solver.first_gap.unwrap_or(0.0);
    let width_dev = ((solver.ground_width - oracle.ground_width) / solver.ground_width).abs();
    let gap_dev = ((gap - oracle.first_gap.unwrap_or(0.0)) / gap).abs();
    out.checks.push(Check::at_most("band_edges_vs_plane_wave", edge_dev, tolerance::BAND_ORACLE, "relative to max(|E|, V0)"));
    out.checks.push(Check::at_most("band_width_vs_plane_wave", width_dev, tolerance::BAND_ORACLE, "relative"));
    out.checks.push(Check::at_most("band_gap_vs_plane_wave", gap_dev, tolerance::BAND_ORACLE, "relative"));

    out.result("band_width_kronig_penney", solver.ground_width);
    out.result("band_gap_kronig_penney", gap);
    out.result("band_width_kronig_penney_khz", conv.internal_to_khz(solver.ground_width));
    out.result("band_gap_kronig_penney_khz", conv.internal_to_khz(gap));
    out.result("validity_ratio_kronig_penney", single_band_validity(p.force_2, spec.d, gap)?.ratio);

    let scan = scan_geometry(
        spec.d,
        spec.m_eff,
        config.lattice.v0_khz,
        &default_barrier_fractions(),
        rb87::BAND_WIDTH_KHZ,
        rb87::BAND_GAP_KHZ,
    )?;
    out.result("best_fit_barrier_fraction", scan.best.barrier_fraction);
    out.result("best_fit_width_khz", scan.best.width_khz);
    out.result("best_fit_gap_khz", scan.best.gap_khz);
    out.result("best_fit_misfit", scan.best.misfit);
    out.label("best_fit_convention", scan.best.convention.as_str());

    out.artifacts.push(Artifact::Table {
        name: "bands".into(),
        columns: ["band", "bottom_rad_per_s", "top_rad_per_s", "width_rad_per_s", "bottom_khz", "top_khz"]
            .map(String::from)
            .to_vec(),
        rows: solver
            .bands
            .iter()
            .enumerate()
            .map(|(i, b)| {
                vec![i as f64, b.bottom, b.top, b.width(), conv.internal_to_khz(b.bottom), conv.internal_to_khz(b.top)]
            })
            .collect(),
    });

    let e_max = solver.bands.last().map_or(spec.v0, |b| b.top) * 1.1;
    let samples = 800;
    let mut rows = Vec::with_capacity(samples);
    for i in 1..=samples {
        let e = e_max * i as f64 / samples as f64;
        let g = dispersion_function(&spec, e)?;
        let kappa_d = if g.abs() <= 1.0 { g.acos() } else { f64::NAN };
        rows.push(vec![e, g, kappa_d]);
    }
    out.artifacts.push(Artifact::Table {
        name: "dispersion".into(),
        columns: ["energy_rad_per_s", "cos_kappa_d", "kappa_d"].map(String::from).to_vec(),
        rows,
    });

    out.artifacts.push(Artifact::Table {
        name: "geometry_scan".into(),
        columns: ["angular_convention", "barrier_fraction", "width_khz", "gap_khz", "misfit"].map(String::from).to_vec(),
        rows: scan
            .points
            .iter()
            .map(|f| {
                let angular = if f.convention == FrequencyConvention::Angular { 1.0 } else { 0.0 };
                vec![angular, f.barrier_fraction, f.width_khz, f.gap_khz, f.misfit]
            })
            .collect(),
    });
    Ok(out)
}

fn bloch_oscillation(config: &ScenarioConfig, p: &PolaritonParams) -> polariton_core::Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::default();
    let sim = &config.simulation;
    let model = lattice_model(config, p)?;
    let psi0 = gaussian_packet(&model, sim.sigma, 0.0)?;
    let times = oscillation_times(config, p);
    let duration = *times.last().unwrap_or(&0.0);
    let dt = sim.dt.unwrap_or_else(|| max_stable_dt(&model));
    let amp = p.amplitude.abs();

    let exact = exact_series(&psi0, &times)?;
    let numeric = numeric_series(&psi0, &times, dt)?;
    let law = AnalyticTrajectory::from_params(p);
    let mut analytic = TrajectorySeries::with_capacity(times.len());
    for &t in &times {
        analytic.push(t, law.center(t), exact.width[0], quasimomentum_drift(p.force_2, p.lattice_constant, t), 1.0);
    }

    let cross = exact.center.iter().zip(&numeric.center).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let trajectory = exact.max_center_error(|t| law.center(t));
    out.checks.push(Check::at_most("exact_vs_numeric_center", cross / amp, tolerance::CROSS_METHOD_CENTER, "max |Δx| / A"));
    out.checks.push(Check::at_most("trajectory_law", trajectory / amp, tolerance::TRAJECTORY, "max |x − x_c| / A"));
    out.checks.push(Check::at_most("width_drift", exact.max_width_drift(), tolerance::WIDTH_DRIFT, "relative"));
    out.checks.push(Check::at_most("norm_exact", exact.max_norm_deviation(), norm_budget(duration), "|norm − 1|"));
    out.checks.push(Check::at_most("norm_numeric", numeric.max_norm_deviation(), norm_budget(duration), "|norm − 1|"));
    let revived = evolve_exact(&psi0, p.bloch_period)?;
    out.checks.push(Check::at_least("revival", psi0.fidelity(&revived), 1.0 - tolerance::REVIVAL, "|⟨ψ(0)|ψ(T_B)⟩|"));
    out.result("numeric_dt", dt);
    out.result("n_sites", model.n_sites as f64);
    out.result("max_cross_method_center_m", cross);
    out.result("max_trajectory_error_m", trajectory);

    if sim.continuum {
        if sim.periods >= 1.2 {
            let spec = config.kronig_penney()?;
            let check = continuum_cross_check(
                &spec,
                p.force_2,
                sim.sigma,
                sim.grid_points_per_cell,
                sim.samples_per_period,
                sim.periods,
                sim.grid_dt,
            )?;
            let span = check.run.series.times.last().copied().unwrap_or(0.0);
            out.checks.push(Check::at_most(
                "continuum_trajectory",
                check.relative_error(),
                tolerance::CONTINUUM_TRAJECTORY,
                "max |x − x(0) − x_c| / A for the lattice's own band width",
            ));
            out.checks.push(Check::at_most("continuum_period", check.period_error, tolerance::PERIOD, "relative"));
            out.checks.push(Check::at_most(
                "norm_continuum",
                check.run.series.max_norm_deviation(),
                norm_budget(span),
                "|norm − 1|",
            ));
            out.result("continuum_band_width", check.band_width);
            out.result("continuum_amplitude", check.amplitude);
            out.result("continuum_initial_center", check.run.initial_center);
            out.result("continuum_measured_period", check.measured_period);
            out.result("continuum_dt", check.run.dt);
            out.result("continuum_grid_points", check.run.grid.n_points as f64);
            out.artifacts.push(Artifact::Series { name: "series_continuum".into(), series: check.run.series });
        } else {
            out.label("continuum", "skipped: needs at least 1.2 periods");
        }
    }

    out.artifacts.push(Artifact::Series { name: "series_exact".into(), series: exact });
    out.artifacts.push(Artifact::Series { name: "series_numeric".into(), series: numeric });
    out.artifacts.push(Artifact::Series { name: "series_analytic".into(), series: analytic });
    Ok(out)
}

/// σ(t)/σ(0) for a free Gaussian.
fn free_width_factor(t: f64, mass: f64, sigma: f64) -> f64 {
    (1.0 + (t / (2.0 * mass * sigma * sigma)).powi(2)).sqrt()
}

fn free_component(config: &ScenarioConfig, p: &PolaritonParams) -> polariton_core::Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::default();
    let sim = &config.simulation;
    let (series, _) = free_component_states(p, sim.sigma, sim.free_duration, sim.free_samples, 512)?;
    let w0 = series.width[0];
    let law_dev = series
        .times
        .iter()
        .zip(&series.width)
        .map(|(&t, &w)| {
            let law = w0 * free_width_factor(t, p.m_eff, sim.sigma);
            ((w - law) / law).abs()
        })
        .fold(0.0, f64::max);
    let center = series.center.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let z = series.z_center.as_deref().unwrap_or(&[]);
    let z_dev = series.times.iter().zip(z).map(|(&t, &z)| (z - p.v_g * t).abs()).fold(0.0, f64::max);
    let growth = series.width.last().map_or(0.0, |w| w / w0 - 1.0);

    out.checks.push(Check::at_most("free_center", center, tolerance::FREE_CENTER_M, "max |⟨x⟩| (m)"));
    out.checks.push(Check::at_most("free_width_law", law_dev, tolerance::FREE_WIDTH_LAW, "relative to σ√(1 + (t/2mσ²)²)"));
    out.checks.push(Check::at_most("z_drift", z_dev, 0.0, "max |z − v_g t| (m)"));
    out.checks.push(Check::at_most("norm_free", series.max_norm_deviation(), norm_budget(sim.free_duration), "|norm − 1|"));
    out.result("width_growth", growth);
    out.result("spreading_time", 2.0 * p.m_eff * sim.sigma * sim.sigma);
    out.result("z_final", z.last().copied().unwrap_or(0.0));
    out.artifacts.push(Artifact::Series { name: "free_component".into(), series });
    Ok(out)
}

fn wannier_stark(config: &ScenarioConfig, p: &PolaritonParams) -> polariton_core::Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::default();
    let model = lattice_model(config, p)?;
    let step = model.omega_b();
    let reach = (p.band_width / (2.0 * step)).abs().ceil() as i64 + 25;
    let mut ladder = Vec::new();
    let mut amplitudes = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut energies = Vec::new();
    for m in -3..=3i64 {
        let psi = wannier_stark_state(&model, m)?;
        let h = apply_hamiltonian(&model, &psi);
        let expected = m as f64 * step;
        let residual = h
            .amplitudes
            .iter()
            .zip(&psi.amplitudes)
            .map(|(a, b)| (a - b * expected).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let energy = psi.energy();
        max_residual = max_residual.max(residual);
        energies.push(energy);
        ladder.push(vec![m as f64, energy, expected, residual]);
        for n in (m - reach)..=(m + reach) {
            let a = psi.amplitude(n);
            amplitudes.push(vec![m as f64, n as f64, a.re, a.im]);
        }
    }
    let spacing_dev = energies.windows(2).map(|w| ((w[1] - w[0]) - step).abs() / step.abs()).fold(0.0, f64::max);
    out.checks.push(Check::at_most("ladder_residual", max_residual, tolerance::LADDER_RESIDUAL, "‖Hψ_m − m d F ψ_m‖ (rad/s)"));
    out.checks.push(Check::at_most("ladder_spacing", spacing_dev, tolerance::LADDER_SPACING, "relative to d F"));
    out.result("ladder_step", step);
    out.result("n_sites", model.n_sites as f64);
    out.artifacts.push(Artifact::Table {
        name: "ladder".into(),
        columns: ["m", "energy_rad_per_s", "expected_rad_per_s", "residual_rad_per_s"].map(String::from).to_vec(),
        rows: ladder,
    });
    out.artifacts.push(Artifact::Table {
        name: "ladder_states".into(),
        columns: ["m", "site", "re", "im"].map(String::from).to_vec(),
        rows: amplitudes,
    });
    Ok(out)
}

fn figure3(config: &ScenarioConfig, p: &PolaritonParams) -> polariton_core::Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::default();
    let sim = &config.simulation;
    let model = lattice_model(config, p)?;
    let psi0 = gaussian_packet(&model, sim.sigma, 0.0)?;
    let times = oscillation_times(config, p);
    let d = p.lattice_constant;

    // component 2 on the sites spanned by the oscillation plus 6σ
    let lo = (-2.0 * p.amplitude).min(0.0) - 6.0 * sim.sigma;
    let hi = (-2.0 * p.amplitude).max(0.0) + 6.0 * sim.sigma;
    let sites: Vec<i64> = model.sites().filter(|&n| (n as f64 * d) >= lo && (n as f64 * d) <= hi).collect();
    let x2: Vec<f64> = sites.iter().map(|&n| n as f64 * d).collect();
    let mut density2 = Vec::with_capacity(sites.len() * times.len());
    let mut ridge = TrajectorySeries::with_capacity(times.len());
    for &t in &times {
        let psi = evolve_exact(&psi0, t)?;
        density2.extend(sites.iter().map(|&n| psi.amplitude(n).norm_sqr() / d));
        let m = packet_moments(&psi);
        ridge.push(t, m.center, m.width, 0.0, m.norm);
    }

    // component 1 on the free grid, sampled at the same times
    let t_end = *times.last().unwrap_or(&0.0);
    let (free, states) = free_component_states(p, sim.sigma, t_end, times.len() - 1, 512)?;
    let x1: Vec<f64> = (0..states[0].n_points()).map(|j| states[0].x(j)).collect();
    let density1: Vec<f64> = states.iter().flat_map(|s| s.density()).collect();

    let period = ridge.return_time(p.bloch_period, -p.amplitude);
    let period_err = period.map_or(f64::INFINITY, |t| ((t - p.bloch_period) / p.bloch_period).abs());
    let span_err = ((ridge.center_span() - 2.0 * p.amplitude.abs()) / (2.0 * p.amplitude.abs())).abs();
    let free_center = free.center.iter().map(|c| c.abs()).fold(0.0, f64::max);
    out.checks.push(Check::at_most("ridge_period", period_err, tolerance::PERIOD, "relative to T_B"));
    out.checks.push(Check::at_most("ridge_peak_to_peak", span_err, tolerance::RIDGE_SPAN, "relative to 2A"));
    out.checks.push(Check::at_most("component1_ridge", free_center, d, "max |⟨x⟩| of the free component (m)"));
    out.result("ridge_period", period.unwrap_or(f64::NAN));
    out.result("ridge_peak_to_peak_over_d", ridge.center_span() / d);
    out.result("component1_max_center", free_center);
    out.result("n_x_component2", x2.len() as f64);
    out.result("n_x_component1", x1.len() as f64);
    out.result("n_t", times.len() as f64);

    out.artifacts.push(Artifact::Grid { name: "figure3_component2".into(), x: x2, t: times.clone(), density: density2 });
    out.artifacts.push(Artifact::Grid { name: "figure3_component1".into(), x: x1, t: times, density: density1 });
    Ok(out)
}

fn validity_check(
    config: &ScenarioConfig,
    p: &PolaritonParams,
    derived: &DerivedParams,
) -> polariton_core::Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::default();
    let spec = config.kronig_penney()?;
    let kp = compute_bands(&spec, 2)?;
    let kp_ratio = single_band_validity(p.force_2, spec.d, kp.first_gap.unwrap_or(0.0))?.ratio;
    out.checks.push(Check::at_most(
        "single_band_validity",
        derived.validity_ratio,
        derived.validity_threshold,
        "F d / E_g with the configured band gap",
    ));
    out.result("validity_ratio_kronig_penney", kp_ratio);
    out.result("band_gap_kronig_penney", kp.first_gap.unwrap_or(0.0));
    out.label("verdict", if derived.single_band_valid { "single-band" } else { "interband mixing expected" });
    Ok(out)
}

use polariton_core::continuum::continuum_cross_check;
use polariton_core::eit::rb87_preset;

#[test]
fn washboard_follows_cosine_trajectory() {
    let preset = rb87_preset();
    let p = preset.polariton().unwrap();
    let start = std::time::Instant::now();
    let check = continuum_cross_check(&preset.lattice, p.force_2, polariton_core::eit::rb87::SIGMA, 16, 64, 1.25, None).unwrap();
    eprintln!(
        "A = {:.4e} m ({:.3} d), err/A = {:.4}, period err = {:.4}, dt = {:.3e}, n = {}, {:?}",
        check.amplitude,
        check.amplitude / preset.lattice.d,
        check.relative_error(),
        check.period_error,
        check.run.dt,
        check.run.grid.n_points,
        start.elapsed()
    );
    assert!(check.relative_error() <= 0.08);
    assert!(check.period_error <= 0.02);
    assert!(check.run.series.max_norm_deviation() < 1e-9 * 1.25 * 1.05);
}

/// Time series of packet observables shared by every propagator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectorySeries {
    /// Sample times (s), strictly increasing.
    pub times: Vec<f64>,
    /// ⟨x⟩ (m).
    pub center: Vec<f64>,
    /// √(⟨x²⟩ − ⟨x⟩²) (m).
    pub width: Vec<f64>,
    /// Quasimomentum (rad·m⁻¹).
    pub kappa: Vec<f64>,
    pub norm: Vec<f64>,
    /// Beam-axis position z = v_g·t (m), when the run tracks it.
    pub z_center: Option<Vec<f64>>,
}

impl TrajectorySeries {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            center: Vec::with_capacity(n),
            width: Vec::with_capacity(n),
            kappa: Vec::with_capacity(n),
            norm: Vec::with_capacity(n),
            z_center: None,
        }
    }

    pub fn push(&mut self, t: f64, center: f64, width: f64, kappa: f64, norm: f64) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.center.push(center);
        self.width.push(width);
        self.kappa.push(kappa);
        self.norm.push(norm);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest |norm − 1| over the series.
    pub fn max_norm_deviation(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest |center − reference(t)|.
    pub fn max_center_error(&self, reference: impl Fn(f64) -> f64) -> f64 {
        self.times
            .iter()
            .zip(&self.center)
            .map(|(&t, &x)| (x - reference(t)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest relative deviation of the width from its initial value.
    pub fn max_width_drift(&self) -> f64 {
        let Some(&w0) = self.width.first() else {
            return 0.0;
        };
        self.width.iter().map(|w| ((w - w0) / w0).abs()).fold(0.0, f64::max)
    }

    /// max(center) − min(center).
    pub fn center_span(&self) -> f64 {
        let max = self.center.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.center.iter().copied().fold(f64::INFINITY, f64::min);
        if self.is_empty() {
            0.0
        } else {
            max - min
        }
    }

    /// Time at which the center first returns to its starting extremum,
    /// searched between half and one and a half nominal periods. `outward` is the sign of the excursion, so the
    /// return is a maximum of −outward·(x − x₀). The sample peak is refined by
    /// a parabola through its neighbours; sampling must be uniform.
    pub fn return_time(&self, nominal_period: f64, outward: f64) -> Option<f64> {
        if self.len() < 3 {
            return None;
        }
        let step = self.times[1] - self.times[0];
        let x0 = self.center[0];
        let y = |i: usize| -outward.signum() * (self.center[i] - x0);
        let start = self.times.iter().position(|&t| t - self.times[0] >= 0.5 * nominal_period)?;
        let end = self.times.iter().rposition(|&t| t - self.times[0] <= 1.5 * nominal_period)? + 1;
        let peak = (start..end).max_by(|&i, &j| y(i).total_cmp(&y(j)))?;
        if peak == start || peak + 1 == self.len() {
            return Some(self.times[peak] - self.times[0]);
        }
        let (ym, y0, yp) = (y(peak - 1), y(peak), y(peak + 1));
        let denom = ym - 2.0 * y0 + yp;
        let shift = if denom != 0.0 { 0.5 * (ym - yp) / denom } else { 0.0 };
        Some(self.times[peak] - self.times[0] + shift * step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosine(period: f64, phase_samples: usize, periods: f64, amplitude: f64) -> TrajectorySeries {
        let n = (phase_samples as f64 * periods) as usize;
        let mut s = TrajectorySeries::with_capacity(n + 1);
        for i in 0..=n {
            let t = i as f64 * period / phase_samples as f64;
            s.push(t, amplitude * ((2.0 * std::f64::consts::PI * t / period).cos() - 1.0), 1.0, 0.0, 1.0);
        }
        s
    }

    #[test]
    fn return_time_of_sampled_cosine() {
        for amp in [-3.0, 2.0] {
            for periods in [1.4, 3.0] {
                let s = cosine(1.7, 48, periods, amp);
                let t = s.return_time(1.7, -amp).unwrap();
                assert!(((t - 1.7) / 1.7).abs() < 1e-3, "{t}");
            }
            let s = cosine(1.7, 48, 1.4, amp);
            assert!((s.center_span() - 2.0 * amp.abs()).abs() < 1e-2);
        }
    }

    #[test]
    fn drift_and_norm_helpers() {
        let mut s = TrajectorySeries::default();
        s.push(0.0, 0.0, 2.0, 0.0, 1.0);
        s.push(1.0, 0.5, 2.1, 0.0, 1.0 + 1e-12);
        assert!((s.max_width_drift() - 0.05).abs() < 1e-12);
        assert!((s.max_norm_deviation() - 1e-12).abs() < 1e-15);
        assert_eq!(s.max_center_error(|t| 0.5 * t), 0.0);
        assert!(s.return_time(1.0, 1.0).is_none());
    }
}

//! Integer-order Bessel functions of the first kind.
//!
//! All orders of one argument are produced in a single downward (Miller)
//! recurrence normalised with J₀ + 2Σ_{k≥1} J_{2k} = 1. Negative orders and
//! arguments follow from J_{−n}(x) = (−1)ⁿJ_n(x) and J_n(−x) = (−1)ⁿJ_n(x).

use crate::error::{Error, Result};

/// Values J_n(x) for every n in `order_min..=order_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRow {
    pub order_min: i64,
    pub order_max: i64,
    pub x: f64,
    pub values: Vec<f64>,
}

impl BesselRow {
    /// J_n(x), or 0 for orders outside the stored window.
    pub fn get(&self, n: i64) -> f64 {
        if n < self.order_min || n > self.order_max {
            0.0
        } else {
            self.values[(n - self.order_min) as usize]
        }
    }

    pub fn orders(&self) -> impl Iterator<Item = i64> {
        self.order_min..=self.order_max
    }

    /// Σ_n J_n(x)² over the stored window.
    pub fn square_sum(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Below this |x| the two-term power series is exact to double precision.
const SERIES_CUTOFF: f64 = 1e-6;
const RESCALE_ABOVE: f64 = 1e200;

/// First order of the downward recurrence for argument |x| when orders up
/// to `n_max` are wanted.
fn start_order(x_abs: f64, n_max: usize) -> usize {
    let base = (n_max as f64).max(x_abs);
    (base + 20.0 + 10.0 * x_abs.cbrt().ceil()).ceil() as usize
}

/// J_0(x) … J_{n_max}(x) for x > 0.
fn nonnegative_orders(x: f64, n_max: usize) -> Vec<f64> {
    debug_assert!(x > 0.0);
    if x < SERIES_CUTOFF {
        return small_argument_series(x, n_max);
    }
    let start = start_order(x, n_max);
    let mut out = vec![0.0; n_max + 1];
    let two_over_x = 2.0 / x;

    // j_next = J_{k+1}, j = J_k (unnormalised)
    let mut j_next = 0.0;
    let mut j = 1e-30;
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if k <= n_max {
            out[k] = j;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k == 0 {
            break;
        }
        let j_prev = (k as f64) * two_over_x * j - j_next;
        j_next = j;
        j = j_prev;
        k -= 1;
        if j.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            j *= s;
            j_next *= s;
            norm *= s;
            for v in out.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// J_n(x) ≈ (x/2)ⁿ/n!·(1 − (x/2)²/(n+1)) for tiny x.
fn small_argument_series(x: f64, n_max: usize) -> Vec<f64> {
    let half = 0.5 * x;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut lead = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            lead *= half / n as f64;
        }
        out.push(lead * (1.0 - half * half / (n as f64 + 1.0)));
    }
    out
}

fn sign_for_order(n: u64) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// J_n(x) for any integer order and finite real argument.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite, got {x}")));
    }
    let order = n.unsigned_abs();
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let values = nonnegative_orders(x.abs(), order as usize);
    let mut v = values[order as usize];
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x)
    if n < 0 {
        v *= sign_for_order(order);
    }
    if x < 0.0 {
        v *= sign_for_order(order);
    }
    Ok(v)
}

/// J_n(x) for all n in [−half_width, half_width] from one recurrence pass.
pub fn bessel_row(x: f64, half_width: usize) -> Result<BesselRow> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite, got {x}")));
    }
    let hw = half_width as i64;
    let positive = if x == 0.0 {
        let mut v = vec![0.0; half_width + 1];
        v[0] = 1.0;
        v
    } else {
        let mut v = nonnegative_orders(x.abs(), half_width);
        if x < 0.0 {
            for (n, val) in v.iter_mut().enumerate() {
                *val *= sign_for_order(n as u64);
            }
        }
        v
    };
    let mut values = Vec::with_capacity(2 * half_width + 1);
    for n in (1..=half_width).rev() {
        values.push(sign_for_order(n as u64) * positive[n]);
    }
    values.extend_from_slice(&positive);
    Ok(BesselRow { order_min: -hw, order_max: hw, x, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Σ_k (−1)^k (x/2)^{n+2k} / (k!(n+k)!), reliable for modest x.
    fn power_series(n: u32, x: f64, terms: usize) -> f64 {
        let half = x / 2.0;
        let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for k in 1..terms {
            term *= -half * half / (k as f64 * (n as f64 + k as f64));
            sum += term;
        }
        sum
    }

    /// (1/π)∫₀^π cos(nτ − x sin τ) dτ by composite Simpson.
    fn integral_oracle(n: i64, x: f64, panels: usize) -> f64 {
        let h = PI / panels as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        let mut s = f(0.0) + f(PI);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0 / PI
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        for n in [-5, -1, 1, 7] {
            assert_eq!(bessel_j(n, 0.0).unwrap(), 0.0);
        }
        let row = bessel_row(0.0, 4).unwrap();
        assert_eq!(row.values, vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn j1_of_one_matches_power_series() {
        let oracle = power_series(1, 1.0, 30);
        assert!((oracle - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(1, 1.0).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn power_series_agreement_small_arguments() {
        for n in 0..12 {
            for &x in &[0.05, 0.5, 2.0, 7.5] {
                let want = power_series(n, x, 60);
                let got = bessel_j(n as i64, x).unwrap();
                assert!((got - want).abs() < 1e-13, "J_{n}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn parity_identities() {
        let a = bessel_j(-3, 2.5).unwrap();
        let b = bessel_j(3, 2.5).unwrap();
        assert_eq!(a, -b);
        assert_eq!(bessel_j(4, -3.0).unwrap(), bessel_j(4, 3.0).unwrap());
        assert_eq!(bessel_j(5, -3.0).unwrap(), -bessel_j(5, 3.0).unwrap());
        let row = bessel_row(5.0, 10).unwrap();
        for n in 1..=10i64 {
            let expect = if n % 2 == 0 { row.get(n) } else { -row.get(n) };
            assert!((row.get(-n) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn tiny_argument_series_branch() {
        let x = 3e-7;
        assert!((bessel_j(1, x).unwrap() - x / 2.0 * (1.0 - x * x / 8.0)).abs() < 1e-25);
        assert!((bessel_j(0, x).unwrap() - (1.0 - x * x / 4.0)).abs() < 1e-25);
        assert_eq!(bessel_j(400, x).unwrap(), 0.0);
    }

    #[test]
    fn recurrence_identity() {
        for &x in &[0.1, 1.0, 10.0, 100.0] {
            let row = bessel_row(x, 60).unwrap();
            for n in 1..=50i64 {
                let lhs = row.get(n - 1) + row.get(n + 1);
                let rhs = 2.0 * n as f64 / x * row.get(n);
                assert!((lhs - rhs).abs() < 1e-9, "x={x} n={n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn square_sum_identity() {
        for &x in &[0.3f64, 5.0, 37.4, 78.6, 250.0, 1000.0] {
            let hw = (x.abs() + 10.0 * x.abs().cbrt() + 40.0).ceil() as usize;
            let row = bessel_row(x, hw).unwrap();
            assert!((row.square_sum() - 1.0).abs() < 1e-10, "x={x}: {}", row.square_sum());
        }
    }

    #[test]
    fn row_matches_pointwise() {
        for &x in &[-12.0, 0.7, 37.4, 600.0] {
            let row = bessel_row(x, 80).unwrap();
            for n in row.orders() {
                let single = bessel_j(n, x).unwrap();
                assert!((row.get(n) - single).abs() < 1e-12, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn integral_representation_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xB355E1);
        for _ in 0..100 {
            let n: i64 = rng.gen_range(-30..=30);
            let x: f64 = rng.gen_range(-60.0..60.0);
            let want = integral_oracle(n, x, 10_000);
            let got = bessel_j(n, x).unwrap();
            assert!((got - want).abs() < 1e-9, "J_{n}({x}) = {got}, oracle {want}");
        }
    }

    #[test]
    fn large_order_underflows_cleanly() {
        let v = bessel_j(1000, 1.0).unwrap();
        assert!(v.abs() < 1e-300);
        let v = bessel_j(900, 1000.0).unwrap();
        assert!(v.is_finite() && v.abs() < 1.0);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_row(f64::INFINITY, 3).is_err());
    }

    proptest! {
        #[test]
        fn bounded_by_one(n in -80i64..80, x in -500.0f64..500.0) {
            let v = bessel_j(n, x).unwrap();
            prop_assert!(v.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn neighbour_recurrence(n in 1i64..40, x in 0.5f64..200.0) {
            let lhs = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
            let rhs = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
